// SPDX-License-Identifier: Apache-2.0
#include "scriv/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scriv {

std::string pgm_bytes(const Image& img) {
    std::ostringstream out;
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (float p : img.pixels) {
        const int v = std::clamp(static_cast<int>(std::lround(p * 255.0f)), 0, 255);
        out.put(static_cast<char>(v));
    }
    return out.str();
}

void save_pgm(const Image& img, const std::string& path) { write_text_file(path, pgm_bytes(img)); }

Image load_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw IoError("pgm: expected P5 in " + path);
    auto next_int = [&]() {
        int v;
        while (true) {
            f >> std::ws;
            if (f.peek() == '#') {
                std::string comment;
                std::getline(f, comment);
                continue;
            }
            break;
        }
        if (!(f >> v)) throw IoError("pgm: truncated header in " + path);
        return v;
    };
    const int w = next_int(), h = next_int(), maxval = next_int();
    if (maxval != 255) throw IoError("pgm: only 8-bit images supported, got maxval " + std::to_string(maxval));
    f.get();  // single whitespace after maxval
    Image img = Image::filled(h, w, 1.0f);
    std::vector<unsigned char> raw(static_cast<size_t>(w) * static_cast<size_t>(h));
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!f) throw IoError("pgm: truncated pixel data in " + path);
    for (size_t i = 0; i < raw.size(); ++i) img.pixels[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

Image resize_bilinear(const Image& img, int new_h, int new_w) {
    if (new_h <= 0 || new_w <= 0) throw DomainError("resize: non-positive target size");
    Image out = Image::filled(new_h, new_w, 1.0f);
    const double sy = static_cast<double>(img.height) / new_h;
    const double sx = static_cast<double>(img.width) / new_w;
    for (int y = 0; y < new_h; ++y)
        for (int x = 0; x < new_w; ++x) {
            const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int y0 = static_cast<int>(std::floor(fy));
            const int x0 = static_cast<int>(std::floor(fx));
            const int y1 = std::min(img.height - 1, y0 + 1);
            const int x1 = std::min(img.width - 1, x0 + 1);
            const double wy = fy - y0, wx = fx - x0;
            const double v = (1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                             wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
            out.at(y, x) = static_cast<float>(v);
        }
    return out;
}

Image rotate_bilinear(const Image& img, double radians, float fill) {
    Image out = Image::filled(img.height, img.width, fill);
    const double cy = (img.height - 1) / 2.0, cx = (img.width - 1) / 2.0;
    const double c = std::cos(radians), s = std::sin(radians);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            const double dy = y - cy, dx = x - cx;
            const double sy = c * dy + s * dx + cy;
            const double sx = -s * dy + c * dx + cx;
            if (sy < 0 || sy > img.height - 1 || sx < 0 || sx > img.width - 1) continue;
            const int y0 = static_cast<int>(std::floor(sy));
            const int x0 = static_cast<int>(std::floor(sx));
            const int y1 = std::min(img.height - 1, y0 + 1);
            const int x1 = std::min(img.width - 1, x0 + 1);
            const double wy = sy - y0, wx = sx - x0;
            const double v = (1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                             wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
            out.at(y, x) = static_cast<float>(v);
        }
    return out;
}

Tensor<float> image_to_tensor(const Image& img, float mean, float stddev) {
    if (stddev <= 0) throw DomainError("image_to_tensor: non-positive stddev");
    auto t = Tensor<float>::zeros({1, 1, img.height, img.width});
    for (size_t i = 0; i < img.pixels.size(); ++i) t.data()[i] = (img.pixels[i] - mean) / stddev;
    return t;
}

}  // namespace scriv
