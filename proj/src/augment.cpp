// SPDX-License-Identifier: Apache-2.0
#include "scriv/augment.hpp"

#include <algorithm>
#include <cmath>

namespace scriv {

namespace {

Image elastic(const Image& img, Rng& rng, double amplitude) {
    // coarse displacement grid, bilinearly interpolated per pixel
    const int gh = std::max(2, img.height / 24), gw = std::max(2, img.width / 24);
    std::vector<float> dy(static_cast<size_t>(gh) * gw), dx(static_cast<size_t>(gh) * gw);
    for (auto& v : dy) v = static_cast<float>(rng.normal() * amplitude);
    for (auto& v : dx) v = static_cast<float>(rng.normal() * amplitude);
    auto grid = [&](const std::vector<float>& g, double y, double x) {
        const double fy = y / img.height * (gh - 1), fx = x / img.width * (gw - 1);
        const int y0 = std::min(gh - 2, static_cast<int>(fy)), x0 = std::min(gw - 2, static_cast<int>(fx));
        const double wy = fy - y0, wx = fx - x0;
        return (1 - wy) * ((1 - wx) * g[static_cast<size_t>(y0 * gw + x0)] +
                           wx * g[static_cast<size_t>(y0 * gw + x0 + 1)]) +
               wy * ((1 - wx) * g[static_cast<size_t>((y0 + 1) * gw + x0)] +
                     wx * g[static_cast<size_t>((y0 + 1) * gw + x0 + 1)]);
    };
    Image out = Image::filled(img.height, img.width, 1.0f);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double sy = std::clamp(y + grid(dy, y, x), 0.0, static_cast<double>(img.height - 1));
            const double sx = std::clamp(x + grid(dx, y, x), 0.0, static_cast<double>(img.width - 1));
            const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
            const int y1 = std::min(img.height - 1, y0 + 1), x1 = std::min(img.width - 1, x0 + 1);
            const double wy = sy - y0, wx = sx - x0;
            out.at(y, x) = static_cast<float>((1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                                              wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1)));
        }
    return out;
}

Image morph(const Image& img, bool thicken) {
    // 3x3 min (thicken ink) or max (thin ink)
    Image out = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float v = img.at(y, x);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width) continue;
                    v = thicken ? std::min(v, img.at(yy, xx)) : std::max(v, img.at(yy, xx));
                }
            out.at(y, x) = v;
        }
    return out;
}

}  // namespace

Image augment(const Image& image, Rng& rng, const AugmentPolicy& policy) {
    if (!policy.enabled) return image;
    Image out = image;
    if (rng.bernoulli(policy.p_resolution)) {
        const double f = rng.uniform(policy.min_scale, 1.0);
        const int h = std::max(8, static_cast<int>(std::lround(out.height * f)));
        const int w = std::max(8, static_cast<int>(std::lround(out.width * f)));
        out = resize_bilinear(out, h, w);
    }
    if (rng.bernoulli(policy.p_elastic)) out = elastic(out, rng, policy.elastic_amplitude);
    if (rng.bernoulli(policy.p_rotate)) {
        const double deg = rng.uniform(-policy.max_rotate_deg, policy.max_rotate_deg);
        out = rotate_bilinear(out, deg * 3.14159265358979323846 / 180.0, 1.0f);
    }
    if (rng.bernoulli(policy.p_morph)) out = morph(out, rng.bernoulli(0.5));
    if (rng.bernoulli(policy.p_brightness)) {
        const double gain = 1.0 + rng.uniform(-policy.max_contrast, policy.max_contrast);
        const double bias = rng.uniform(-policy.max_brightness, policy.max_brightness);
        for (auto& p : out.pixels)
            p = static_cast<float>(std::clamp(0.5 + gain * (p - 0.5) + bias, 0.0, 1.0));
    }
    for (auto& p : out.pixels) p = std::clamp(p, 0.0f, 1.0f);
    return out;
}

}  // namespace scriv
