// SPDX-License-Identifier: Apache-2.0
//
// Single-channel float raster in [0, 1] (1 = paper, 0 = ink) with PGM I/O
// and the resampling helpers the generator and augmenter need.
#pragma once

#include <string>
#include <vector>

#include "scriv/tensor.hpp"

namespace scriv {

struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> pixels;  // row-major

    static Image filled(int h, int w, float v) {
        Image img;
        img.height = h;
        img.width = w;
        img.pixels.assign(static_cast<size_t>(h) * static_cast<size_t>(w), v);
        return img;
    }
    float& at(int y, int x) { return pixels[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)]; }
    float at(int y, int x) const {
        return pixels[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)];
    }
    bool empty() const { return pixels.empty(); }
};

// Binary 8-bit PGM (P5).
Image load_pgm(const std::string& path);
void save_pgm(const Image& img, const std::string& path);
std::string pgm_bytes(const Image& img);

Image resize_bilinear(const Image& img, int new_h, int new_w);
// Rotation about the image center, same canvas, background fill.
Image rotate_bilinear(const Image& img, double radians, float fill);

// 1x1xHxW tensor, (pixel - mean) / stddev.
Tensor<float> image_to_tensor(const Image& img, float mean, float stddev);

// Running mean/stddev over a set of images (dataset normalization stats).
struct PixelStats {
    double sum = 0, sum_sq = 0;
    int64_t count = 0;
    void add(const Image& img) {
        for (float p : img.pixels) {
            sum += p;
            sum_sq += static_cast<double>(p) * p;
        }
        count += static_cast<int64_t>(img.pixels.size());
    }
    float mean() const { return count ? static_cast<float>(sum / static_cast<double>(count)) : 0.f; }
    float stddev() const {
        if (!count) return 1.f;
        const double m = sum / static_cast<double>(count);
        const double var = sum_sq / static_cast<double>(count) - m * m;
        return static_cast<float>(var > 1e-12 ? std::sqrt(var) : 1.0);
    }
};

}  // namespace scriv
