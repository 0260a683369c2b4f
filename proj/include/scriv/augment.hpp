// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scriv/image.hpp"

namespace scriv {

// Randomized photometric/geometric jitter applied to training images. Every
// transform is individually toggleable; a disabled policy is the identity.
struct AugmentPolicy {
    bool enabled = true;
    double p_resolution = 0.25;  // downscale-upscale; the only shape-changing one
    double p_elastic = 0.25;
    double p_brightness = 0.4;
    double p_morph = 0.2;
    double p_rotate = 0.25;
    double min_scale = 0.75;
    double max_rotate_deg = 3.0;
    double max_brightness = 0.12;
    double max_contrast = 0.25;
    double elastic_amplitude = 1.5;  // px

    static AugmentPolicy disabled() {
        AugmentPolicy p;
        p.enabled = false;
        return p;
    }
};

Image augment(const Image& image, Rng& rng, const AugmentPolicy& policy);

}  // namespace scriv
