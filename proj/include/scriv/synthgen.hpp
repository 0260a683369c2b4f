// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic page/line generation: layout templates for the
// four document families, corpus-driven text with line continuity, optional
// NE annotation, and curriculum-aware cropping. Worker k and sample i derive
// independent streams from the base seed, so output never depends on
// generation order.
#pragma once

#include <optional>

#include "scriv/annotate.hpp"
#include "scriv/augment.hpp"
#include "scriv/document.hpp"
#include "scriv/font.hpp"

namespace scriv::synth {

enum class Family { paragraph, mail, nested, margin };

std::string family_name(Family f);
Family family_from(const std::string& name);
// Layout classes a family's labels can use (for vocabulary construction).
std::vector<std::string> family_layout_classes(Family f);

class Corpus {
public:
    static Corpus load(const std::string& path);
    static Corpus from_text(const std::string& text);
    const std::vector<std::string>& words() const { return words_; }
    // Contiguous excerpt of n words starting at a random position; wraps
    // around when the corpus is shorter than the request.
    std::vector<std::string> excerpt(Rng& rng, size_t n, bool* wrapped = nullptr) const;

private:
    std::vector<std::string> words_;
};

struct GenConfig {
    Family family = Family::paragraph;
    int l_max = 15;
    int page_width = 480;
    int page_height = 640;
    double base_font_size = 18.0;
    bool with_entities = false;  // margin family labels stay HTR-only
    AugmentPolicy augment_policy = AugmentPolicy::disabled();
    uint64_t seed = 0;
    int retry_budget = 3;
    int line_max_chars = 26;  // render_line text cap
};

// One planned block: where it goes, what it says.
struct PlannedBlock {
    std::string layout_class;
    int parent = -1;
    std::vector<std::string> lines;
    double x = 0, y = 0, width = 0;  // text origin and wrap width (px)
    int target_lines = 0;            // mail family: sampled template target
    int target_words = 0;
    bool container = false;
};

struct PagePlan {
    std::vector<PlannedBlock> blocks;
    FontSpec font;
    bool corpus_wrapped = false;
};

struct SynthSample {
    Image image;
    Document label;
    Family family = Family::paragraph;
    uint64_t seed = 0;
    int line_count = 0;
    FontStyle font_style = FontStyle::handwritten;
};

class Generator {
public:
    Generator(Corpus corpus, FontPool pool, GenConfig config, const Annotator* annotator = nullptr);

    // Text planning only (structured text per block, geometry attached).
    PagePlan draw_text(Rng& rng, int line_budget) const;
    // Full sample for index i at the configured l_max.
    SynthSample page(uint64_t index) const;
    // Curriculum entry point: line budget capped by the caller.
    SynthSample page_with_budget(uint64_t index, int line_budget) const;
    // Single rendered line for encoder pretraining: (image, text).
    std::pair<Image, std::string> line(uint64_t index) const;

    const GenConfig& config() const { return config_; }
    const Corpus& corpus() const { return corpus_; }

private:
    Corpus corpus_;
    FontPool pool_;
    GenConfig config_;
    const Annotator* annotator_;
};

// Renders one text line onto a fitted canvas; the canvas is widened when
// needed so a CTC alignment at width/8 frames always exists.
Image render_line_image(const FontSpec& font, const std::string& text, Rng& rng);

}  // namespace scriv::synth
