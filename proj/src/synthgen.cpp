// SPDX-License-Identifier: Apache-2.0
#include "scriv/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scriv::synth {

std::string family_name(Family f) {
    switch (f) {
        case Family::paragraph: return "paragraph";
        case Family::mail: return "mail";
        case Family::nested: return "nested";
        case Family::margin: return "margin";
    }
    throw DomainError("family_name: bad family");
}

Family family_from(const std::string& name) {
    if (name == "paragraph") return Family::paragraph;
    if (name == "mail") return Family::mail;
    if (name == "nested") return Family::nested;
    if (name == "margin") return Family::margin;
    throw ConfigError("unknown layout family '" + name + "'");
}

std::vector<std::string> family_layout_classes(Family f) {
    switch (f) {
        case Family::paragraph: return {"paragraph"};
        case Family::mail:
            return {"sender", "recipient", "date_location", "subject", "opening", "body", "ps_attachment"};
        case Family::nested: return {"page_number", "section", "annotation", "body"};
        case Family::margin: return {"margin_a", "body", "margin_c"};
    }
    throw DomainError("family_layout_classes: bad family");
}

Corpus Corpus::load(const std::string& path) { return from_text(read_text_file(path)); }

Corpus Corpus::from_text(const std::string& text) {
    Corpus c;
    std::istringstream in(text);
    std::string word;
    while (in >> word) c.words_.push_back(word);
    if (c.words_.empty()) throw ConfigError("corpus: no words");
    return c;
}

std::vector<std::string> Corpus::excerpt(Rng& rng, size_t n, bool* wrapped) const {
    if (wrapped) *wrapped = false;
    std::vector<std::string> out;
    out.reserve(n);
    size_t pos = rng.below(words_.size());
    for (size_t i = 0; i < n; ++i) {
        out.push_back(words_[pos]);
        pos += 1;
        if (pos == words_.size()) {
            pos = 0;
            if (i + 1 < n && wrapped) *wrapped = true;
        }
    }
    return out;
}

Generator::Generator(Corpus corpus, FontPool pool, GenConfig config, const Annotator* annotator)
    : corpus_(std::move(corpus)), pool_(std::move(pool)), config_(config), annotator_(annotator) {}

namespace {

struct BlockShape {
    std::string cls;
    int parent = -1;
    double x, y, w;       // fraction of page
    int min_lines, max_lines;
    int words_per_line_hint;
    bool container = false;
};

// Fills `block.lines` with a contiguous excerpt: `lines` rows, words flowing
// left to right, total exactly `total_words` when positive.
void fill_block(PlannedBlock& block, const Corpus& corpus, const FontSpec& font, Rng& rng, int lines,
                int total_words, bool* wrapped) {
    const int words = total_words > 0 ? total_words : 0;
    std::vector<std::string> excerpt;
    if (words > 0) {
        excerpt = corpus.excerpt(rng, static_cast<size_t>(words), wrapped);
        // spread words over the lines as evenly as possible
        block.lines.assign(static_cast<size_t>(lines), "");
        int idx = 0;
        for (int l = 0; l < lines; ++l) {
            const int remaining_lines = lines - l;
            const int remaining_words = words - idx;
            const int take = (remaining_words + remaining_lines - 1) / remaining_lines;
            std::string line;
            for (int k = 0; k < take; ++k) {
                if (k) line += ' ';
                line += excerpt[static_cast<size_t>(idx++)];
            }
            block.lines[static_cast<size_t>(l)] = line;
        }
    } else {
        // width-driven fill: take words until the next one would overflow
        block.lines.clear();
        size_t pos = rng.below(corpus.words().size());
        for (int l = 0; l < lines; ++l) {
            std::string line = corpus.words()[pos];
            pos = (pos + 1) % corpus.words().size();
            while (true) {
                const std::string& next = corpus.words()[pos];
                if (measure_text(font, line + " " + next) > block.width) break;
                line += ' ';
                line += next;
                pos = (pos + 1) % corpus.words().size();
            }
            block.lines.push_back(line);
        }
    }
}

std::vector<BlockShape> family_shapes(Family family, Rng& rng) {
    switch (family) {
        case Family::paragraph: {
            const double left = rng.uniform(0.06, 0.14);
            return {{"paragraph", -1, left, rng.uniform(0.06, 0.12), 0.92 - left - 0.04, 1, 99, 0, false}};
        }
        case Family::mail: {
            std::vector<BlockShape> shapes;
            double y = 0.05;
            if (rng.bernoulli(0.9)) {
                shapes.push_back({"sender", -1, 0.06, y, 0.36, 2, 4, 3, false});
                y += 0.02;
            }
            if (rng.bernoulli(0.8)) shapes.push_back({"recipient", -1, 0.56, y, 0.36, 2, 3, 3, false});
            y += 0.14;
            if (rng.bernoulli(0.7)) {
                shapes.push_back({"date_location", -1, 0.50, y, 0.42, 1, 1, 4, false});
                y += 0.06;
            }
            if (rng.bernoulli(0.6)) {
                shapes.push_back({"subject", -1, 0.06, y, 0.6, 1, 1, 5, false});
                y += 0.06;
            }
            if (rng.bernoulli(0.6)) {
                shapes.push_back({"opening", -1, 0.06, y, 0.4, 1, 1, 2, false});
                y += 0.05;
            }
            shapes.push_back({"body", -1, 0.06, y, 0.86, 3, 10, 6, false});
            shapes.push_back({"ps_attachment", -1, 0.06, 0.88, 0.7, 1, 2, 4, false});
            if (shapes.back().y <= y + 0.1 || rng.bernoulli(0.4)) shapes.pop_back();
            return shapes;
        }
        case Family::nested: {
            std::vector<BlockShape> shapes;
            if (rng.bernoulli(0.8)) shapes.push_back({"page_number", -1, 0.82, 0.03, 0.12, 1, 1, 1, false});
            double y = 0.10;
            const int sections = 1 + static_cast<int>(rng.below(2));
            for (int s = 0; s < sections; ++s) {
                const int section_index = static_cast<int>(shapes.size());
                shapes.push_back({"section", -1, 0, y, 0, 0, 0, 0, true});
                const int annotations = 1 + static_cast<int>(rng.below(2));
                for (int a = 0; a < annotations; ++a) {
                    shapes.push_back({"annotation", section_index, 0.05, y, 0.22, 1, 2, 2, false});
                    y += 0.07;
                }
                shapes.push_back({"body", section_index, 0.32, y - 0.07 * annotations, 0.62, 2, 5, 5, false});
                y += 0.30;
            }
            return shapes;
        }
        case Family::margin: {
            std::vector<BlockShape> shapes;
            shapes.push_back({"margin_a", -1, 0.03, 0.06, 0.20, 1, 3, 2, false});
            shapes.push_back({"body", -1, 0.28, 0.05, 0.67, 3, 10, 6, false});
            if (rng.bernoulli(0.5)) shapes.push_back({"margin_c", -1, 0.03, 0.55, 0.20, 1, 2, 2, false});
            return shapes;
        }
    }
    throw DomainError("family_shapes: bad family");
}

}  // namespace

PagePlan Generator::draw_text(Rng& rng, int line_budget) const {
    if (line_budget < 1) throw ContractError("draw_text: line budget must be at least 1");
    PagePlan plan;
    plan.font = sample_font(rng, pool_);
    plan.font.size = config_.base_font_size * rng.uniform(0.9, 1.15);

    auto shapes = family_shapes(config_.family, rng);
    int remaining = std::min(line_budget, config_.l_max);
    const double pw = config_.page_width, ph = config_.page_height;
    std::vector<int> kept_index(shapes.size(), -1);
    for (size_t i = 0; i < shapes.size(); ++i) {
        const auto& shape = shapes[i];
        if (shape.container) {
            // keep containers only if a child will make it non-empty
            bool child_coming = false;
            for (size_t j = i + 1; j < shapes.size() && !child_coming; ++j)
                if (shapes[j].parent == static_cast<int>(i) && remaining > 0) child_coming = true;
            if (!child_coming) continue;
            PlannedBlock block;
            block.layout_class = shape.cls;
            block.container = true;
            block.parent = shape.parent >= 0 ? kept_index[static_cast<size_t>(shape.parent)] : -1;
            kept_index[i] = static_cast<int>(plan.blocks.size());
            plan.blocks.push_back(std::move(block));
            continue;
        }
        if (remaining <= 0) break;
        const int span = shape.max_lines - shape.min_lines;
        int lines = shape.min_lines + (span > 0 ? static_cast<int>(rng.below(static_cast<uint64_t>(span + 1))) : 0);
        lines = std::min(lines, remaining);
        if (lines <= 0) continue;
        PlannedBlock block;
        block.layout_class = shape.cls;
        block.parent = shape.parent >= 0 ? kept_index[static_cast<size_t>(shape.parent)] : -1;
        if (shape.parent >= 0 && block.parent < 0) continue;  // container was dropped
        block.x = shape.x * pw;
        block.y = shape.y * ph;
        block.width = shape.w * pw;
        if (config_.family == Family::mail && shape.words_per_line_hint > 0) {
            // mimic a sampled template block exactly: lines and total words
            block.target_lines = lines;
            block.target_words =
                lines * (shape.words_per_line_hint + static_cast<int>(rng.below(3)) - 1);
            block.target_words = std::max(block.target_words, lines);
            bool wrapped = false;
            fill_block(block, corpus_, plan.font, rng, lines, block.target_words, &wrapped);
            plan.corpus_wrapped = plan.corpus_wrapped || wrapped;
        } else {
            bool wrapped = false;
            fill_block(block, corpus_, plan.font, rng, lines, 0, &wrapped);
            plan.corpus_wrapped = plan.corpus_wrapped || wrapped;
        }
        remaining -= lines;
        kept_index[i] = static_cast<int>(plan.blocks.size());
        plan.blocks.push_back(std::move(block));
    }
    // drop trailing childless containers (possible when the budget ran out)
    while (!plan.blocks.empty() && plan.blocks.back().container) plan.blocks.pop_back();
    if (plan.blocks.empty()) throw GenerationError("draw_text: no block fit the line budget");
    return plan;
}

namespace {

// Shrinks the font until every line fits its block width.
void fit_font(PagePlan& plan) {
    double worst = 1.0;
    for (const auto& block : plan.blocks) {
        if (block.container) continue;
        for (const auto& line : block.lines) {
            const double w = measure_text(plan.font, line);
            if (w > block.width && block.width > 0) worst = std::min(worst, block.width / w);
        }
    }
    if (worst < 1.0) plan.font.size = std::max(7.0, plan.font.size * worst * 0.98);
}

}  // namespace

SynthSample Generator::page_with_budget(uint64_t index, int line_budget) const {
    Rng base(config_.seed);
    for (int attempt = 0; attempt <= config_.retry_budget; ++attempt) {
        Rng rng = base.fork(index * 131 + static_cast<uint64_t>(attempt));
        PagePlan plan = draw_text(rng, line_budget);
        fit_font(plan);

        // fonts below the floor would be unreadable; re-plan with fewer words
        if (plan.font.size < 7.5 && attempt < config_.retry_budget) continue;

        Image canvas = Image::filled(config_.page_height, config_.page_width, 1.0f);
        const double step = line_height(plan.font) * 1.18;
        double last_ink = 0;
        bool overflow = false;
        Document label;
        struct Placed {
            double x0, x1, bottom;
        };
        std::vector<Placed> placed;
        for (auto& block : plan.blocks) {
            Block b;
            b.layout_class = block.layout_class;
            b.parent = block.parent;
            if (!block.container) {
                // push the block below any earlier block sharing its column
                double top = block.y;
                for (const auto& p : placed)
                    if (block.x < p.x1 && block.x + block.width > p.x0)
                        top = std::max(top, p.bottom + 4.0);
                double baseline = top + font_ascent(plan.font);
                for (const auto& line : block.lines) {
                    if (baseline + font_descent(plan.font) >= config_.page_height) {
                        overflow = true;
                        break;
                    }
                    draw_text_line(canvas, plan.font, line, block.x, baseline, rng);
                    last_ink = std::max(last_ink, baseline + font_descent(plan.font));
                    baseline += step;
                }
                placed.push_back({block.x, block.x + block.width, baseline - step + font_descent(plan.font)});
                b.lines = block.lines;
            }
            label.blocks.push_back(std::move(b));
            if (overflow) break;
        }
        if (overflow) {
            if (attempt < config_.retry_budget) continue;
            throw GenerationError("render_page: text overflows the page after " +
                                  std::to_string(config_.retry_budget) + " retries");
        }

        if (config_.with_entities && annotator_ && config_.family != Family::margin) {
            for (size_t b = 0; b < label.blocks.size(); ++b) {
                if (label.blocks[b].lines.empty()) continue;
                for (const auto& span : annotator_->annotate(label.block_text(static_cast<int>(b))))
                    label.entities.push_back({span.category, static_cast<int>(b), span.begin, span.end});
            }
        }
        label.validate();

        // crop just below the last written line
        const int crop_h = std::max(32, std::min(config_.page_height,
                                                 static_cast<int>(std::ceil(last_ink + 6))));
        canvas.pixels.resize(static_cast<size_t>(crop_h) * static_cast<size_t>(canvas.width));
        canvas.height = crop_h;
        canvas = augment(canvas, rng, config_.augment_policy);

        SynthSample sample;
        sample.image = std::move(canvas);
        sample.label = std::move(label);
        sample.family = config_.family;
        sample.seed = config_.seed;
        sample.line_count = static_cast<int>(sample.label.line_count());
        sample.font_style = plan.font.style;
        return sample;
    }
    throw GenerationError("render_page: retry budget exhausted");
}

SynthSample Generator::page(uint64_t index) const { return page_with_budget(index, config_.l_max); }

Image render_line_image(const FontSpec& font, const std::string& text, Rng& rng) {
    if (text.empty()) throw ContractError("render_line: lines are non-empty by contract");
    const auto cps = utf8_decode(text);
    int64_t repeats = 0;
    for (size_t i = 1; i < cps.size(); ++i)
        if (cps[i] == cps[i - 1]) ++repeats;
    const double measured = measure_text(font, text);
    // widen when needed so width/8 frames can always emit the characters
    const int min_ctc_width = static_cast<int>(8 * (static_cast<int64_t>(cps.size()) + repeats + 2));
    const int width = std::max({static_cast<int>(std::ceil(measured)) + 24, min_ctc_width, 16});
    const int height = std::max(36, static_cast<int>(std::ceil(line_height(font))) + 12);
    Image canvas = Image::filled(height, width, 1.0f);
    draw_text_line(canvas, font, text, 12, 6 + font_ascent(font), rng);
    return canvas;
}

std::pair<Image, std::string> Generator::line(uint64_t index) const {
    Rng rng = Rng(config_.seed).fork(0x11BE5 ^ (index * 977));
    FontSpec font = sample_font(rng, pool_);
    font.size = config_.base_font_size * rng.uniform(0.9, 1.1);
    const size_t words = 2 + rng.below(3);
    bool wrapped = false;
    auto excerpt = corpus_.excerpt(rng, words, &wrapped);
    std::string text;
    for (const auto& w : excerpt) {
        if (!text.empty()) text += ' ';
        text += w;
    }
    // cap so desk CTC targets stay short
    auto cps = utf8_decode(text);
    if (static_cast<int>(cps.size()) > config_.line_max_chars) {
        cps.resize(static_cast<size_t>(config_.line_max_chars));
        while (!cps.empty() && cps.back() == U' ') cps.pop_back();
        text = utf8_encode(cps);
    }
    return {render_line_image(font, text, rng), text};
}

}  // namespace scriv::synth
