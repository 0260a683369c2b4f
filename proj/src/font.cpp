// SPDX-License-Identifier: Apache-2.0
#include "scriv/font.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scriv {

const char* kNormalizationPhrase = "the quick brown fox jumps over the lazy dog";

namespace {

constexpr double kEm = 10.0;  // glyph grid units per cap height

// Unknown glyphs draw as a box so rendering is total over Unicode.
const GlyphStrokes& box_glyph() {
    static const GlyphStrokes g{6.0, {{{0.8, 0}, {0.8, 7}, {5.2, 7}, {5.2, 0}, {0.8, 0}}}};
    return g;
}

const GlyphStrokes& glyph_or_box(char32_t cp) {
    const GlyphStrokes* g = find_glyph(cp);
    return g ? *g : box_glyph();
}

double px_scale(const FontSpec& font) { return font.size * font.normalization / kEm; }

// Deterministic per-variant letterform warp: each glyph vertex shifts by a
// small hash-derived offset, so variants look like distinct hands.
std::pair<double, double> variant_offset(int variant, char32_t cp, size_t stroke, size_t vertex) {
    if (variant == 0) return {0.0, 0.0};
    uint64_t h = Rng::mix64((static_cast<uint64_t>(variant) << 40) ^ (static_cast<uint64_t>(cp) << 16) ^
                            (stroke << 8) ^ vertex);
    const double dx = (static_cast<double>(h & 0xFFFF) / 65535.0 - 0.5) * 0.9;
    const double dy = (static_cast<double>((h >> 16) & 0xFFFF) / 65535.0 - 0.5) * 0.9;
    return {dx, dy};
}

void stamp(Image& canvas, double cx, double cy, double radius, float ink) {
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius - 1)));
    const int y1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(cy + radius + 1)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius - 1)));
    const int x1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(cx + radius + 1)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double d = std::hypot(x - cx, y - cy);
            // soft 1px falloff at the stroke edge
            const double cover = std::clamp(radius + 0.6 - d, 0.0, 1.0);
            if (cover <= 0) continue;
            const float v = 1.0f - static_cast<float>(cover) * (1.0f - ink);
            canvas.at(y, x) = std::min(canvas.at(y, x), v);
        }
}

void draw_segment(Image& canvas, double x0, double y0, double x1, double y1, double radius, float ink) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        stamp(canvas, x0 + t * (x1 - x0), y0 + t * (y1 - y0), radius, ink);
    }
}

void draw_raster_glyph(Image& canvas, const RasterGlyph& glyph, double scale, double pen_x,
                       double baseline_y) {
    const int h = std::max(1, static_cast<int>(std::lround(glyph.image.height * scale)));
    const int w = std::max(1, static_cast<int>(std::lround(glyph.image.width * scale)));
    const Image scaled = resize_bilinear(glyph.image, h, w);
    const int top = static_cast<int>(std::lround(baseline_y - glyph.baseline * scale));
    for (int y = 0; y < h; ++y) {
        const int cy = top + y;
        if (cy < 0 || cy >= canvas.height) continue;
        for (int x = 0; x < w; ++x) {
            const int cx = static_cast<int>(std::lround(pen_x)) + x;
            if (cx < 0 || cx >= canvas.width) continue;
            canvas.at(cy, cx) = std::min(canvas.at(cy, cx), scaled.at(y, x));
        }
    }
}

}  // namespace

RasterFont RasterFont::load(const std::string& dir) {
    RasterFont font;
    std::istringstream in(read_text_file(dir + "/font.tsv"));
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, '\t');
        if (parts.size() == 2 && parts[0] == "size") {
            font.source_size = std::stod(parts[1]);
            continue;
        }
        if (parts.size() != 4)
            throw IoError("raster font: expected hexcp<TAB>advance<TAB>baseline<TAB>file, got '" + line +
                          "'");
        RasterGlyph g;
        const auto cp = static_cast<char32_t>(std::stoul(parts[0], nullptr, 16));
        g.advance = std::stod(parts[1]);
        g.baseline = std::stoi(parts[2]);
        g.image = load_pgm(dir + "/" + parts[3]);
        font.glyphs.emplace(cp, std::move(g));
    }
    if (font.glyphs.empty()) throw FontError("raster font: no glyphs in " + dir);
    return font;
}

namespace {
const RasterFont& cached_raster(const std::string& dir) {
    static std::map<std::string, RasterFont> cache;
    auto it = cache.find(dir);
    if (it == cache.end()) it = cache.emplace(dir, RasterFont::load(dir)).first;
    return it->second;
}
}  // namespace

double measure_text(const FontSpec& font, const std::string& text) {
    double w = 0;
    if (!font.raster_dir.empty()) {
        const RasterFont& rf = cached_raster(font.raster_dir);
        const double scale = font.size * font.normalization / rf.source_size;
        for (char32_t cp : utf8_decode(text)) {
            auto it = rf.glyphs.find(cp);
            const double adv = it == rf.glyphs.end() ? rf.source_size * 0.6 : it->second.advance;
            w += adv * scale * font.spacing;
        }
        return w;
    }
    const double s = px_scale(font);
    for (char32_t cp : utf8_decode(text)) w += (glyph_or_box(cp).advance + 1.2) * s * font.spacing;
    return w;
}

double font_ascent(const FontSpec& font) { return 11.5 * px_scale(font); }
double font_descent(const FontSpec& font) { return 3.5 * px_scale(font); }
double line_height(const FontSpec& font) { return font_ascent(font) + font_descent(font); }

void draw_text_line(Image& canvas, const FontSpec& font, const std::string& text, double x,
                    double baseline_y, Rng& rng) {
    if (!font.raster_dir.empty()) {
        const RasterFont& rf = cached_raster(font.raster_dir);
        const double scale = font.size * font.normalization / rf.source_size;
        double pen = x;
        for (char32_t cp : utf8_decode(text)) {
            auto it = rf.glyphs.find(cp);
            if (it != rf.glyphs.end()) draw_raster_glyph(canvas, it->second, scale, pen, baseline_y);
            const double adv = it == rf.glyphs.end() ? rf.source_size * 0.6 : it->second.advance;
            pen += adv * scale * font.spacing;
        }
        return;
    }
    const double s = px_scale(font);
    const double radius = font.thickness * font.size / 24.0;
    double pen = x;
    for (char32_t cp : utf8_decode(text)) {
        const GlyphStrokes& glyph = glyph_or_box(cp);
        if (cp != U' ') {
            const double base_jitter_y = font.jitter > 0 ? rng.normal() * font.jitter * 0.7 : 0.0;
            size_t stroke_idx = 0;
            for (const auto& stroke : glyph.strokes) {
                double px = 0, py = 0;
                bool first = true;
                for (size_t v = 0; v < stroke.size(); ++v) {
                    auto [wx, wy] = variant_offset(font.glyph_variant, cp, stroke_idx, v);
                    const double gx = stroke[v].first + wx;
                    const double gy = stroke[v].second + wy;
                    const double jx = font.jitter > 0 ? rng.normal() * font.jitter * 0.35 : 0.0;
                    const double jy = font.jitter > 0 ? rng.normal() * font.jitter * 0.35 : 0.0;
                    const double cx = pen + (gx + font.slant * gy) * s + jx;
                    const double cy = baseline_y - gy * s + jy + base_jitter_y;
                    if (!first) draw_segment(canvas, px, py, cx, cy, radius, 0.05f);
                    px = cx;
                    py = cy;
                    first = false;
                }
                ++stroke_idx;
            }
        }
        pen += (glyph.advance + 1.2) * s * font.spacing;
    }
}

FontSpec normalize_font(FontSpec font) {
    FontSpec probe = font;
    probe.normalization = 1.0;
    const double measured = measure_text(probe, kNormalizationPhrase);
    if (measured <= 0) throw FontError("normalize_font: zero measured width");
    font.normalization = kNormalizationWidth * (font.size / 24.0) / measured;
    return font;
}

FontPool FontPool::builtin() {
    FontPool pool;
    for (int variant = 1; variant <= 5; ++variant) {
        FontSpec f;
        f.glyph_variant = variant;
        f.style = FontStyle::handwritten;
        f.slant = 0.10 + 0.06 * variant;
        f.thickness = 1.1 + 0.22 * (variant % 3);
        f.jitter = 0.5 + 0.25 * (variant % 4);
        f.spacing = 0.95 + 0.03 * (variant % 3);
        pool.handwritten.push_back(normalize_font(f));
    }
    for (int variant = 0; variant <= 1; ++variant) {
        FontSpec f;
        f.glyph_variant = variant == 0 ? 0 : 6;
        f.style = FontStyle::printed;
        f.slant = 0.0;
        f.thickness = 1.0 + 0.3 * variant;
        f.jitter = 0.0;
        pool.printed.push_back(normalize_font(f));
    }
    return pool;
}

FontSpec sample_font(Rng& rng, const FontPool& pool) {
    if (pool.handwritten.empty() || pool.printed.empty())
        throw ConfigError("sample_font: pool needs at least one font of each style");
    const bool handwritten = rng.bernoulli(0.8);
    const auto& list = handwritten ? pool.handwritten : pool.printed;
    FontSpec f = list[static_cast<size_t>(rng.index(list.size()))];
    f.size *= rng.uniform(0.85, 1.25);
    if (handwritten) {
        f.slant += rng.uniform(-0.05, 0.05);
        f.jitter *= rng.uniform(0.7, 1.3);
        f.thickness *= rng.uniform(0.85, 1.2);
    }
    return f;
}

}  // namespace scriv
