// SPDX-License-Identifier: Apache-2.0
//
// Glyph rendering: a built-in parametric stroke font (polyline skeletons with
// slant/thickness/jitter) as the hermetic default, plus a loader for external
// raster fonts. Size normalization makes different fonts render a fixed test
// phrase at comparable widths.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "scriv/image.hpp"

namespace scriv {

enum class FontStyle { handwritten, printed };

struct GlyphStrokes {
    double advance = 6;  // em units, 10 units = cap height
    std::vector<std::vector<std::pair<double, double>>> strokes;
};

// nullptr when the code point has no built-in glyph (renderer draws a box).
const GlyphStrokes* find_glyph(char32_t cp);

struct RasterGlyph {
    Image image;       // ink on white
    double advance = 0;  // px at source size
    int baseline = 0;    // row of the baseline in image
};

struct RasterFont {
    std::map<char32_t, RasterGlyph> glyphs;
    double source_size = 32;  // nominal px the glyphs were drawn at
    // Directory layout: font.tsv lines `hexcp<TAB>advance<TAB>baseline<TAB>file.pgm`
    // plus a `size` header line.
    static RasterFont load(const std::string& dir);
};

struct FontSpec {
    int glyph_variant = 0;  // deterministic per-font letterform warp
    FontStyle style = FontStyle::handwritten;
    double size = 24;          // nominal pixel size (cap height)
    double slant = 0;          // radians, positive leans right
    double thickness = 1.4;    // stroke radius in px at size 24
    double jitter = 0;         // per-vertex displacement amplitude (px)
    double spacing = 1.0;      // advance multiplier
    double normalization = 1.0;  // multiplies size when rendering
    std::string raster_dir;      // non-empty: use the external raster font
};

// Width of `text` in px when rendered with `font` (jitter-free).
double measure_text(const FontSpec& font, const std::string& text);
double font_ascent(const FontSpec& font);
double font_descent(const FontSpec& font);
double line_height(const FontSpec& font);

// Draws one line with its baseline at `baseline_y`; jitter/slant consume rng.
void draw_text_line(Image& canvas, const FontSpec& font, const std::string& text, double x,
                    double baseline_y, Rng& rng);

// Reference phrase and width for size normalization.
extern const char* kNormalizationPhrase;
constexpr double kNormalizationWidth = 420.0;

// factor = reference_width / measured_width at nominal size; rendering then
// multiplies size by the factor.
FontSpec normalize_font(FontSpec font);

struct FontPool {
    std::vector<FontSpec> handwritten;
    std::vector<FontSpec> printed;
    static FontPool builtin();
};

// Style drawn 80/20 handwritten/printed, parameters jittered.
FontSpec sample_font(Rng& rng, const FontPool& pool);

}  // namespace scriv
