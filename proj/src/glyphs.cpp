// SPDX-License-Identifier: Apache-2.0
//
// Built-in stroke glyphs. Coordinates are polyline skeletons on an em grid:
// baseline y=0, cap height 10, x-height 7, descender -3. Format per glyph:
// "advance|x,y x,y ...|x,y ..." with '|' separating strokes.
#include <map>
#include <sstream>

#include "scriv/font.hpp"

namespace scriv {

namespace {

struct GlyphDef {
    char32_t cp;
    const char* def;
};

const GlyphDef kGlyphDefs[] = {
    {U' ', "3.5"},
    {U'A', "8|0,0 3.5,10 7,0|1.4,4 5.6,4"},
    {U'B', "7|0,0 0,10|0,10 4,10 5,8.7 5,6.8 4,5.5 0,5.5|0,5.5 4.3,5.5 5.5,4 5.5,1.7 4.3,0 0,0"},
    {U'C', "7|6,8.5 4.5,10 2,10 0.5,8.5 0,6 0,4 0.5,1.5 2,0 4.5,0 6,1.5"},
    {U'D', "7.5|0,0 0,10|0,10 3.5,10 5.5,8 6,5 5.5,2 3.5,0 0,0"},
    {U'E', "7|6,0 0,0 0,10 6,10|0,5.5 4.5,5.5"},
    {U'F', "6.5|0,0 0,10 6,10|0,5.5 4.5,5.5"},
    {U'G', "7.5|6,8.5 4.5,10 2,10 0.5,8.5 0,6 0,4 0.5,1.5 2,0 4.5,0 6,1 6,4 3.8,4"},
    {U'H', "7.5|0,0 0,10|6,0 6,10|0,5 6,5"},
    {U'I', "4.5|1.5,0 1.5,10|0,10 3,10|0,0 3,0"},
    {U'J', "5.5|4,10 4,2 3,0.3 1.5,0 0.3,1 0,2.5"},
    {U'K', "7|0,0 0,10|5.5,10 0,4.5|2.2,6.3 6,0"},
    {U'L', "6.5|0,10 0,0 5.5,0"},
    {U'M', "9.5|0,0 0,10 4,3 8,10 8,0"},
    {U'N', "8|0,0 0,10 6.5,0 6.5,10"},
    {U'O', "7.5|2,10 4,10 5.7,8.5 6.2,5.5 5.7,2 4,0 2,0 0.5,2 0,5.5 0.5,8.5 2,10"},
    {U'P', "6.8|0,0 0,10 4.3,10 5.5,8.7 5.5,6.5 4.3,5.2 0,5.2"},
    {U'Q', "7.5|2,10 4,10 5.7,8.5 6.2,5.5 5.7,2 4,0 2,0 0.5,2 0,5.5 0.5,8.5 2,10|4,2 6.5,-0.8"},
    {U'R', "7.2|0,0 0,10 4.3,10 5.5,8.7 5.5,6.5 4.3,5.2 0,5.2|2.5,5.2 6,0"},
    {U'S', "7|5.7,8.6 4.3,10 1.8,10 0.4,8.6 0.4,7 1.8,5.7 4.2,5 5.6,3.7 5.6,1.6 4.2,0 1.7,0 0.2,1.5"},
    {U'T', "7|3,0 3,10|0,10 6,10"},
    {U'U', "7.5|0,10 0,2.5 1.5,0 4.5,0 6,2.5 6,10"},
    {U'V', "8|0,10 3.5,0 7,10"},
    {U'W', "10|0,10 2.2,0 4.5,7 6.8,0 9,10"},
    {U'X', "7|0,0 6,10|0,10 6,0"},
    {U'Y', "7|0,10 3,4.5 6,10|3,4.5 3,0"},
    {U'Z', "7|0,10 6,10 0,0 6,0"},
    {U'a', "6.3|5,7 5,0|5,5.5 3.8,7 1.8,7 0.4,5.6 0,3.8 0.4,1.4 1.8,0 3.8,0 5,1.4"},
    {U'b', "6.3|0,10.5 0,0|0,5.4 1.3,7 3.3,7 4.8,5.5 5.2,3.6 4.8,1.5 3.3,0 1.3,0 0,1.5"},
    {U'c', "5.8|5,5.7 3.7,7 1.7,7 0.4,5.6 0,3.6 0.4,1.5 1.7,0 3.7,0 5,1.3"},
    {U'd', "6.3|5.2,10.5 5.2,0|5.2,5.4 3.9,7 1.9,7 0.4,5.5 0,3.6 0.4,1.5 1.9,0 3.9,0 5.2,1.5"},
    {U'e', "6|0.2,3.8 5,3.8 5,5.3 3.8,7 1.8,7 0.4,5.5 0,3.6 0.4,1.4 1.8,0 3.9,0 5,1.2"},
    {U'f', "4.3|1.5,0 1.5,8.7 2.6,10.3 4,10.3|0,7 3.6,7"},
    {U'g', "6.3|5.2,7 5.2,-1 4.3,-2.7 2.3,-3 0.8,-2.4|5.2,5.4 3.9,7 1.9,7 0.4,5.5 0,3.7 0.4,1.8 1.9,0.3 "
           "3.9,0.3 5.2,1.7"},
    {U'h', "6|0,10.5 0,0|0,5.3 1.4,7 3.4,7 4.8,5.4 4.8,0"},
    {U'i', "2.2|0.6,0 0.6,7|0.5,8.9 0.7,9.3"},
    {U'j', "2.8|1.4,7 1.4,-1.2 0.6,-2.8 -0.4,-3|1.3,8.9 1.5,9.3"},
    {U'k', "5.5|0,10.5 0,0|4.3,7 0,2.8|1.7,4.4 4.8,0"},
    {U'l', "2.2|0.6,0 0.6,10.5"},
    {U'm', "8.8|0,7 0,0|0,5.4 1.2,7 2.7,7 3.8,5.4 3.8,0|3.8,5.4 5,7 6.5,7 7.6,5.4 7.6,0"},
    {U'n', "6|0,7 0,0|0,5.3 1.4,7 3.4,7 4.8,5.4 4.8,0"},
    {U'o', "6.5|1.8,7 3.7,7 5,5.5 5.4,3.6 5,1.5 3.7,0 1.8,0 0.4,1.5 0,3.6 0.4,5.5 1.8,7"},
    {U'p', "6.3|0,7 0,-3|0,5.4 1.3,7 3.3,7 4.8,5.5 5.2,3.6 4.8,1.5 3.3,0 1.3,0 0,1.5"},
    {U'q', "6.3|5.2,7 5.2,-3|5.2,5.4 3.9,7 1.9,7 0.4,5.5 0,3.6 0.4,1.5 1.9,0 3.9,0 5.2,1.5"},
    {U'r', "4.3|0,7 0,0|0,5 1.2,6.7 2.8,7 3.8,6.6"},
    {U's', "5.2|4.4,5.9 3.3,7 1.3,7 0.3,5.9 0.3,5 1.3,4 3.2,3.4 4.3,2.4 4.3,1.2 3.3,0 1.2,0 0,1.1"},
    {U't', "4.3|1.5,10 1.5,1.4 2.4,0 3.8,0.3|0,7 3.6,7"},
    {U'u', "6|0,7 0,1.6 1.4,0 3.4,0 4.8,1.6|4.8,7 4.8,0"},
    {U'v', "5.8|0,7 2.6,0 5.2,7"},
    {U'w', "7.8|0,7 1.7,0 3.5,5 5.3,0 7,7"},
    {U'x', "5.5|0,0 4.8,7|0,7 4.8,0"},
    {U'y', "5.8|0,7 2.6,0.3|5.2,7 2,-3 0.7,-3"},
    {U'z', "5.2|0,7 4.6,7 0,0 4.6,0"},
    {U'0', "6.5|1.7,10 3.3,10 4.6,8.3 5,5 4.6,1.7 3.3,0 1.7,0 0.4,1.7 0,5 0.4,8.3 1.7,10"},
    {U'1', "6.5|1,7.8 3,10 3,0|1.2,0 4.8,0"},
    {U'2', "6.5|0.3,8.3 1.5,10 3.8,10 5,8.4 5,6.8 3.9,5 0,0 5.2,0"},
    {U'3', "6.5|0.4,9 1.7,10 3.8,10 5,8.6 5,7 3.7,5.5 2,5.5|2,5.5 3.9,5.5 5.2,4 5.2,1.8 3.9,0 1.6,0 "
           "0.2,1.2"},
    {U'4', "6.5|3.8,0 3.8,10 0,3 5.5,3"},
    {U'5', "6.5|4.8,10 0.8,10 0.5,5.6 2.4,6.4 3.9,6.2 5.2,4.7 5.2,2 3.9,0 1.5,0 0.2,1.3"},
    {U'6', "6.5|4.7,8.7 3.4,10 1.9,10 0.5,8.3 0,5 0.3,1.8 1.7,0 3.6,0 5,1.5 5,3.4 3.7,4.9 1.8,4.9 "
           "0.4,3.6"},
    {U'7', "6.5|0,10 5.5,10 1.8,0"},
    {U'8', "6.5|2.7,5.5 1.2,6.3 0.8,8 1.5,9.5 3.1,10 4.2,9.5 4.9,8 4.5,6.3 3.2,5.5 2.7,5.5|2.7,5.5 1,4.6 "
           "0.4,3 0.8,1.2 2.2,0 3.9,0 5.2,1.2 5.6,3 5,4.6 3.2,5.5"},
    {U'9', "6.5|0.4,1.4 1.7,0 3.2,0 4.6,1.7 5.1,5 4.8,8.2 3.4,10 1.5,10 0.1,8.5 0.1,6.6 1.4,5.1 3.3,5.1 "
           "4.7,6.4"},
    {U'.', "2.2|0.4,0 0.6,0.45"},
    {U',', "2.2|0.7,0.6 0.4,-1.4"},
    {U';', "2.6|0.6,4 0.8,4.45|0.8,0.6 0.5,-1.4"},
    {U':', "2.6|0.5,4 0.7,4.45|0.5,0 0.7,0.45"},
    {U'!', "2.4|0.6,10 0.6,3|0.5,0 0.7,0.45"},
    {U'?', "5.5|0,8.4 1.2,10 3.2,10 4.4,8.5 4.4,7 2.2,5 2.2,3.2|2.1,0 2.3,0.45"},
    {U'\'', "1.8|0.4,10 0.4,8"},
    {U'"', "3.4|0.5,10 0.5,8.2|1.9,10 1.9,8.2"},
    {U'-', "4.5|0,4 3.6,4"},
    {U'(', "3.2|2,11 0.8,8.5 0.4,5 0.8,1.5 2,-1.5"},
    {U')', "3.2|0.4,11 1.6,8.5 2,5 1.6,1.5 0.4,-1.5"},
    {U'/', "4.5|0,-1 3.6,11"},
    {U'\\', "4.5|0,11 3.6,-1"},
    {U'&', "7|5.8,0 1.4,5.6 0.8,7.4 1.4,9.3 2.8,10 4,9.3 4.2,7.8 3.2,6.2 1,4.4 0.5,2.6 1.2,0.7 3,0 "
           "4.6,0.8 5.4,2.2"},
    {U'+', "5.5|2.2,1.3 2.2,6.7|0,4 4.5,4"},
    {U'=', "5.5|0,5.2 4.5,5.2|0,2.8 4.5,2.8"},
    {U'*', "5|2,9.6 2,5.4|0.3,8.6 3.7,6.4|0.3,6.4 3.7,8.6"},
    {U'%', "8|0.4,0 6.6,10|1.6,10 2.6,9.3 2.6,7.9 1.6,7.2 0.7,7.9 0.7,9.3 1.6,10|5.4,2.8 6.4,2.1 "
           "6.4,0.7 5.4,0 4.5,0.7 4.5,2.1 5.4,2.8"},
    {U'#', "6.4|1.6,0 2.4,10|3.6,0 4.4,10|0.5,6.4 5.6,6.4|0.3,3.2 5.4,3.2"},
    {U'@', "9|6.2,4.9 5.5,6 4.2,6.2 3.2,5.3 3,3.9 3.6,2.7 4.9,2.5 6,3.3 6.2,4.9 6.4,2.8|6.4,2.8 7.6,3.4 "
           "8,5 7.6,7 6.2,8.6 4.3,9.2 2.4,8.7 1,7.2 0.5,5 1,2.8 2.4,1.3 4.4,0.8 6.2,1.2"},
    {U'[', "3|2,11 0.6,11 0.6,-1 2,-1"},
    {U']', "3|0.4,11 1.8,11 1.8,-1 0.4,-1"},
    {U'_', "6|0,-2 5,-2"},
    {U'<', "5.5|4.2,7.2 0.4,3.9 4.2,0.6"},
    {U'>', "5.5|0.4,7.2 4.2,3.9 0.4,0.6"},
    {U'{', "3.6|2.6,11 1.6,10.4 1.3,9 1.3,6.4 0.4,5 1.3,3.6 1.3,1 1.6,-0.4 2.6,-1"},
    {U'}', "3.6|0.4,11 1.4,10.4 1.7,9 1.7,6.4 2.6,5 1.7,3.6 1.7,1 1.4,-0.4 0.4,-1"},
    {U'|', "2.2|0.6,11 0.6,-2"},
    {U'$', "6.5|5.4,8.4 4.2,9.6 1.9,9.6 0.5,8.3 0.5,6.9 1.9,5.7 4,5 5.3,3.8 5.3,1.8 4,0.5 1.7,0.5 "
           "0.3,1.8|2.9,11 2.9,-1"},
    {U'~', "6|0.4,4 1.6,5 2.9,4 4.1,5"},
    {U'^', "4.6|0.5,8.4 2,10.4 3.5,8.4"},
    {U'`', "2.6|0.4,10.4 1.6,8.8"},
    {U'ß', "6.6|0,0 0,8.4 1.2,10.2 3,10.2 4.2,9 4.2,7.6 3.2,6.4 2.4,5.9|2.4,5.9 4,5.3 5,4 5,1.8 "
                "3.8,0.4 2.2,0.4"},
};

// Accent marks placed relative to the base glyph (above its top, or at the
// baseline for the cedilla).
const std::pair<char32_t, const char*> kAccentDefs[] = {
    {U'́', "0|-0.9,0 0.9,1.5"},
    {U'̀', "0|-0.9,1.5 0.9,0"},
    {U'̂', "0|-1.2,0 0,1.4 1.2,0"},
    {U'̈', "0|-1.1,0.4 -0.9,0.85|0.9,0.4 1.1,0.85"},
    {U'̃', "0|-1.4,0.2 -0.7,1 0.7,0.2 1.4,1"},
    {U'̊', "0|-0.6,0.6 0,1.3 0.6,0.6 0,0 -0.6,0.6"},
    {U'̧', "0|0,0 0.4,-0.9 1.1,-1.1 0.5,-2.1 -0.4,-2.1"},
};

struct Composition {
    char32_t cp;
    char32_t base;
    char32_t accent;
};

const Composition kCompositions[] = {
    {U'à', U'a', U'̀'}, {U'á', U'a', U'́'}, {U'â', U'a', U'̂'},
    {U'ã', U'a', U'̃'}, {U'ä', U'a', U'̈'}, {U'å', U'a', U'̊'},
    {U'è', U'e', U'̀'}, {U'é', U'e', U'́'}, {U'ê', U'e', U'̂'},
    {U'ë', U'e', U'̈'}, {U'ì', U'l', U'̀'}, {U'í', U'l', U'́'},
    {U'î', U'l', U'̂'}, {U'ï', U'l', U'̈'}, {U'ò', U'o', U'̀'},
    {U'ó', U'o', U'́'}, {U'ô', U'o', U'̂'}, {U'õ', U'o', U'̃'},
    {U'ö', U'o', U'̈'}, {U'ù', U'u', U'̀'}, {U'ú', U'u', U'́'},
    {U'û', U'u', U'̂'}, {U'ü', U'u', U'̈'}, {U'ç', U'c', U'̧'},
    {U'ñ', U'n', U'̃'}, {U'ý', U'y', U'́'}, {U'ÿ', U'y', U'̈'},
    {U'À', U'A', U'̀'}, {U'Á', U'A', U'́'}, {U'Â', U'A', U'̂'},
    {U'Ã', U'A', U'̃'}, {U'Ä', U'A', U'̈'}, {U'Å', U'A', U'̊'},
    {U'È', U'E', U'̀'}, {U'É', U'E', U'́'}, {U'Ê', U'E', U'̂'},
    {U'Ë', U'E', U'̈'}, {U'Ì', U'I', U'̀'}, {U'Í', U'I', U'́'},
    {U'Î', U'I', U'̂'}, {U'Ï', U'I', U'̈'}, {U'Ñ', U'N', U'̃'},
    {U'Ò', U'O', U'̀'}, {U'Ó', U'O', U'́'}, {U'Ô', U'O', U'̂'},
    {U'Õ', U'O', U'̃'}, {U'Ö', U'O', U'̈'}, {U'Ù', U'U', U'̀'},
    {U'Ú', U'U', U'́'}, {U'Û', U'U', U'̂'}, {U'Ü', U'U', U'̈'},
    {U'Ç', U'C', U'̧'}, {U'Ý', U'Y', U'́'},
};

GlyphStrokes parse_glyph(const std::string& def) {
    GlyphStrokes g;
    const auto fields = split(def, '|');
    g.advance = std::stod(fields[0]);
    for (size_t s = 1; s < fields.size(); ++s) {
        std::vector<std::pair<double, double>> stroke;
        std::istringstream in(fields[s]);
        std::string point;
        while (in >> point) {
            const auto comma = point.find(',');
            stroke.emplace_back(std::stod(point.substr(0, comma)), std::stod(point.substr(comma + 1)));
        }
        if (!stroke.empty()) g.strokes.push_back(std::move(stroke));
    }
    return g;
}

std::map<char32_t, GlyphStrokes> build_table() {
    std::map<char32_t, GlyphStrokes> table;
    for (const auto& d : kGlyphDefs) table[d.cp] = parse_glyph(d.def);
    std::map<char32_t, GlyphStrokes> accents;
    for (const auto& [cp, def] : kAccentDefs) accents[cp] = parse_glyph(def);
    for (const auto& comp : kCompositions) {
        auto base_it = table.find(comp.base);
        auto accent_it = accents.find(comp.accent);
        if (base_it == table.end() || accent_it == accents.end()) continue;
        GlyphStrokes g = base_it->second;
        double top = 0, bottom = 0, xmin = 1e9, xmax = -1e9;
        for (const auto& stroke : g.strokes)
            for (const auto& [x, y] : stroke) {
                top = std::max(top, y);
                bottom = std::min(bottom, y);
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
            }
        const double cx = g.strokes.empty() ? g.advance / 2 : (xmin + xmax) / 2;
        const bool below = comp.accent == U'̧';
        const double ay = below ? bottom : top + 0.8;
        for (const auto& stroke : accent_it->second.strokes) {
            std::vector<std::pair<double, double>> placed;
            for (const auto& [x, y] : stroke) placed.emplace_back(cx + x, ay + y);
            g.strokes.push_back(std::move(placed));
        }
        table[comp.cp] = std::move(g);
    }
    return table;
}

}  // namespace

const GlyphStrokes* find_glyph(char32_t cp) {
    static const std::map<char32_t, GlyphStrokes> table = build_table();
    auto it = table.find(cp);
    return it == table.end() ? nullptr : &it->second;
}

}  // namespace scriv
