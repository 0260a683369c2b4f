// SPDX-License-Identifier: Apache-2.0
#include "scriv/annotate.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace scriv {

GazetteerAnnotator GazetteerAnnotator::load(const std::string& path) {
    return from_text(read_text_file(path));
}

GazetteerAnnotator GazetteerAnnotator::from_text(const std::string& text) {
    GazetteerAnnotator g;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, '\t');
        if (parts.size() != 2)
            throw IoError("gazetteer: expected category<TAB>surface, got '" + line + "'");
        g.entries_.emplace_back(parts[1], parts[0]);
    }
    // longest surfaces first so multi-word entries win
    std::sort(g.entries_.begin(), g.entries_.end(), [](const auto& a, const auto& b) {
        return a.first.size() != b.first.size() ? a.first.size() > b.first.size() : a.first < b.first;
    });
    return g;
}

std::vector<std::string> GazetteerAnnotator::categories() const {
    std::set<std::string> cats;
    for (const auto& [surface, cat] : entries_) cats.insert(cat);
    cats.insert("DATE");
    cats.insert("CARDINAL");
    return {cats.begin(), cats.end()};
}

namespace {
bool is_word_char(char32_t cp) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9') ||
           cp >= 0x80;
}
bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
}  // namespace

std::vector<SpanAnnotation> GazetteerAnnotator::annotate(const std::string& text) const {
    const auto cps = utf8_decode(text);
    std::vector<bool> taken(cps.size(), false);
    std::vector<SpanAnnotation> out;
    auto claim = [&](int64_t b, int64_t e, const std::string& cat) {
        for (int64_t i = b; i < e; ++i)
            if (taken[static_cast<size_t>(i)]) return;
        for (int64_t i = b; i < e; ++i) taken[static_cast<size_t>(i)] = true;
        out.push_back({b, e, cat});
    };
    // gazetteer surfaces, longest first, on word boundaries
    for (const auto& [surface, cat] : entries_) {
        const auto pat = utf8_decode(surface);
        if (pat.empty() || pat.size() > cps.size()) continue;
        for (size_t i = 0; i + pat.size() <= cps.size(); ++i) {
            if (!std::equal(pat.begin(), pat.end(), cps.begin() + static_cast<ptrdiff_t>(i))) continue;
            const bool left_ok = i == 0 || !is_word_char(cps[i - 1]) || !is_word_char(pat.front());
            const size_t after = i + pat.size();
            const bool right_ok = after == cps.size() || !is_word_char(cps[after]) || !is_word_char(pat.back());
            if (left_ok && right_ok)
                claim(static_cast<int64_t>(i), static_cast<int64_t>(after), cat);
        }
    }
    // digit-run rules
    size_t i = 0;
    while (i < cps.size()) {
        if (!is_digit(cps[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < cps.size() && is_digit(cps[j])) ++j;
        const bool boundary_left = i == 0 || !is_word_char(cps[i - 1]);
        const bool boundary_right = j == cps.size() || !is_word_char(cps[j]);
        if (boundary_left && boundary_right) {
            if (j - i == 4) {
                int value = 0;
                for (size_t k = i; k < j; ++k) value = value * 10 + static_cast<int>(cps[k] - U'0');
                claim(static_cast<int64_t>(i), static_cast<int64_t>(j),
                      value >= 1000 && value <= 2100 ? "DATE" : "CARDINAL");
            } else {
                claim(static_cast<int64_t>(i), static_cast<int64_t>(j), "CARDINAL");
            }
        }
        i = j;
    }
    std::sort(out.begin(), out.end(),
              [](const SpanAnnotation& a, const SpanAnnotation& b) { return a.begin < b.begin; });
    return out;
}

std::vector<SpanAnnotation> FileAnnotator::annotate(const std::string& text) const {
    const auto len = static_cast<int64_t>(utf8_length(text));
    std::vector<SpanAnnotation> out;
    std::istringstream in(read_text_file(path_));
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, '\t');
        if (parts.size() != 3)
            throw IoError("annotation file: expected begin<TAB>end<TAB>category, got '" + line + "'");
        SpanAnnotation s;
        s.begin = std::stoll(parts[0]);
        s.end = std::stoll(parts[1]);
        s.category = parts[2];
        if (s.begin < 0 || s.end > len || s.begin >= s.end)
            throw ContractError("annotation file: span [" + parts[0] + ", " + parts[1] +
                                ") outside text of length " + std::to_string(len));
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(),
              [](const SpanAnnotation& a, const SpanAnnotation& b) { return a.begin < b.begin; });
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i].begin < out[i - 1].end)
            throw ContractError("annotation file: overlapping spans");
    return out;
}

}  // namespace scriv
