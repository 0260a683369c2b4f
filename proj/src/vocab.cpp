// SPDX-License-Identifier: Apache-2.0
#include "scriv/vocab.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace scriv {

namespace {
const char* kMarker = "\xe2\x96\x81";  // U+2581 lower one eighth block
constexpr char32_t kMarkerCp = 0x2581;
}  // namespace

std::string token_class_str(TokenClass cls, const std::string& payload) {
    switch (cls) {
        case TokenClass::plain: return "plain";
        case TokenClass::start: return "start:" + payload;
        case TokenClass::end: return "end";
        case TokenClass::pad: return "pad";
        case TokenClass::blank: return "blank";
        case TokenClass::layout_open: return "layout_open:" + payload;
        case TokenClass::layout_close: return "layout_close:" + payload;
        case TokenClass::ne_open: return "ne_open:" + payload;
        case TokenClass::ne_close: return "ne_close:" + payload;
    }
    throw DomainError("token_class_str: bad class");
}

std::pair<TokenClass, std::string> parse_token_class(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string payload = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "plain") return {TokenClass::plain, ""};
    if (head == "start") return {TokenClass::start, payload};
    if (head == "end") return {TokenClass::end, ""};
    if (head == "pad") return {TokenClass::pad, ""};
    if (head == "blank") return {TokenClass::blank, ""};
    if (head == "layout_open") return {TokenClass::layout_open, payload};
    if (head == "layout_close") return {TokenClass::layout_close, payload};
    if (head == "ne_open") return {TokenClass::ne_open, payload};
    if (head == "ne_close") return {TokenClass::ne_close, payload};
    throw DomainError("vocabulary: unknown token class '" + text + "'");
}

Vocabulary::Vocabulary(std::vector<SubwordToken> entries) : entries_(std::move(entries)) {
    int pads = 0, ends = 0, blanks = 0;
    std::set<std::string> layout_opens, layout_closes, ne_opens, ne_closes;
    for (size_t i = 0; i < entries_.size(); ++i) {
        const auto& t = entries_[i];
        if (t.id != static_cast<int>(i))
            throw DomainError("vocabulary: ids must be dense 0..v-1, found id " + std::to_string(t.id) +
                              " at position " + std::to_string(i));
        if (t.surface.empty()) throw DomainError("vocabulary: empty surface for id " + std::to_string(t.id));
        if (!by_surface_.emplace(t.surface, t.id).second)
            throw DomainError("vocabulary: duplicate surface '" + t.surface + "'");
        switch (t.cls) {
            case TokenClass::pad: pad_id_ = t.id; ++pads; break;
            case TokenClass::end: end_id_ = t.id; ++ends; break;
            case TokenClass::blank: blank_id_ = t.id; ++blanks; break;
            case TokenClass::layout_open: layout_opens.insert(t.payload); break;
            case TokenClass::layout_close: layout_closes.insert(t.payload); break;
            case TokenClass::ne_open: ne_opens.insert(t.payload); break;
            case TokenClass::ne_close: ne_closes.insert(t.payload); break;
            default: break;
        }
    }
    if (pads != 1 || ends != 1 || blanks != 1)
        throw DomainError("vocabulary: need exactly one pad/end/blank, found " + std::to_string(pads) +
                          "/" + std::to_string(ends) + "/" + std::to_string(blanks));
    if (layout_opens != layout_closes)
        throw DomainError("vocabulary: unmatched layout open/close tag sets");
    if (ne_opens != ne_closes) throw DomainError("vocabulary: unmatched NE open/close tag sets");

    surfaces_u32_.resize(entries_.size());
    for (const auto& t : entries_) {
        surfaces_u32_[static_cast<size_t>(t.id)] = utf8_decode(t.surface);
        if (t.cls == TokenClass::plain) {
            const auto& u32 = surfaces_u32_[static_cast<size_t>(t.id)];
            match_index_[u32[0]].push_back(t.id);
            if (u32[0] == kMarkerCp) uses_marker_ = true;
        }
    }
    for (auto& [cp, ids] : match_index_)
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            const auto la = surfaces_u32_[static_cast<size_t>(a)].size();
            const auto lb = surfaces_u32_[static_cast<size_t>(b)].size();
            return la != lb ? la > lb : a < b;
        });
}

const SubwordToken& Vocabulary::token(int id) const {
    if (id < 0 || id >= size())
        throw DomainError("vocabulary: unknown id " + std::to_string(id) + " (size " +
                          std::to_string(size()) + ")");
    return entries_[static_cast<size_t>(id)];
}

std::optional<int> Vocabulary::find_surface(const std::string& surface) const {
    auto it = by_surface_.find(surface);
    if (it == by_surface_.end()) return std::nullopt;
    return it->second;
}

namespace {
int find_special(const Vocabulary& v, TokenClass cls, const std::string& payload, const char* what) {
    for (const auto& t : v.entries())
        if (t.cls == cls && t.payload == payload) return t.id;
    throw DomainError(std::string("vocabulary: no ") + what + " token for '" + payload + "'");
}
}  // namespace

int Vocabulary::start_id(const std::string& task) const {
    return find_special(*this, TokenClass::start, task, "start");
}
int Vocabulary::layout_open_id(const std::string& cls) const {
    return find_special(*this, TokenClass::layout_open, cls, "layout_open");
}
int Vocabulary::layout_close_id(const std::string& cls) const {
    return find_special(*this, TokenClass::layout_close, cls, "layout_close");
}
int Vocabulary::ne_open_id(const std::string& category) const {
    return find_special(*this, TokenClass::ne_open, category, "ne_open");
}
int Vocabulary::ne_close_id(const std::string& category) const {
    return find_special(*this, TokenClass::ne_close, category, "ne_close");
}

int Vocabulary::line_break_id() const {
    auto id = find_surface("⟨nl⟩");
    if (!id) throw DomainError("vocabulary: no line-break token");
    return *id;
}

std::vector<std::string> Vocabulary::layout_classes() const {
    std::vector<std::string> out;
    for (const auto& t : entries_)
        if (t.cls == TokenClass::layout_open) out.push_back(t.payload);
    return out;
}

std::vector<std::string> Vocabulary::ne_categories() const {
    std::vector<std::string> out;
    for (const auto& t : entries_)
        if (t.cls == TokenClass::ne_open) out.push_back(t.payload);
    return out;
}

std::vector<std::string> Vocabulary::tasks() const {
    std::vector<std::string> out;
    for (const auto& t : entries_)
        if (t.cls == TokenClass::start) out.push_back(t.payload);
    return out;
}

uint64_t Vocabulary::fingerprint() const { return fnv1a(to_text()); }

Vocabulary Vocabulary::from_text(const std::string& text) {
    std::vector<SubwordToken> entries;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = split(line, '\t');
        if (parts.size() != 3)
            throw IoError("vocabulary: expected id<TAB>class<TAB>surface, got '" + line + "'");
        SubwordToken t;
        t.id = std::stoi(parts[0]);
        auto [cls, payload] = parse_token_class(parts[1]);
        t.cls = cls;
        t.payload = payload;
        t.surface = parts[2];
        entries.push_back(std::move(t));
    }
    return Vocabulary(std::move(entries));
}

std::string Vocabulary::to_text() const {
    std::string out;
    for (const auto& t : entries_) {
        out += std::to_string(t.id);
        out += '\t';
        out += token_class_str(t.cls, t.payload);
        out += '\t';
        out += t.surface;
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::load(const std::string& path) { return from_text(read_text_file(path)); }

void Vocabulary::save(const std::string& path) const { write_text_file(path, to_text()); }

namespace {

std::vector<int> segment_impl(const std::string& text, const Vocabulary& vocab, bool allow_specials) {
    std::vector<char32_t> cps = utf8_decode(text);
    if (vocab.uses_marker())
        for (auto& cp : cps)
            if (cp == U' ') cp = kMarkerCp;
    std::vector<int> out;
    size_t pos = 0;
    while (pos < cps.size()) {
        int matched = -1;
        if (allow_specials) {
            size_t best_len = 0;
            for (const auto& t : vocab.entries()) {
                if (t.cls == TokenClass::plain) continue;
                const auto& s = vocab.surface_u32(t.id);
                if (s.size() <= best_len || pos + s.size() > cps.size()) continue;
                if (std::equal(s.begin(), s.end(), cps.begin() + static_cast<ptrdiff_t>(pos))) {
                    matched = t.id;
                    best_len = s.size();
                }
            }
            if (matched >= 0) {
                out.push_back(matched);
                pos += vocab.surface_u32(matched).size();
                continue;
            }
        }
        auto it = vocab.match_index().find(cps[pos]);
        if (it != vocab.match_index().end()) {
            for (int id : it->second) {
                const auto& s = vocab.surface_u32(id);
                if (pos + s.size() > cps.size()) continue;
                if (std::equal(s.begin(), s.end(), cps.begin() + static_cast<ptrdiff_t>(pos))) {
                    matched = id;
                    break;  // candidates are longest-first
                }
            }
        }
        if (matched < 0) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cps[pos]));
            throw CoverageError(std::string("segment: no token covers code point ") + buf +
                                " at position " + std::to_string(pos));
        }
        out.push_back(matched);
        pos += vocab.surface_u32(matched).size();
    }
    return out;
}

}  // namespace

std::vector<int> segment(const std::string& text, const Vocabulary& vocab) {
    return segment_impl(text, vocab, false);
}

std::vector<int> segment_label(const std::string& text, const Vocabulary& vocab) {
    return segment_impl(text, vocab, true);
}

std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab) {
    std::string out;
    for (int id : ids) out += vocab.token(id).surface;
    if (vocab.uses_marker()) {
        std::string unmarked;
        for (size_t i = 0; i < out.size();) {
            if (out.compare(i, 3, kMarker) == 0) {
                unmarked += ' ';
                i += 3;
            } else {
                unmarked += out[i];
                ++i;
            }
        }
        return unmarked;
    }
    return out;
}

// ---- pruning ----

UnicodeBlockPolicy::UnicodeBlockPolicy(std::vector<UnicodeBlock> blocks) : blocks_(std::move(blocks)) {
    std::sort(blocks_.begin(), blocks_.end(),
              [](const UnicodeBlock& a, const UnicodeBlock& b) { return a.first < b.first; });
    for (size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].last < blocks_[i].first)
            throw ConfigError("unicode policy: inverted range in block '" + blocks_[i].name + "'");
        if (i > 0 && blocks_[i].first <= blocks_[i - 1].last)
            throw ConfigError("unicode policy: overlapping ranges '" + blocks_[i - 1].name + "' and '" +
                              blocks_[i].name + "'");
    }
}

UnicodeBlockPolicy UnicodeBlockPolicy::default_policy() {
    return UnicodeBlockPolicy({
        {0x0400, 0x04FF, "Cyrillic"},
        {0x0500, 0x052F, "Cyrillic Supplement"},
        {0x0590, 0x05FF, "Hebrew"},
        {0x0600, 0x06FF, "Arabic"},
        {0x0750, 0x077F, "Arabic Supplement"},
        {0x0900, 0x097F, "Devanagari"},
        {0x0E00, 0x0E7F, "Thai"},
        {0x1100, 0x11FF, "Hangul Jamo"},
        {0x3040, 0x309F, "Hiragana"},
        {0x30A0, 0x30FF, "Katakana"},
        {0x3400, 0x4DBF, "CJK Extension A"},
        {0x4E00, 0x9FFF, "CJK Unified Ideographs"},
        {0xAC00, 0xD7AF, "Hangul Syllables"},
    });
}

UnicodeBlockPolicy UnicodeBlockPolicy::load(const std::string& path) {
    std::vector<UnicodeBlock> blocks;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, '\t');
        if (parts.size() != 3)
            throw ConfigError("unicode policy: expected first<TAB>last<TAB>name, got '" + line + "'");
        UnicodeBlock b;
        b.first = static_cast<char32_t>(std::stoul(parts[0], nullptr, 16));
        b.last = static_cast<char32_t>(std::stoul(parts[1], nullptr, 16));
        b.name = parts[2];
        blocks.push_back(std::move(b));
    }
    return UnicodeBlockPolicy(std::move(blocks));
}

std::optional<std::string> UnicodeBlockPolicy::rejecting_block(char32_t cp) const {
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), cp,
                               [](char32_t v, const UnicodeBlock& b) { return v < b.first; });
    if (it == blocks_.begin()) return std::nullopt;
    --it;
    if (cp >= it->first && cp <= it->last) return it->name;
    return std::nullopt;
}

std::string PruningReport::to_text() const {
    std::ostringstream out;
    out << "original\t" << original << "\n";
    out << "used\t" << used << "\n";
    out << "rejected\t" << rejected << "\n";
    out << "neutral\t" << neutral << "\n";
    out << "kept\t" << kept << "\n";
    for (const auto& [name, tally] : per_block) out << "block\t" << name << "\t" << tally << "\n";
    return out.str();
}

std::pair<Vocabulary, PruningReport> prune_vocabulary(const Vocabulary& vocab,
                                                      const UnicodeBlockPolicy& policy,
                                                      const std::string& corpus) {
    const int v = vocab.size();
    std::vector<bool> used(static_cast<size_t>(v), false);
    std::vector<bool> rejected(static_cast<size_t>(v), false);
    std::map<std::string, int64_t> tallies;

    for (const auto& t : vocab.entries()) {
        std::set<std::string> hit_blocks;
        for (char32_t cp : utf8_decode(t.surface))
            if (auto block = policy.rejecting_block(cp)) hit_blocks.insert(*block);
        if (hit_blocks.empty()) continue;
        if (t.cls != TokenClass::plain)
            throw ConfigError("prune: policy rejects special token surface '" + t.surface + "'");
        rejected[static_cast<size_t>(t.id)] = true;
        // a subword spanning several rejected blocks tallies under each
        for (const auto& b : hit_blocks) tallies[b] += 1;
    }

    for (const auto& t : vocab.entries())
        if (t.cls != TokenClass::plain) used[static_cast<size_t>(t.id)] = true;
    std::istringstream in(corpus);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (int id : segment(line, vocab)) used[static_cast<size_t>(id)] = true;
    }

    PruningReport report;
    report.original = v;
    std::vector<SubwordToken> kept;
    for (const auto& t : vocab.entries()) {
        const bool u = used[static_cast<size_t>(t.id)];
        const bool r = rejected[static_cast<size_t>(t.id)];
        if (u && r)
            throw ConfigError("prune: subword '" + t.surface +
                              "' is used by the corpus but lies in a rejected block");
        if (u) ++report.used;
        else if (r) ++report.rejected;
        else ++report.neutral;
        if (!r) {
            SubwordToken nt = t;
            nt.id = static_cast<int>(kept.size());
            kept.push_back(std::move(nt));
        }
    }
    report.kept = static_cast<int64_t>(kept.size());
    for (const auto& [name, tally] : tallies) report.per_block.emplace_back(name, tally);
    return {Vocabulary(std::move(kept)), report};
}

std::pair<int64_t, int64_t> embedding_decision_param_count(int64_t v, int64_t d) {
    if (v <= 0 || d <= 0) throw DomainError("embedding_decision_param_count: v and d must be positive");
    return {v * d, 2 * v * d};
}

// ---- desk vocabulary builders ----

namespace {

void append_special_tokens(std::vector<SubwordToken>& entries, const DeskVocabSpec& spec) {
    auto push = [&](TokenClass cls, const std::string& payload, const std::string& surface) {
        entries.push_back({static_cast<int>(entries.size()), surface, cls, payload});
    };
    push(TokenClass::pad, "", "⟨pad⟩");
    push(TokenClass::end, "", "⟨end⟩");
    push(TokenClass::blank, "", "⟨blank⟩");
    push(TokenClass::start, "htr", "⟨start:htr⟩");
    for (const auto& ds : spec.ner_datasets)
        push(TokenClass::start, "ner:" + ds, "⟨start:ner:" + ds + "⟩");
    for (const auto& cls : spec.layout_classes) {
        push(TokenClass::layout_open, cls, "⟨" + cls + "⟩");
        push(TokenClass::layout_close, cls, "⟨/" + cls + "⟩");
    }
    for (const auto& cat : spec.ne_categories) {
        push(TokenClass::ne_open, cat, "⟨ne:" + cat + "⟩");
        push(TokenClass::ne_close, cat, "⟨/ne:" + cat + "⟩");
    }
    // line-break surrogate: lives in the plain space, renders as a tag
    entries.push_back({static_cast<int>(entries.size()), "⟨nl⟩", TokenClass::plain, ""});
}

std::vector<char32_t> base_alphabet() {
    std::vector<char32_t> cps;
    for (char32_t c = 0x20; c <= 0x7E; ++c) cps.push_back(c);  // printable ASCII
    for (char32_t c = 0xC0; c <= 0xFF; ++c)
        if (c != 0xD7 && c != 0xF7) cps.push_back(c);  // Latin-1 letters
    return cps;
}

void append_single_chars(std::vector<SubwordToken>& entries, std::set<std::string>& seen,
                         const std::string& corpus) {
    for (char32_t cp : base_alphabet()) {
        const auto s = utf8_encode_one(cp);
        if (seen.insert(s).second)
            entries.push_back({static_cast<int>(entries.size()), s, TokenClass::plain, ""});
    }
    for (char32_t cp : utf8_decode(corpus)) {
        if (cp == U'\n' || cp == U'\t') continue;
        const auto s = utf8_encode_one(cp);
        if (seen.insert(s).second)
            entries.push_back({static_cast<int>(entries.size()), s, TokenClass::plain, ""});
    }
}

}  // namespace

Vocabulary build_desk_vocabulary(const std::string& corpus, const DeskVocabSpec& spec) {
    std::vector<SubwordToken> entries;
    append_special_tokens(entries, spec);
    std::set<std::string> seen;
    append_single_chars(entries, seen, corpus);
    std::map<std::string, int64_t> freq;
    const auto cps = utf8_decode(corpus);
    for (size_t i = 0; i < cps.size(); ++i)
        for (size_t n = 2; n <= 3; ++n) {
            if (i + n > cps.size()) break;
            bool ok = true;
            std::string gram;
            for (size_t k = 0; k < n; ++k) {
                if (cps[i + k] == U'\n' || cps[i + k] == U'\t') ok = false;
                gram += utf8_encode_one(cps[i + k]);
            }
            if (ok) freq[gram] += 1;
        }
    std::vector<std::pair<std::string, int64_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    int added = 0;
    for (const auto& [gram, count] : ranked) {
        if (added >= spec.max_ngrams || count < 2) break;
        if (!seen.insert(gram).second) continue;
        entries.push_back({static_cast<int>(entries.size()), gram, TokenClass::plain, ""});
        ++added;
    }
    return Vocabulary(std::move(entries));
}

Vocabulary build_char_vocabulary(const std::string& corpus, const DeskVocabSpec& spec) {
    std::vector<SubwordToken> entries;
    append_special_tokens(entries, spec);
    std::set<std::string> seen;
    append_single_chars(entries, seen, corpus);
    return Vocabulary(std::move(entries));
}

}  // namespace scriv
