// SPDX-License-Identifier: Apache-2.0
//
// Subword vocabulary: id <-> surface with special-token classes, greedy
// longest-match segmentation, and Unicode-block-based pruning.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scriv/common.hpp"

namespace scriv {

enum class TokenClass {
    plain,
    start,        // payload: task ("htr" or "ner:<dataset>")
    end,
    pad,
    blank,        // CTC blank
    layout_open,  // payload: layout class
    layout_close,
    ne_open,  // payload: entity category
    ne_close,
};

std::string token_class_str(TokenClass cls, const std::string& payload);
std::pair<TokenClass, std::string> parse_token_class(const std::string& text);

struct SubwordToken {
    int id = 0;
    std::string surface;  // canonical tag string for special tokens
    TokenClass cls = TokenClass::plain;
    std::string payload;
};

class Vocabulary {
public:
    Vocabulary() = default;
    // Validates: dense ids 0..v-1, unique surfaces, exactly one pad/end/blank,
    // every layout/NE open tag paired with a close tag.
    explicit Vocabulary(std::vector<SubwordToken> entries);

    static Vocabulary load(const std::string& path);
    void save(const std::string& path) const;
    static Vocabulary from_text(const std::string& text);
    std::string to_text() const;

    int size() const { return static_cast<int>(entries_.size()); }
    const SubwordToken& token(int id) const;
    const std::vector<SubwordToken>& entries() const { return entries_; }
    std::optional<int> find_surface(const std::string& surface) const;

    int pad_id() const { return pad_id_; }
    int end_id() const { return end_id_; }
    int blank_id() const { return blank_id_; }
    int start_id(const std::string& task) const;  // "htr" or "ner:<dataset>"
    int layout_open_id(const std::string& cls) const;
    int layout_close_id(const std::string& cls) const;
    int ne_open_id(const std::string& category) const;
    int ne_close_id(const std::string& category) const;
    int line_break_id() const;  // the plain-token newline surrogate tag

    std::vector<std::string> layout_classes() const;
    std::vector<std::string> ne_categories() const;
    std::vector<std::string> tasks() const;
    bool uses_marker() const { return uses_marker_; }

    // A content-derived fingerprint; noise-table caches key on it.
    uint64_t fingerprint() const;

    const std::map<char32_t, std::vector<int>>& match_index() const { return match_index_; }
    const std::vector<char32_t>& surface_u32(int id) const {
        return surfaces_u32_[static_cast<size_t>(id)];
    }

private:
    std::vector<SubwordToken> entries_;
    std::unordered_map<std::string, int> by_surface_;
    // first code point -> token ids sorted by surface length (desc); plain
    // tokens only, surfaces stored as code points for the matcher.
    std::map<char32_t, std::vector<int>> match_index_;
    std::vector<std::vector<char32_t>> surfaces_u32_;
    int pad_id_ = -1, end_id_ = -1, blank_id_ = -1;
    bool uses_marker_ = false;
};

// Greedy longest match left to right over plain tokens. The concatenation of
// the returned surfaces reproduces the text exactly.
std::vector<int> segment(const std::string& text, const Vocabulary& vocab);

// Like segment() but canonical tag strings in the text map to their special
// tokens; used to read serialized labels back from manifests.
std::vector<int> segment_label(const std::string& text, const Vocabulary& vocab);

// Inverse of segment on plain tokens; special tokens render as their
// canonical tag strings.
std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab);

struct UnicodeBlock {
    char32_t first = 0;
    char32_t last = 0;
    std::string name;
};

// Inclusive, sorted, non-overlapping code point ranges to reject.
class UnicodeBlockPolicy {
public:
    UnicodeBlockPolicy() = default;
    explicit UnicodeBlockPolicy(std::vector<UnicodeBlock> blocks);
    static UnicodeBlockPolicy default_policy();  // CJK, Arabic, Cyrillic, Hangul, Devanagari, Thai, Hebrew
    static UnicodeBlockPolicy load(const std::string& path);  // first<TAB>last<TAB>name per line, hex
    const std::vector<UnicodeBlock>& blocks() const { return blocks_; }
    // Name of the block containing cp, or nullopt if cp is not rejected.
    std::optional<std::string> rejecting_block(char32_t cp) const;

private:
    std::vector<UnicodeBlock> blocks_;
};

struct PruningReport {
    int64_t original = 0;
    int64_t used = 0;
    int64_t rejected = 0;
    int64_t neutral = 0;
    int64_t kept = 0;
    std::vector<std::pair<std::string, int64_t>> per_block;  // block name -> rejected tally
    std::string to_text() const;
};

// A subword is rejected iff it contains a character inside a rejected block;
// used = subwords occurring in the segmentation of the corpus (special
// tokens count as used); neutral = neither. Kept vocabulary = used + neutral,
// re-indexed densely. A corpus that exercises a rejected character is a
// configuration conflict.
std::pair<Vocabulary, PruningReport> prune_vocabulary(const Vocabulary& vocab,
                                                      const UnicodeBlockPolicy& policy,
                                                      const std::string& corpus);

// per_layer = v*d (embedding or decision), total = 2*v*d.
std::pair<int64_t, int64_t> embedding_decision_param_count(int64_t v, int64_t d);

struct DeskVocabSpec {
    std::vector<std::string> layout_classes;
    std::vector<std::string> ne_categories;
    std::vector<std::string> ner_datasets;  // one start token per dataset
    int max_ngrams = 500;
};

// Desk-scale default: printable ASCII + Latin-1 letters as single-character
// tokens, the most frequent bigrams/trigrams of the corpus, and the special
// tokens implied by the spec of tags.
Vocabulary build_desk_vocabulary(const std::string& corpus, const DeskVocabSpec& spec);

// Single characters of the corpus plus the given specials; the baseline
// vocabulary for decode-step comparisons and CTC pretraining alphabets.
Vocabulary build_char_vocabulary(const std::string& corpus, const DeskVocabSpec& spec);

}  // namespace scriv
