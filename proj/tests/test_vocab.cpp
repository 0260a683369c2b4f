// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scriv/vocab.hpp"

using namespace scriv;

namespace {

Vocabulary tiny_vocab(std::vector<std::string> plains) {
    std::vector<SubwordToken> entries;
    auto push = [&](TokenClass cls, const std::string& payload, const std::string& surface) {
        entries.push_back({static_cast<int>(entries.size()), surface, cls, payload});
    };
    push(TokenClass::pad, "", "⟨pad⟩");
    push(TokenClass::end, "", "⟨end⟩");
    push(TokenClass::blank, "", "⟨blank⟩");
    push(TokenClass::start, "htr", "⟨start:htr⟩");
    for (auto& p : plains) push(TokenClass::plain, "", p);
    return Vocabulary(std::move(entries));
}

std::string corpus() { return read_text_file(std::string(SCRIV_DATA_DIR) + "/corpus_en.txt"); }

}  // namespace

TEST_CASE("greedy longest match") {
    auto v = tiny_vocab({"h", "he", "hello", "l", "lo"});
    auto surf = [&](const std::vector<int>& ids) {
        std::vector<std::string> out;
        for (int id : ids) out.push_back(v.token(id).surface);
        return out;
    };
    CHECK(surf(segment("hello", v)) == std::vector<std::string>{"hello"});
    CHECK(surf(segment("hellol", v)) == std::vector<std::string>{"hello", "l"});
    CHECK(surf(segment("heh", v)) == std::vector<std::string>{"he", "h"});
    CHECK_THROWS_AS(segment("hex", v), CoverageError);
}

TEST_CASE("detokenize inverts segment; specials render as tags") {
    auto v = tiny_vocab({"h", "he", "hello", "l", "lo"});
    CHECK(detokenize({}, v).empty());
    CHECK(detokenize(segment("hellol", v), v) == "hellol");
    CHECK(detokenize({v.end_id()}, v) == "⟨end⟩");
    CHECK_THROWS_AS(detokenize({99}, v), DomainError);
}

TEST_CASE("round trip on 1000 corpus-like random lines") {
    DeskVocabSpec spec;
    spec.layout_classes = {"paragraph"};
    auto v = build_desk_vocabulary(corpus(), spec);
    Rng rng(4242);
    const auto text = corpus();
    auto lines = split(text, '\n');
    int done = 0;
    while (done < 1000) {
        const auto& base = lines[rng.below(lines.size())];
        if (base.empty()) continue;
        // random substring of a corpus line
        const auto cps = utf8_decode(base);
        const size_t a = rng.below(cps.size());
        const size_t b = a + 1 + rng.below(cps.size() - a);
        std::string piece;
        for (size_t i = a; i < b; ++i) piece += utf8_encode_one(cps[i]);
        CHECK(detokenize(segment(piece, v), v) == piece);
        ++done;
    }
}

TEST_CASE("vocabulary invariants enforced") {
    // duplicate surface
    CHECK_THROWS_AS(tiny_vocab({"a", "a"}), DomainError);
    // missing pad
    std::vector<SubwordToken> entries{{0, "⟨end⟩", TokenClass::end, ""},
                                      {1, "⟨blank⟩", TokenClass::blank, ""}};
    CHECK_THROWS_AS(Vocabulary{entries}, DomainError);
    // unmatched layout tags
    std::vector<SubwordToken> bad{{0, "⟨pad⟩", TokenClass::pad, ""},
                                  {1, "⟨end⟩", TokenClass::end, ""},
                                  {2, "⟨blank⟩", TokenClass::blank, ""},
                                  {3, "⟨body⟩", TokenClass::layout_open, "body"}};
    CHECK_THROWS_AS(Vocabulary{bad}, DomainError);
    // non-dense ids
    std::vector<SubwordToken> sparse{{0, "⟨pad⟩", TokenClass::pad, ""},
                                     {2, "⟨end⟩", TokenClass::end, ""}};
    CHECK_THROWS_AS(Vocabulary{sparse}, DomainError);
}

TEST_CASE("vocabulary file round trip") {
    DeskVocabSpec spec;
    spec.layout_classes = {"body", "sender"};
    spec.ne_categories = {"PER", "DATE"};
    spec.ner_datasets = {"demo"};
    auto v = build_desk_vocabulary(corpus(), spec);
    auto text = v.to_text();
    auto v2 = Vocabulary::from_text(text);
    CHECK(v2.size() == v.size());
    CHECK(v2.to_text() == text);
    CHECK(v2.fingerprint() == v.fingerprint());
    CHECK(v2.start_id("ner:demo") == v.start_id("ner:demo"));
    CHECK_THROWS_AS(v2.start_id("ner:nope"), DomainError);
}

TEST_CASE("marker convention is supported but not required") {
    auto v = tiny_vocab({"▁hel", "lo", "▁", "h", "e", "l", "o"});
    CHECK(v.uses_marker());
    auto ids = segment("hello hello", v);
    CHECK(detokenize(ids, v) == "hello hello");
}

TEST_CASE("pruning: partition, idempotence, and the reported arithmetic") {
    // vocabulary with CJK and Cyrillic subwords that the corpus never uses
    auto v = tiny_vocab({"the", "cat", "sat", "t", "h", "e", "c", "a", "s", " ",
                         "\xe6\x97\xa5\xe6\x9c\xac",          // CJK
                         "\xd0\xbc\xd0\xb8\xd1\x80",          // Cyrillic
                         "ab\xe6\x97\xa5",                    // mixed, contains CJK
                         "zz"});
    auto policy = UnicodeBlockPolicy::default_policy();
    const std::string corpus_text = "the cat sat\n";
    auto [pruned, report] = prune_vocabulary(v, policy, corpus_text);

    CHECK(report.original == v.size());
    CHECK(report.used + report.rejected + report.neutral == report.original);
    CHECK(report.kept == report.used + report.neutral);
    CHECK(report.rejected == 3);
    // per-block tallies cover the rejected subwords
    int64_t tallied = 0;
    for (const auto& [name, n] : report.per_block) tallied += n;
    CHECK(tallied >= report.rejected);

    // rejected subwords are gone, specials survive
    CHECK(!pruned.find_surface("\xe6\x97\xa5\xe6\x9c\xac").has_value());
    CHECK(pruned.find_surface("⟨pad⟩").has_value());
    CHECK(pruned.find_surface("zz").has_value());  // neutral kept

    // idempotence
    auto [pruned2, report2] = prune_vocabulary(pruned, policy, corpus_text);
    CHECK(pruned2.to_text() == pruned.to_text());
    CHECK(report2.rejected == 0);

    // subword containing a rejected character is rejected even if mostly latin
    CHECK(!pruned.find_surface("ab\xe6\x97\xa5").has_value());
}

TEST_CASE("pruning conflict: corpus using a rejected block is a configuration error") {
    auto v = tiny_vocab({"a", "b", "\xd0\xbc"});
    CHECK_THROWS_AS(prune_vocabulary(v, UnicodeBlockPolicy::default_policy(), "a\xd0\xbc\n"),
                    ConfigError);
}

TEST_CASE("reported vocabulary reduction arithmetic") {
    // the published counts: 57718 total, 27610 used, 25565 rejected
    const int64_t total = 57718, used = 27610, rejected = 25565;
    const int64_t neutral = total - used - rejected;
    const int64_t kept = used + neutral;
    CHECK(neutral == 4543);
    CHECK(used + neutral == 32153);
    CHECK(kept + rejected == 57718);
    const double reduction = static_cast<double>(total - kept) / static_cast<double>(total);
    CHECK(reduction == doctest::Approx(0.44).epsilon(0.01));

    CHECK(embedding_decision_param_count(57718, 1024).first == 59103232);
    CHECK(embedding_decision_param_count(32153, 1024).first == 32924672);
    CHECK(embedding_decision_param_count(32153, 1024).second == 2 * 32924672LL);
    CHECK(embedding_decision_param_count(1, 1) == std::pair<int64_t, int64_t>{1, 2});
}

TEST_CASE("segment_label reads canonical tag strings back") {
    DeskVocabSpec spec;
    spec.layout_classes = {"body"};
    spec.ne_categories = {"PER"};
    auto v = build_desk_vocabulary("hello world\n", spec);
    const std::string label = "⟨start:htr⟩⟨body⟩hello⟨nl⟩world⟨/body⟩⟨end⟩";
    auto ids = segment_label(label, v);
    CHECK(ids.front() == v.start_id("htr"));
    CHECK(ids.back() == v.end_id());
    CHECK(detokenize(ids, v) == label);
}
