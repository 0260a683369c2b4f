// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "docgen.hpp"
#include "scriv/codec.hpp"

using namespace scriv;

namespace {
Vocabulary vocab = docgen::test_vocab();
}

TEST_CASE("empty document serializes to start + end") {
    Document doc;
    auto ids = codec::serialize(doc, {"htr"}, vocab);
    CHECK(ids == std::vector<int>{vocab.start_id("htr"), vocab.end_id()});
    auto [back, diag] = codec::parse(ids, vocab);
    CHECK(back == doc);
    CHECK(diag.total_repairs() == 0);
    CHECK(diag.task == "htr");
}

TEST_CASE("single block emission rule") {
    Document doc;
    doc.blocks.push_back({"body", -1, {"hi"}});
    auto ids = codec::serialize(doc, {"htr"}, vocab);
    std::vector<int> expected{vocab.start_id("htr"), vocab.layout_open_id("body")};
    for (int id : segment("hi", vocab)) expected.push_back(id);
    expected.push_back(vocab.layout_close_id("body"));
    expected.push_back(vocab.end_id());
    CHECK(ids == expected);
}

TEST_CASE("serialize starts with the task token and ends with end") {
    Rng rng(55);
    for (int i = 0; i < 50; ++i) {
        auto doc = docgen::random_document(rng);
        const std::string task = i % 2 ? "htr" : "ner:demo";
        auto ids = codec::serialize(doc, {task}, vocab);
        CHECK(ids.front() == vocab.start_id(task));
        CHECK(ids.back() == vocab.end_id());
    }
}

TEST_CASE("NE tags bracket exactly the span-covering subwords") {
    Document doc;
    doc.blocks.push_back({"body", -1, {"met Anne."}});
    doc.entities.push_back({"PER", 0, 4, 8});
    auto ids = codec::serialize(doc, {"ner:demo"}, vocab);
    // reconstruct the surface text between the NE tags
    const int open = vocab.ne_open_id("PER"), close = vocab.ne_close_id("PER");
    auto it_open = std::find(ids.begin(), ids.end(), open);
    auto it_close = std::find(ids.begin(), ids.end(), close);
    REQUIRE(it_open != ids.end());
    REQUIRE(it_close != ids.end());
    std::string inner;
    for (auto it = it_open + 1; it != it_close; ++it) inner += vocab.token(*it).surface;
    CHECK(inner == "Anne");
    auto [back, diag] = codec::parse(ids, vocab);
    CHECK(diag.total_repairs() == 0);
    CHECK(back == doc);
}

TEST_CASE("round trip identity over 1000 random documents, all families") {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        auto doc = docgen::random_document(rng);
        auto ids = codec::serialize(doc, {"htr"}, vocab);
        auto [back, diag] = codec::parse(ids, vocab);
        REQUIRE(diag.total_repairs() == 0);
        REQUIRE(back == doc);
    }
}

TEST_CASE("repairs: missing close is implicit, stray close is dropped") {
    Document doc;
    doc.blocks.push_back({"body", -1, {"hi"}});
    auto ids = codec::serialize(doc, {"htr"}, vocab);
    // remove the closing tag
    std::vector<int> missing;
    for (int id : ids)
        if (id != vocab.layout_close_id("body")) missing.push_back(id);
    auto [back, diag] = codec::parse(missing, vocab);
    CHECK(back == doc);
    CHECK(diag.implicit_closes == 1);
    CHECK(diag.total_repairs() == 1);

    // stray close with no matching open
    std::vector<int> stray{vocab.start_id("htr"), vocab.layout_close_id("subject"), vocab.end_id()};
    auto [empty_doc, diag2] = codec::parse(stray, vocab);
    CHECK(empty_doc.blocks.empty());
    CHECK(diag2.dropped_tokens == 1);
    CHECK(diag2.total_repairs() == 1);
}

TEST_CASE("layout_open count equals blocks plus implicit opens") {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        // random id soup
        const size_t len = rng.below(60);
        std::vector<int> ids{vocab.start_id("htr")};
        for (size_t k = 0; k < len; ++k) ids.push_back(rng.index(static_cast<size_t>(vocab.size())));
        auto [doc, diag] = codec::parse(ids, vocab);
        int64_t opens = 0;
        bool ended = false;
        for (size_t k = 1; k < ids.size() && !ended; ++k) {
            const auto& t = vocab.token(ids[k]);
            if (t.cls == TokenClass::end) ended = true;
            if (t.cls == TokenClass::layout_open) ++opens;
        }
        CHECK(static_cast<int64_t>(doc.blocks.size()) == opens + diag.implicit_opens);
    }
}

TEST_CASE("fuzz: parse never throws on arbitrary sequences up to 4096") {
    Rng rng(90210);
    for (int i = 0; i < 500; ++i) {
        const size_t len = rng.below(4096);
        std::vector<int> ids;
        for (size_t k = 0; k < len; ++k)
            ids.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(vocab.size() + 4))) - 2);
        auto [doc, diag] = codec::parse(ids, vocab);
        (void)doc;
        (void)diag;
    }
}

TEST_CASE("layout tree shapes") {
    Document empty;
    auto t0 = layout_tree(empty);
    CHECK(t0.nodes.size() == 1);
    CHECK(t0.size_without_root() == 0);

    Document flat;
    flat.blocks.push_back({"sender", -1, {"a"}});
    flat.blocks.push_back({"body", -1, {"b"}});
    auto t1 = layout_tree(flat);
    CHECK(t1.nodes[0].children.size() == 2);
    CHECK(t1.nodes[1].label == "sender");
    CHECK(t1.nodes[2].label == "body");

    Document nested;
    nested.blocks.push_back({"section", -1, {}});
    nested.blocks.push_back({"annotation", 0, {"x"}});
    nested.blocks.push_back({"body", 0, {"y"}});
    auto t2 = layout_tree(nested);
    CHECK(t2.nodes[1].label == "section");
    CHECK(t2.nodes[1].children.size() == 2);
}

TEST_CASE("multi-line entities cross the line-break token") {
    Document doc;
    doc.blocks.push_back({"body", -1, {"an en", "tity here"}});
    // span covers "en\ntity" = offsets [3, 9) of "an en\ntity here"
    doc.entities.push_back({"PER", 0, 3, 9});
    doc.validate();
    auto ids = codec::serialize(doc, {"htr"}, vocab);
    auto [back, diag] = codec::parse(ids, vocab);
    CHECK(diag.total_repairs() == 0);
    CHECK(back == doc);
}
