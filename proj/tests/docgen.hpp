// SPDX-License-Identifier: Apache-2.0
//
// Structure-level random documents over the four layout families, for codec
// and metric property tests. Text is random but coverable by the desk
// vocabulary builders.
#pragma once

#include <string>
#include <vector>

#include "scriv/document.hpp"
#include "scriv/vocab.hpp"

namespace docgen {

inline const std::vector<std::string>& mail_classes() {
    static const std::vector<std::string> c{"sender",  "recipient", "date_location", "subject",
                                            "opening", "body",      "ps_attachment"};
    return c;
}

inline std::vector<std::string> all_layout_classes() {
    std::vector<std::string> out{"paragraph", "page_number", "section", "annotation",
                                 "body",      "margin_a",    "margin_c"};
    for (const auto& c : mail_classes())
        if (c != "body") out.push_back(c);
    return out;
}

inline const std::vector<std::string>& categories() {
    static const std::vector<std::string> c{"PER", "DATE", "GPE", "ORG", "CARDINAL"};
    return c;
}

inline scriv::Vocabulary test_vocab() {
    scriv::DeskVocabSpec spec;
    spec.layout_classes = all_layout_classes();
    spec.ne_categories = categories();
    spec.ner_datasets = {"demo"};
    spec.max_ngrams = 60;
    return scriv::build_desk_vocabulary(
        "the quick brown fox jumps over the lazy dog 0123456789\n"
        "pack my box with five dozen liquor jugs\n",
        spec);
}

inline std::string random_line(scriv::Rng& rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz     ";
    const size_t len = 1 + rng.below(24);
    std::string out;
    for (size_t i = 0; i < len; ++i) out += alphabet[rng.below(alphabet.size())];
    return out;
}

inline void add_lines(scriv::Block& b, scriv::Rng& rng, size_t max_lines = 4) {
    const size_t n = 1 + rng.below(max_lines);
    for (size_t i = 0; i < n; ++i) b.lines.push_back(random_line(rng));
}

// Non-overlapping random spans over the block's joined text; spans may cross
// line breaks.
inline void add_entities(scriv::Document& doc, int block, scriv::Rng& rng) {
    const auto text = scriv::utf8_decode(doc.block_text(block));
    if (text.size() < 2) return;
    int64_t cursor = 0;
    while (cursor + 2 < static_cast<int64_t>(text.size()) && rng.bernoulli(0.5)) {
        const int64_t begin = cursor + static_cast<int64_t>(rng.below(3));
        const int64_t max_len = std::min<int64_t>(6, static_cast<int64_t>(text.size()) - begin);
        if (max_len < 1) break;
        const int64_t end = begin + 1 + static_cast<int64_t>(rng.below(static_cast<uint64_t>(max_len)));
        doc.entities.push_back({categories()[rng.below(categories().size())], block, begin, end});
        cursor = end + 1;
    }
}

inline scriv::Document random_document(scriv::Rng& rng) {
    scriv::Document doc;
    const int family = static_cast<int>(rng.below(4));
    switch (family) {
        case 0: {  // paragraph
            scriv::Block b;
            b.layout_class = "paragraph";
            add_lines(b, rng, 6);
            doc.blocks.push_back(std::move(b));
            add_entities(doc, 0, rng);
            break;
        }
        case 1: {  // mail, flat sequence of distinct classes
            const size_t n = 2 + rng.below(4);
            std::vector<std::string> classes = mail_classes();
            for (size_t i = 0; i < n && !classes.empty(); ++i) {
                const size_t pick = rng.below(classes.size());
                scriv::Block b;
                b.layout_class = classes[pick];
                classes.erase(classes.begin() + static_cast<ptrdiff_t>(pick));
                add_lines(b, rng, 3);
                doc.blocks.push_back(std::move(b));
                add_entities(doc, static_cast<int>(doc.blocks.size()) - 1, rng);
            }
            break;
        }
        case 2: {  // nested sections
            if (rng.bernoulli(0.7)) {
                scriv::Block pn;
                pn.layout_class = "page_number";
                pn.lines.push_back(std::to_string(1 + rng.below(400)));
                doc.blocks.push_back(std::move(pn));
            }
            const size_t sections = 1 + rng.below(2);
            for (size_t s = 0; s < sections; ++s) {
                scriv::Block sec;
                sec.layout_class = "section";
                doc.blocks.push_back(std::move(sec));
                const int sec_idx = static_cast<int>(doc.blocks.size()) - 1;
                const size_t annotations = 1 + rng.below(2);
                for (size_t a = 0; a < annotations; ++a) {
                    scriv::Block an;
                    an.layout_class = "annotation";
                    an.parent = sec_idx;
                    add_lines(an, rng, 2);
                    doc.blocks.push_back(std::move(an));
                    add_entities(doc, static_cast<int>(doc.blocks.size()) - 1, rng);
                }
                scriv::Block body;
                body.layout_class = "body";
                body.parent = sec_idx;
                add_lines(body, rng, 3);
                doc.blocks.push_back(std::move(body));
                add_entities(doc, static_cast<int>(doc.blocks.size()) - 1, rng);
            }
            break;
        }
        default: {  // margin family: A, B, optional C
            scriv::Block a;
            a.layout_class = "margin_a";
            add_lines(a, rng, 2);
            doc.blocks.push_back(std::move(a));
            scriv::Block body;
            body.layout_class = "body";
            add_lines(body, rng, 5);
            doc.blocks.push_back(std::move(body));
            add_entities(doc, 1, rng);
            if (rng.bernoulli(0.5)) {
                scriv::Block c;
                c.layout_class = "margin_c";
                add_lines(c, rng, 2);
                doc.blocks.push_back(std::move(c));
            }
            break;
        }
    }
    doc.validate();
    return doc;
}

}  // namespace docgen
