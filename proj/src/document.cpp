// SPDX-License-Identifier: Apache-2.0
#include "scriv/document.hpp"

#include <algorithm>

namespace scriv {

std::string Document::block_text(int b) const {
    const auto& block = blocks.at(static_cast<size_t>(b));
    std::string out;
    for (size_t i = 0; i < block.lines.size(); ++i) {
        if (i) out += '\n';
        out += block.lines[i];
    }
    return out;
}

int64_t Document::line_count() const {
    int64_t n = 0;
    for (const auto& b : blocks) n += static_cast<int64_t>(b.lines.size());
    return n;
}

std::vector<int> Document::children_of(int b) const {
    std::vector<int> out;
    for (size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].parent == b) out.push_back(static_cast<int>(i));
    return out;
}

void Document::validate() const {
    for (size_t i = 0; i < blocks.size(); ++i) {
        const int p = blocks[i].parent;
        if (p >= static_cast<int>(i))
            throw ContractError("document: block " + std::to_string(i) + " has parent " + std::to_string(p) +
                                " that does not precede it");
        if (p < -1) throw ContractError("document: negative parent index");
        if (blocks[i].layout_class.empty()) throw ContractError("document: empty layout class");
    }
    // pre-order: a block's parent chain must pass through the immediately
    // preceding open scope
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (!children_of(static_cast<int>(i)).empty() && !blocks[i].lines.empty())
            throw ContractError("document: container block " + std::to_string(i) + " also carries lines");
    }
    std::vector<std::vector<std::pair<int64_t, int64_t>>> spans(blocks.size());
    for (const auto& e : entities) {
        if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
            throw ContractError("document: entity block index out of range");
        const auto text_len = static_cast<int64_t>(utf8_length(block_text(e.block)));
        if (e.begin < 0 || e.end > text_len || e.begin >= e.end)
            throw ContractError("document: entity span [" + std::to_string(e.begin) + ", " +
                                std::to_string(e.end) + ") outside block text of length " +
                                std::to_string(text_len));
        spans[static_cast<size_t>(e.block)].emplace_back(e.begin, e.end);
    }
    for (auto& list : spans) {
        std::sort(list.begin(), list.end());
        for (size_t i = 1; i < list.size(); ++i)
            if (list[i].first < list[i - 1].second)
                throw ContractError("document: overlapping entity spans within a block");
    }
}

bool Document::operator==(const Document& other) const {
    if (blocks != other.blocks) return false;
    auto key = [](const Entity& e) { return std::tuple(e.block, e.begin, e.end, e.category); };
    auto a = entities, b = other.entities;
    std::sort(a.begin(), a.end(), [&](const Entity& x, const Entity& y) { return key(x) < key(y); });
    std::sort(b.begin(), b.end(), [&](const Entity& x, const Entity& y) { return key(x) < key(y); });
    return a == b;
}

LayoutTree layout_tree(const Document& doc) {
    LayoutTree tree;
    tree.nodes.push_back({"root", -1, {}});
    for (size_t i = 0; i < doc.blocks.size(); ++i) {
        const int node = static_cast<int>(tree.nodes.size());
        const int parent_block = doc.blocks[i].parent;
        const int parent_node = parent_block < 0 ? 0 : parent_block + 1;  // blocks map to nodes 1..n
        tree.nodes.push_back({doc.blocks[i].layout_class, parent_node, {}});
        tree.nodes[static_cast<size_t>(parent_node)].children.push_back(node);
    }
    return tree;
}

}  // namespace scriv
