// SPDX-License-Identifier: Apache-2.0
//
// Structured page: ordered blocks (optionally nested) with text lines, plus
// entity spans over each block's concatenated text. The ground-truth and
// prediction object of the whole pipeline.
#pragma once

#include <string>
#include <vector>

#include "scriv/common.hpp"

namespace scriv {

struct Entity {
    std::string category;
    int block = 0;
    int64_t begin = 0;  // [begin, end) in Unicode scalar values over the
    int64_t end = 0;    // block's lines joined with '\n'
    bool operator==(const Entity&) const = default;
};

struct Block {
    std::string layout_class;
    int parent = -1;  // index of an earlier block, or -1 for a root
    std::vector<std::string> lines;
    bool operator==(const Block&) const = default;
};

struct Document {
    std::vector<Block> blocks;  // reading order == pre-order of the nesting forest
    std::vector<Entity> entities;

    std::string block_text(int b) const;
    int64_t line_count() const;
    std::vector<int> children_of(int b) const;  // -1 for roots
    // Block order forms a forest in pre-order; spans lie inside their block
    // and do not overlap within a block; container blocks carry no lines.
    void validate() const;
    bool operator==(const Document& other) const;
};

struct LayoutNode {
    std::string label;
    int parent = -1;
    std::vector<int> children;
};

// Ordered tree: synthetic root (node 0, label "root") over one node per
// block; sibling order is reading order.
struct LayoutTree {
    std::vector<LayoutNode> nodes;
    int64_t size_without_root() const { return static_cast<int64_t>(nodes.size()) - 1; }
};

LayoutTree layout_tree(const Document& doc);

}  // namespace scriv
