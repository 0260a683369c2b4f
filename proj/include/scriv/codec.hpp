// SPDX-License-Identifier: Apache-2.0
//
// Document <-> token sequence. Serialization is the depth-first reading-order
// emission (start token, layout tags, line breaks, NE tags, end token);
// parsing is total over arbitrary id sequences, repairing unbalanced tags
// and logging every repair.
#pragma once

#include "scriv/document.hpp"
#include "scriv/vocab.hpp"

namespace scriv {

struct TaskPrompt {
    std::string task = "htr";  // "htr" or "ner:<dataset>"
};

struct ParseDiagnostics {
    std::string task;  // payload of the leading start token
    int implicit_opens = 0;
    int implicit_closes = 0;
    int dropped_tokens = 0;
    int truncated_entities = 0;
    std::vector<std::string> repairs;  // one entry per repair, human readable
    int total_repairs() const { return static_cast<int>(repairs.size()); }
};

namespace codec {

// <start> then per block: layout_open, line subwords with the line-break
// token between lines, NE tags bracketing entity spans, layout_close; </end>.
// Token boundaries are forced at entity boundaries so spans survive the
// round trip exactly.
std::vector<int> serialize(const Document& doc, const TaskPrompt& task, const Vocabulary& vocab);

// Best-effort inverse; never throws on malformed input. Balanced sequences
// invert serialize exactly.
std::pair<Document, ParseDiagnostics> parse(const std::vector<int>& ids, const Vocabulary& vocab);

}  // namespace codec

}  // namespace scriv
