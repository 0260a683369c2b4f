// SPDX-License-Identifier: Apache-2.0
#include "scriv/codec.hpp"

#include <algorithm>
#include <map>

namespace scriv::codec {

namespace {

// Offsets where a tag must be emitted inside one block's text.
struct BlockEvents {
    std::map<int64_t, std::vector<int>> opens;   // offset -> entity indexes (doc order)
    std::map<int64_t, std::vector<int>> closes;  // offset -> entity indexes
};

void emit_block_content(const Document& doc, int b, const Vocabulary& vocab, std::vector<int>& out) {
    const auto& block = doc.blocks[static_cast<size_t>(b)];
    BlockEvents ev;
    for (size_t e = 0; e < doc.entities.size(); ++e) {
        if (doc.entities[e].block != b) continue;
        ev.opens[doc.entities[e].begin].push_back(static_cast<int>(e));
        ev.closes[doc.entities[e].end].push_back(static_cast<int>(e));
    }
    const auto text = utf8_decode(doc.block_text(b));
    const int nl = vocab.line_break_id();
    std::string piece;
    auto flush = [&] {
        if (piece.empty()) return;
        for (int id : segment(piece, vocab)) out.push_back(id);
        piece.clear();
    };
    for (int64_t off = 0; off <= static_cast<int64_t>(text.size()); ++off) {
        if (auto it = ev.closes.find(off); it != ev.closes.end()) {
            flush();
            for (int e : it->second) out.push_back(vocab.ne_close_id(doc.entities[static_cast<size_t>(e)].category));
        }
        if (auto it = ev.opens.find(off); it != ev.opens.end()) {
            flush();
            for (int e : it->second) out.push_back(vocab.ne_open_id(doc.entities[static_cast<size_t>(e)].category));
        }
        if (off == static_cast<int64_t>(text.size())) break;
        if (text[static_cast<size_t>(off)] == U'\n') {
            flush();
            out.push_back(nl);
        } else {
            piece += utf8_encode_one(text[static_cast<size_t>(off)]);
        }
    }
    flush();
}

}  // namespace

std::vector<int> serialize(const Document& doc, const TaskPrompt& task, const Vocabulary& vocab) {
    doc.validate();
    std::vector<int> out;
    out.push_back(vocab.start_id(task.task));
    std::vector<int> open_stack;  // block indexes
    for (int b = 0; b < static_cast<int>(doc.blocks.size()); ++b) {
        const auto& block = doc.blocks[static_cast<size_t>(b)];
        while (!open_stack.empty() && open_stack.back() != block.parent) {
            out.push_back(vocab.layout_close_id(doc.blocks[static_cast<size_t>(open_stack.back())].layout_class));
            open_stack.pop_back();
        }
        if (open_stack.empty() && block.parent != -1)
            throw ContractError("serialize: blocks are not in pre-order");
        out.push_back(vocab.layout_open_id(block.layout_class));
        open_stack.push_back(b);
        emit_block_content(doc, b, vocab, out);
    }
    while (!open_stack.empty()) {
        out.push_back(vocab.layout_close_id(doc.blocks[static_cast<size_t>(open_stack.back())].layout_class));
        open_stack.pop_back();
    }
    out.push_back(vocab.end_id());
    return out;
}

namespace {

struct OpenEntity {
    std::string category;
    int64_t begin = 0;
};

struct OpenBlock {
    int index;
    std::vector<OpenEntity> open_entities;
};

struct ParserState {
    Document doc;
    ParseDiagnostics diag;
    std::vector<OpenBlock> stack;
    const Vocabulary& vocab;
    std::string implicit_class;

    explicit ParserState(const Vocabulary& v) : vocab(v) {
        const auto classes = v.layout_classes();
        implicit_class = classes.empty() ? "text" : classes.front();
    }

    int64_t offset_in_top() {
        const auto& block = doc.blocks[static_cast<size_t>(stack.back().index)];
        int64_t off = 0;
        for (size_t i = 0; i + 1 < block.lines.size(); ++i)
            off += static_cast<int64_t>(utf8_length(block.lines[i])) + 1;
        if (!block.lines.empty()) off += static_cast<int64_t>(utf8_length(block.lines.back()));
        return off;
    }

    void open_block(const std::string& cls) {
        Block b;
        b.layout_class = cls;
        b.parent = stack.empty() ? -1 : stack.back().index;
        doc.blocks.push_back(std::move(b));
        stack.push_back({static_cast<int>(doc.blocks.size()) - 1, {}});
    }

    void require_block() {
        if (!stack.empty()) return;
        open_block(implicit_class);
        diag.implicit_opens += 1;
        diag.repairs.push_back("implicit <" + implicit_class + "> opened for stray content");
    }

    void close_top(bool repair) {
        auto& top = stack.back();
        const int64_t off = offset_in_top();
        for (const auto& oe : top.open_entities) {
            if (off > oe.begin) {
                doc.entities.push_back({oe.category, top.index, oe.begin, off});
                diag.truncated_entities += 1;
                diag.repairs.push_back("entity <ne:" + oe.category + "> closed implicitly at block end");
            } else {
                diag.dropped_tokens += 1;
                diag.repairs.push_back("empty entity <ne:" + oe.category + "> dropped at block end");
            }
        }
        if (repair) {
            diag.implicit_closes += 1;
            diag.repairs.push_back("block <" + doc.blocks[static_cast<size_t>(top.index)].layout_class +
                                   "> closed implicitly");
        }
        stack.pop_back();
    }

    void append_text(const std::string& surface) {
        require_block();
        auto& block = doc.blocks[static_cast<size_t>(stack.back().index)];
        if (block.lines.empty()) block.lines.emplace_back();
        if (vocab.uses_marker()) {
            block.lines.back() += detokenize({vocab.find_surface(surface).value()}, vocab);
        } else {
            block.lines.back() += surface;
        }
    }
};

}  // namespace

std::pair<Document, ParseDiagnostics> parse(const std::vector<int>& ids, const Vocabulary& vocab) {
    ParserState st(vocab);
    size_t i = 0;
    if (!ids.empty() && ids[0] >= 0 && ids[0] < vocab.size() &&
        vocab.token(ids[0]).cls == TokenClass::start) {
        st.diag.task = vocab.token(ids[0]).payload;
        i = 1;
    } else {
        st.diag.repairs.push_back("missing start token, assuming htr");
        st.diag.task = "htr";
    }
    const int nl = vocab.line_break_id();
    for (; i < ids.size(); ++i) {
        const int id = ids[i];
        if (id < 0 || id >= vocab.size()) {
            st.diag.dropped_tokens += 1;
            st.diag.repairs.push_back("unknown id " + std::to_string(id) + " dropped");
            continue;
        }
        const auto& t = vocab.token(id);
        if (t.cls == TokenClass::end) break;
        switch (t.cls) {
            case TokenClass::plain:
                if (id == nl) {
                    st.require_block();
                    auto& block = st.doc.blocks[static_cast<size_t>(st.stack.back().index)];
                    if (block.lines.empty()) block.lines.emplace_back();
                    block.lines.emplace_back();
                } else {
                    st.append_text(t.surface);
                }
                break;
            case TokenClass::layout_open:
                st.open_block(t.payload);
                break;
            case TokenClass::layout_close: {
                if (!st.stack.empty() &&
                    st.doc.blocks[static_cast<size_t>(st.stack.back().index)].layout_class == t.payload) {
                    st.close_top(false);
                } else {
                    st.diag.dropped_tokens += 1;
                    st.diag.repairs.push_back("stray </" + t.payload + "> dropped");
                }
                break;
            }
            case TokenClass::ne_open:
                st.require_block();
                st.stack.back().open_entities.push_back({t.payload, st.offset_in_top()});
                break;
            case TokenClass::ne_close: {
                if (st.stack.empty()) {
                    st.diag.dropped_tokens += 1;
                    st.diag.repairs.push_back("stray </ne:" + t.payload + "> dropped");
                    break;
                }
                auto& open = st.stack.back().open_entities;
                auto it = std::find_if(open.rbegin(), open.rend(),
                                       [&](const OpenEntity& e) { return e.category == t.payload; });
                if (it == open.rend()) {
                    st.diag.dropped_tokens += 1;
                    st.diag.repairs.push_back("stray </ne:" + t.payload + "> dropped");
                    break;
                }
                const int64_t off = st.offset_in_top();
                if (off > it->begin)
                    st.doc.entities.push_back({it->category, st.stack.back().index, it->begin, off});
                else {
                    st.diag.dropped_tokens += 1;
                    st.diag.repairs.push_back("empty entity <ne:" + t.payload + "> dropped");
                }
                open.erase(std::next(it).base());
                break;
            }
            case TokenClass::start:
            case TokenClass::pad:
            case TokenClass::blank:
                st.diag.dropped_tokens += 1;
                st.diag.repairs.push_back("unexpected " + token_class_str(t.cls, t.payload) + " dropped");
                break;
            case TokenClass::end:
                break;  // unreachable
        }
    }
    while (!st.stack.empty()) st.close_top(true);
    std::sort(st.doc.entities.begin(), st.doc.entities.end(), [](const Entity& a, const Entity& b) {
        return std::tuple(a.block, a.begin, a.end, a.category) <
               std::tuple(b.block, b.begin, b.end, b.category);
    });
    return {std::move(st.doc), std::move(st.diag)};
}

}  // namespace scriv::codec
