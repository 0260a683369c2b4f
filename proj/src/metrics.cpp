// SPDX-License-Identifier: Apache-2.0
#include "scriv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "scriv/editdist.hpp"

namespace scriv::metrics {

std::string document_text(const Document& doc) {
    std::string out;
    bool first = true;
    for (size_t b = 0; b < doc.blocks.size(); ++b) {
        if (doc.blocks[b].lines.empty()) continue;
        if (!first) out += '\n';
        out += doc.block_text(static_cast<int>(b));
        first = false;
    }
    return out;
}

namespace {

std::vector<std::string> words_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char32_t cp : utf8_decode(text)) {
        if (cp == U' ' || cp == U'\n' || cp == U'\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += utf8_encode_one(cp);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

double cer(const std::string& pred, const std::string& gt) {
    const auto g = utf8_decode(gt);
    if (g.empty()) throw DomainError("cer: empty reference text (page should be excluded)");
    const auto p = utf8_decode(pred);
    return static_cast<double>(levenshtein(p, g)) / static_cast<double>(g.size());
}

double wer(const std::string& pred, const std::string& gt) {
    const auto g = words_of(gt);
    if (g.empty()) throw DomainError("wer: empty reference text (page should be excluded)");
    const auto p = words_of(pred);
    return static_cast<double>(levenshtein(p, g)) / static_cast<double>(g.size());
}

DatasetText dataset_text_scores(const std::vector<EvalPair>& pairs) {
    DatasetText out;
    int64_t char_dist = 0, char_ref = 0, word_dist = 0, word_ref = 0;
    for (const auto& pair : pairs) {
        const auto gt_text = document_text(pair.gt);
        const auto g = utf8_decode(gt_text);
        const auto gw = words_of(gt_text);
        if (g.empty() || gw.empty()) {
            out.skipped += 1;  // undefined ratio, warn upstream
            continue;
        }
        const auto pred_text = document_text(pair.pred);
        char_dist += levenshtein(utf8_decode(pred_text), g);
        char_ref += static_cast<int64_t>(g.size());
        word_dist += levenshtein(words_of(pred_text), gw);
        word_ref += static_cast<int64_t>(gw.size());
        out.pages += 1;
    }
    out.cer = char_ref ? static_cast<double>(char_dist) / static_cast<double>(char_ref) : 0.0;
    out.wer = word_ref ? static_cast<double>(word_dist) / static_cast<double>(word_ref) : 0.0;
    return out;
}

// ---- mAP over CER thresholds ----

namespace {

struct ScoredBlock {
    std::string cls;
    std::vector<char32_t> text;
};

std::vector<ScoredBlock> text_blocks(const Document& doc) {
    std::vector<ScoredBlock> out;
    for (size_t b = 0; b < doc.blocks.size(); ++b) {
        if (doc.blocks[b].lines.empty()) continue;  // containers carry no text
        out.push_back({doc.blocks[b].layout_class, utf8_decode(doc.block_text(static_cast<int>(b)))});
    }
    return out;
}

}  // namespace

double map_cer(const Document& pred, const Document& gt) {
    const auto pred_blocks = text_blocks(pred);
    const auto gt_blocks = text_blocks(gt);
    std::map<std::string, std::vector<int>> gt_by_class, pred_by_class;
    for (size_t i = 0; i < gt_blocks.size(); ++i) gt_by_class[gt_blocks[i].cls].push_back(static_cast<int>(i));
    for (size_t i = 0; i < pred_blocks.size(); ++i)
        pred_by_class[pred_blocks[i].cls].push_back(static_cast<int>(i));

    double weighted = 0, weight_sum = 0;
    for (const auto& [cls, gts] : gt_by_class) {
        int64_t char_weight = 0;
        for (int g : gts) char_weight += static_cast<int64_t>(gt_blocks[static_cast<size_t>(g)].text.size());
        if (char_weight == 0) char_weight = 1;  // all-empty reference blocks still count
        const auto preds_it = pred_by_class.find(cls);
        const std::vector<int> empty;
        const auto& preds = preds_it == pred_by_class.end() ? empty : preds_it->second;
        // CER of every (pred, gt) pair within the class
        std::vector<std::vector<double>> pair_cer(preds.size(), std::vector<double>(gts.size(), 1e9));
        for (size_t p = 0; p < preds.size(); ++p)
            for (size_t g = 0; g < gts.size(); ++g) {
                const auto& gt_text = gt_blocks[static_cast<size_t>(gts[g])].text;
                const auto& pred_text = pred_blocks[static_cast<size_t>(preds[p])].text;
                if (gt_text.empty())
                    pair_cer[p][g] = pred_text.empty() ? 0.0 : 1e9;
                else
                    pair_cer[p][g] = static_cast<double>(levenshtein(pred_text, gt_text)) /
                                     static_cast<double>(gt_text.size());
            }
        double ap_sum = 0;
        for (int tpct = 5; tpct <= 50; tpct += 5) {
            const double t = static_cast<double>(tpct) / 100.0 + 1e-12;
            std::vector<bool> taken(gts.size(), false);
            int64_t tp = 0;
            double ap = 0;
            for (size_t p = 0; p < preds.size(); ++p) {
                int best = -1;
                for (size_t g = 0; g < gts.size(); ++g) {
                    if (taken[g] || pair_cer[p][g] > t) continue;
                    if (best < 0 || pair_cer[p][g] < pair_cer[p][static_cast<size_t>(best)])
                        best = static_cast<int>(g);
                }
                if (best >= 0) {
                    taken[static_cast<size_t>(best)] = true;
                    ++tp;
                    ap += static_cast<double>(tp) / static_cast<double>(p + 1);  // precision at this rank
                }
            }
            ap_sum += gts.empty() ? 0.0 : ap / static_cast<double>(gts.size());
        }
        weighted += static_cast<double>(char_weight) * (ap_sum / 10.0);
        weight_sum += static_cast<double>(char_weight);
    }
    if (weight_sum == 0) return pred_blocks.empty() ? 100.0 : 0.0;
    return 100.0 * weighted / weight_sum;
}

// ---- entity F1 ----

namespace {

struct PlacedEntity {
    std::string category;
    int64_t begin = 0, end = 0;  // global page-text offsets
    std::vector<char32_t> surface;
};

std::vector<PlacedEntity> place_entities(const Document& doc) {
    // global offset of each block's text within document_text(doc)
    std::vector<int64_t> block_offset(doc.blocks.size(), -1);
    int64_t off = 0;
    bool first = true;
    for (size_t b = 0; b < doc.blocks.size(); ++b) {
        if (doc.blocks[b].lines.empty()) continue;
        if (!first) off += 1;  // joining '\n'
        block_offset[b] = off;
        off += static_cast<int64_t>(utf8_length(doc.block_text(static_cast<int>(b))));
        first = false;
    }
    std::vector<PlacedEntity> out;
    for (const auto& e : doc.entities) {
        if (block_offset[static_cast<size_t>(e.block)] < 0) continue;
        PlacedEntity pe;
        pe.category = e.category;
        pe.begin = block_offset[static_cast<size_t>(e.block)] + e.begin;
        pe.end = block_offset[static_cast<size_t>(e.block)] + e.end;
        const auto text = utf8_decode(doc.block_text(e.block));
        pe.surface.assign(text.begin() + static_cast<ptrdiff_t>(e.begin),
                          text.begin() + static_cast<ptrdiff_t>(e.end));
        out.push_back(std::move(pe));
    }
    return out;
}

}  // namespace

EntityF1 entity_f1(const Document& pred, const Document& gt, double cer_threshold) {
    const auto pred_entities = place_entities(pred);
    const auto gt_entities = place_entities(gt);
    const auto pred_text = utf8_decode(document_text(pred));
    const auto gt_text = utf8_decode(document_text(gt));

    // map each gt position to its aligned pred position (-1 where deleted)
    std::vector<int64_t> gt_to_pred(gt_text.size(), -1);
    {
        const auto script = edit_script(pred_text, gt_text);
        int64_t i = 0, j = 0;
        for (EditOp op : script) {
            switch (op) {
                case EditOp::match:
                case EditOp::substitute:
                    gt_to_pred[static_cast<size_t>(j)] = i;
                    ++i;
                    ++j;
                    break;
                case EditOp::delete_a: ++i; break;   // pred char unmatched
                case EditOp::insert_b: ++j; break;   // gt char unmatched
            }
        }
    }

    struct Candidate {
        double cer;
        size_t p, g;
    };
    std::vector<Candidate> candidates;
    for (size_t g = 0; g < gt_entities.size(); ++g) {
        // projected pred-coordinate span of this gt entity
        int64_t lo = -1, hi = -1;
        for (int64_t j = gt_entities[g].begin; j < gt_entities[g].end; ++j) {
            const int64_t mapped = gt_to_pred[static_cast<size_t>(j)];
            if (mapped < 0) continue;
            if (lo < 0) lo = mapped;
            hi = mapped + 1;
        }
        if (lo < 0) continue;  // fully deleted, nothing can overlap
        for (size_t p = 0; p < pred_entities.size(); ++p) {
            if (pred_entities[p].category != gt_entities[g].category) continue;
            if (pred_entities[p].end <= lo || pred_entities[p].begin >= hi) continue;
            if (gt_entities[g].surface.empty()) continue;
            const double c = static_cast<double>(levenshtein(pred_entities[p].surface,
                                                             gt_entities[g].surface)) /
                             static_cast<double>(gt_entities[g].surface.size());
            if (c <= cer_threshold + 1e-12) candidates.push_back({c, p, g});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.cer != b.cer ? a.cer < b.cer : std::tie(a.p, a.g) < std::tie(b.p, b.g);
    });
    std::vector<bool> p_used(pred_entities.size(), false), g_used(gt_entities.size(), false);
    std::map<std::string, CategoryScore> per_cat;
    for (const auto& e : pred_entities) per_cat[e.category].predicted += 1;
    for (const auto& e : gt_entities) per_cat[e.category].reference += 1;
    int64_t matched = 0;
    for (const auto& c : candidates) {
        if (p_used[c.p] || g_used[c.g]) continue;
        p_used[c.p] = true;
        g_used[c.g] = true;
        ++matched;
        per_cat[pred_entities[c.p].category].matched += 1;
    }

    auto finish = [](int64_t m, int64_t p, int64_t g, double& prec, double& rec, double& f1) {
        prec = p ? static_cast<double>(m) / static_cast<double>(p) : 1.0;
        rec = g ? static_cast<double>(m) / static_cast<double>(g) : 1.0;
        f1 = (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    };
    EntityF1 out;
    out.matched = matched;
    out.predicted = static_cast<int64_t>(pred_entities.size());
    out.reference = static_cast<int64_t>(gt_entities.size());
    finish(out.matched, out.predicted, out.reference, out.precision, out.recall, out.f1);
    for (auto& [cat, score] : per_cat) {
        score.category = cat;
        finish(score.matched, score.predicted, score.reference, score.precision, score.recall, score.f1);
        out.per_category.push_back(score);
    }
    return out;
}

// ---- reports ----

namespace {
std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
    return buf;
}
std::string pct_raw(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}
}  // namespace

EvaluationReport evaluate_dataset(const std::vector<EvalPair>& pairs, const std::vector<std::string>& ids,
                                  bool with_entities) {
    EvaluationReport report;
    report.text = dataset_text_scores(pairs);
    double loer_dist = 0, loer_norm = 0;
    double map_weighted = 0, map_weight = 0;
    int64_t ent_m = 0, ent_p = 0, ent_g = 0;
    std::map<std::string, CategoryScore> cats;
    for (size_t i = 0; i < pairs.size(); ++i) {
        PageReport page;
        page.id = i < ids.size() ? ids[i] : std::to_string(i);
        const auto gt_text = document_text(pairs[i].gt);
        if (!gt_text.empty()) {
            page.cer = cer(document_text(pairs[i].pred), gt_text);
            page.wer = wer(document_text(pairs[i].pred), gt_text);
        }
        page.loer = loer(pairs[i].pred, pairs[i].gt);
        page.map_cer = map_cer(pairs[i].pred, pairs[i].gt);
        const auto gt_tree = layout_tree(pairs[i].gt);
        const double norm = static_cast<double>(2 * gt_tree.size_without_root());
        loer_dist += static_cast<double>(tree_edit_distance(layout_tree(pairs[i].pred), gt_tree));
        loer_norm += norm;
        const double chars = static_cast<double>(utf8_length(gt_text));
        map_weighted += page.map_cer * (chars > 0 ? chars : 1.0);
        map_weight += chars > 0 ? chars : 1.0;
        if (with_entities) {
            auto ef = entity_f1(pairs[i].pred, pairs[i].gt);
            page.f1 = ef.f1;
            ent_m += ef.matched;
            ent_p += ef.predicted;
            ent_g += ef.reference;
            for (const auto& c : ef.per_category) {
                auto& acc = cats[c.category];
                acc.category = c.category;
                acc.matched += c.matched;
                acc.predicted += c.predicted;
                acc.reference += c.reference;
            }
        }
        report.pages.push_back(page);
    }
    report.loer = loer_norm > 0 ? loer_dist / loer_norm : 0.0;
    report.map_cer = map_weight > 0 ? map_weighted / map_weight : 0.0;
    if (with_entities) {
        EntityF1 total;
        total.matched = ent_m;
        total.predicted = ent_p;
        total.reference = ent_g;
        auto finish = [](CategoryScore& s) {
            s.precision = s.predicted ? static_cast<double>(s.matched) / static_cast<double>(s.predicted) : 1.0;
            s.recall = s.reference ? static_cast<double>(s.matched) / static_cast<double>(s.reference) : 1.0;
            s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
        };
        total.precision = ent_p ? static_cast<double>(ent_m) / static_cast<double>(ent_p) : 1.0;
        total.recall = ent_g ? static_cast<double>(ent_m) / static_cast<double>(ent_g) : 1.0;
        total.f1 = (total.precision + total.recall) > 0
                       ? 2 * total.precision * total.recall / (total.precision + total.recall)
                       : 0.0;
        for (auto& [name, c] : cats) {
            finish(c);
            total.per_category.push_back(c);
        }
        report.entities = total;
    }
    return report;
}

std::string EvaluationReport::to_text() const {
    std::ostringstream out;
    out << "page\tcer%\twer%\tloer%\tmap_cer%\tf1%\n";
    for (const auto& p : pages) {
        out << p.id << "\t" << pct(p.cer) << "\t" << pct(p.wer) << "\t" << pct(p.loer) << "\t"
            << pct_raw(p.map_cer) << "\t" << (p.f1 ? pct(*p.f1) : std::string("-")) << "\n";
    }
    out << "pages\t" << text.pages << "\n";
    if (text.skipped) out << "skipped_empty_reference\t" << text.skipped << "\n";
    out << "dataset_cer%\t" << pct(text.cer) << "\n";
    out << "dataset_wer%\t" << pct(text.wer) << "\n";
    out << "dataset_loer%\t" << pct(loer) << "\n";
    out << "dataset_map_cer%\t" << pct_raw(map_cer) << "\n";
    if (entities) {
        out << "entity_precision%\t" << pct(entities->precision) << "\n";
        out << "entity_recall%\t" << pct(entities->recall) << "\n";
        out << "entity_f1%\t" << pct(entities->f1) << "\n";
        out << "category\tmatched\tpredicted\treference\tprecision%\trecall%\tf1%\n";
        for (const auto& c : entities->per_category)
            out << c.category << "\t" << c.matched << "\t" << c.predicted << "\t" << c.reference << "\t"
                << pct(c.precision) << "\t" << pct(c.recall) << "\t" << pct(c.f1) << "\n";
    }
    return out.str();
}

}  // namespace scriv::metrics
