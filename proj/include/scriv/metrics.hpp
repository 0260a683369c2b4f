// SPDX-License-Identifier: Apache-2.0
//
// Evaluation suite. All functions are pure; dataset aggregation is
// micro-averaged (total distance over total reference mass).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scriv/document.hpp"

namespace scriv::metrics {

// Special-token-free page text: block texts in reading order joined by '\n'.
std::string document_text(const Document& doc);

// Levenshtein over Unicode scalar values / |gt|. Empty gt is undefined.
double cer(const std::string& pred, const std::string& gt);
// Word-level Levenshtein / |gt words|; words are maximal non-space runs.
double wer(const std::string& pred, const std::string& gt);

struct EvalPair {
    Document pred;
    Document gt;
};

struct TextScore {
    double value = 0;
    int64_t distance = 0;
    int64_t reference = 0;  // gt mass the distance is normalized by
};

// Pages with empty references are excluded (counted in skipped).
struct DatasetText {
    double cer = 0;
    double wer = 0;
    int64_t pages = 0;
    int64_t skipped = 0;
};
DatasetText dataset_text_scores(const std::vector<EvalPair>& pairs);

// Ordered-tree edit distance (unit costs) between the class-labeled layout
// trees, normalized by n_nodes + n_edges of the ground truth (root excluded
// from the node count).
int64_t tree_edit_distance(const LayoutTree& a, const LayoutTree& b);
double loer(const LayoutTree& pred, const LayoutTree& gt);
double loer(const Document& pred, const Document& gt);

// Mean average precision over CER thresholds 5%..50% step 5.
// Per class: predictions ranked in reading order, each gated-matched to the
// lowest-CER unmatched gt block; TP iff that CER <= threshold. Class APs are
// weighted by gt character count. Returned as a percentage.
double map_cer(const Document& pred, const Document& gt);

struct CategoryScore {
    std::string category;
    int64_t matched = 0;
    int64_t predicted = 0;
    int64_t reference = 0;
    double precision = 0, recall = 0, f1 = 0;
};

struct EntityF1 {
    double precision = 0, recall = 0, f1 = 0;
    int64_t matched = 0, predicted = 0, reference = 0;
    std::vector<CategoryScore> per_category;
};

// Character-alignment span matching with a 30% surface-CER gate:
// project gt spans through the page-text alignment, require category
// equality, overlap, and surface CER <= 0.30; match greedily by ascending
// CER, one-to-one.
EntityF1 entity_f1(const Document& pred, const Document& gt, double cer_threshold = 0.30);

struct PageReport {
    std::string id;
    double cer = 0, wer = 0, loer = 0, map_cer = 0;
    std::optional<double> f1;
};

struct EvaluationReport {
    std::vector<PageReport> pages;
    DatasetText text;
    double loer = 0;
    double map_cer = 0;
    std::optional<EntityF1> entities;
    std::string to_text() const;  // percentages, two decimals
};

EvaluationReport evaluate_dataset(const std::vector<EvalPair>& pairs, const std::vector<std::string>& ids,
                                  bool with_entities);

}  // namespace scriv::metrics
