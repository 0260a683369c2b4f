// SPDX-License-Identifier: Apache-2.0
//
// Error injection for teacher forcing: each subword maps to the replacement
// candidates whose CER against it stays under a length-dependent threshold,
// and decoder-input tokens are stochastically substituted from those lists.
#pragma once

#include "scriv/common.hpp"
#include "scriv/vocab.hpp"

namespace scriv {

// Piecewise CER threshold by subword length (Unicode scalar values):
// 1.5 for length <= 2, 0.7 at 3, 0.5 for 3 < length < 9, 0.6 for length >= 9.
double thresh_cer(const std::string& surface);

// Levenshtein(x, y) / len(x), unit costs over Unicode scalar values.
double subword_cer(const std::string& x, const std::string& y);

struct NoiseConfig {
    double error_rate = 0.30;
    uint64_t seed = 0;
};

class CandidateTable {
public:
    // candidates(x) = { y != x, y plain, not the line-break surrogate :
    // subword_cer(x, y) < thresh_cer(x) }, exhaustive over the vocabulary.
    static CandidateTable build(const Vocabulary& vocab);

    const std::vector<int>& candidates(int id) const;
    int64_t total_candidates() const;
    double mean_surface_length() const { return mean_surface_length_; }
    uint64_t vocab_fingerprint() const { return vocab_fingerprint_; }

    // Binary cache: magic, vocab fingerprint, adjacency lists. Loading with a
    // mismatched vocabulary fails.
    void save(const std::string& path) const;
    static CandidateTable load(const std::string& path, const Vocabulary& vocab);

private:
    std::vector<std::vector<int>> lists_;
    double mean_surface_length_ = 0;
    uint64_t vocab_fingerprint_ = 0;
};

// Independently replaces each plain token that has candidates with
// probability error_rate by a uniform draw from its list. Special tokens and
// empty-candidate tokens pass through. Length-preserving, seed-deterministic.
std::vector<int> inject_errors(const std::vector<int>& ids, const CandidateTable& table,
                               const Vocabulary& vocab, const NoiseConfig& config);

// Same, threading an external stream (parallel generators own their streams).
std::vector<int> inject_errors(const std::vector<int>& ids, const CandidateTable& table,
                               const Vocabulary& vocab, double error_rate, Rng& rng);

}  // namespace scriv
