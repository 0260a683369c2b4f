// SPDX-License-Identifier: Apache-2.0
#include "scriv/noise.hpp"

#include <cstring>
#include <fstream>

#include "scriv/editdist.hpp"

namespace scriv {

double thresh_cer(const std::string& surface) {
    const size_t len = utf8_length(surface);
    if (len == 0) throw DomainError("thresh_cer: empty surface");
    if (len <= 2) return 1.5;
    if (len == 3) return 0.7;
    if (len < 9) return 0.5;
    return 0.6;
}

double subword_cer(const std::string& x, const std::string& y) {
    const auto xa = utf8_decode(x);
    if (xa.empty()) throw DomainError("subword_cer: empty reference");
    const auto ya = utf8_decode(y);
    return static_cast<double>(levenshtein(xa, ya)) / static_cast<double>(xa.size());
}

CandidateTable CandidateTable::build(const Vocabulary& vocab) {
    CandidateTable table;
    table.vocab_fingerprint_ = vocab.fingerprint();
    table.lists_.resize(static_cast<size_t>(vocab.size()));
    const int nl = vocab.line_break_id();
    std::vector<int> plain_ids;
    double length_sum = 0;
    int64_t plain_count = 0;
    for (const auto& t : vocab.entries()) {
        if (t.cls != TokenClass::plain || t.id == nl) continue;
        plain_ids.push_back(t.id);
        length_sum += static_cast<double>(vocab.surface_u32(t.id).size());
        ++plain_count;
    }
    table.mean_surface_length_ = plain_count ? length_sum / static_cast<double>(plain_count) : 0;
    for (int x : plain_ids) {
        const auto& xs = vocab.surface_u32(x);
        const double limit = thresh_cer(vocab.token(x).surface) * static_cast<double>(xs.size());
        auto& list = table.lists_[static_cast<size_t>(x)];
        for (int y : plain_ids) {
            if (y == x) continue;
            const auto& ys = vocab.surface_u32(y);
            // distance is at least the length gap; skip hopeless pairs early
            const auto gap = xs.size() > ys.size() ? xs.size() - ys.size() : ys.size() - xs.size();
            if (static_cast<double>(gap) >= limit) continue;
            if (static_cast<double>(levenshtein(xs, ys)) < limit) list.push_back(y);
        }
    }
    return table;
}

const std::vector<int>& CandidateTable::candidates(int id) const {
    if (id < 0 || id >= static_cast<int>(lists_.size()))
        throw DomainError("candidate table: id " + std::to_string(id) + " out of range");
    return lists_[static_cast<size_t>(id)];
}

int64_t CandidateTable::total_candidates() const {
    int64_t n = 0;
    for (const auto& l : lists_) n += static_cast<int64_t>(l.size());
    return n;
}

namespace {
constexpr char kCacheMagic[4] = {'S', 'C', 'N', 'T'};
}

void CandidateTable::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write(kCacheMagic, 4);
    const uint64_t fp = vocab_fingerprint_;
    f.write(reinterpret_cast<const char*>(&fp), sizeof fp);
    const uint64_t n = lists_.size();
    f.write(reinterpret_cast<const char*>(&n), sizeof n);
    f.write(reinterpret_cast<const char*>(&mean_surface_length_), sizeof mean_surface_length_);
    for (const auto& list : lists_) {
        const uint32_t len = static_cast<uint32_t>(list.size());
        f.write(reinterpret_cast<const char*>(&len), sizeof len);
        f.write(reinterpret_cast<const char*>(list.data()), static_cast<std::streamsize>(len * sizeof(int)));
    }
    if (!f) throw IoError("short write to " + path);
}

CandidateTable CandidateTable::load(const std::string& path, const Vocabulary& vocab) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kCacheMagic, 4) != 0)
        throw IoError("candidate cache: bad magic in " + path);
    CandidateTable table;
    f.read(reinterpret_cast<char*>(&table.vocab_fingerprint_), sizeof table.vocab_fingerprint_);
    if (table.vocab_fingerprint_ != vocab.fingerprint())
        throw ConfigError("candidate cache: built from a different vocabulary");
    uint64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof n);
    f.read(reinterpret_cast<char*>(&table.mean_surface_length_), sizeof table.mean_surface_length_);
    if (n != static_cast<uint64_t>(vocab.size())) throw IoError("candidate cache: size mismatch");
    table.lists_.resize(n);
    for (auto& list : table.lists_) {
        uint32_t len = 0;
        f.read(reinterpret_cast<char*>(&len), sizeof len);
        list.resize(len);
        f.read(reinterpret_cast<char*>(list.data()), static_cast<std::streamsize>(len * sizeof(int)));
    }
    if (!f) throw IoError("candidate cache: truncated file " + path);
    return table;
}

std::vector<int> inject_errors(const std::vector<int>& ids, const CandidateTable& table,
                               const Vocabulary& vocab, double error_rate, Rng& rng) {
    if (error_rate < 0.0 || error_rate > 1.0)
        throw DomainError("inject_errors: error rate outside [0, 1]");
    if (table.vocab_fingerprint() != vocab.fingerprint())
        throw ContractError("inject_errors: table built from a different vocabulary");
    std::vector<int> out;
    out.reserve(ids.size());
    for (int id : ids) {
        const auto& t = vocab.token(id);
        const auto& cands = table.candidates(id);
        if (t.cls != TokenClass::plain || cands.empty() || !rng.bernoulli(error_rate)) {
            out.push_back(id);
            continue;
        }
        out.push_back(cands[static_cast<size_t>(rng.index(cands.size()))]);
    }
    return out;
}

std::vector<int> inject_errors(const std::vector<int>& ids, const CandidateTable& table,
                               const Vocabulary& vocab, const NoiseConfig& config) {
    Rng rng(config.seed);
    return inject_errors(ids, table, vocab, config.error_rate, rng);
}

}  // namespace scriv
