// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scriv {

// Error kinds map onto CLI exit codes: usage -> 2, data -> 3, numeric -> 4.
enum class ErrorKind { usage, data, numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Shape/axis disagreement between tensors.
struct DimensionError : Error {
    explicit DimensionError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// Value outside the operation's domain (bad id, empty surface, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// API misuse: broken precondition that is a programming error, not bad data.
struct ContractError : Error {
    explicit ContractError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// NaN/Inf encountered in a forward value or gradient.
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(ErrorKind::numeric, m) {}
};
// Bad configuration file, preset, or flag combination.
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorKind::usage, m) {}
};
// Text contains a character the vocabulary cannot segment.
struct CoverageError : Error {
    explicit CoverageError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// Font cannot be measured or rendered.
struct FontError : Error {
    explicit FontError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// Page synthesis failed after exhausting the retry budget.
struct GenerationError : Error {
    explicit GenerationError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// File missing/unreadable/corrupt.
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorKind::data, m) {}
};
// CTC target cannot be emitted in the available frames.
struct InfeasibleTargetError : DomainError {
    explicit InfeasibleTargetError(const std::string& m) : DomainError(m) {}
};

// Deterministic RNG. Distribution code is hand-rolled on top of mt19937_64 so
// that streams are identical across standard libraries, not just across runs.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : eng_(seed), seed_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x = eng_();
        while (x >= limit) x = eng_();
        return x % n;
    }

    int index(size_t n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Independent child stream; used to give sample i its own stream so that
    // generation order does not depend on worker interleaving.
    Rng fork(uint64_t salt) const { return Rng(mix64(seed_ ^ mix64(salt))); }

    uint64_t seed() const { return seed_; }

    static uint64_t mix64(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 eng_;
    uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// ---- UTF-8 ----
// Decoding rejects malformed input with DomainError; all text-facing modules
// operate on Unicode scalar values.

std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(const std::vector<char32_t>& cps);
std::string utf8_encode_one(char32_t cp);
size_t utf8_length(std::string_view s);

// ---- small string helpers ----

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// FNV-1a over bytes; used for config hashes and cache keys.
uint64_t fnv1a(std::string_view bytes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace scriv
