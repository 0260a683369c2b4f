// SPDX-License-Identifier: Apache-2.0
//
// Pluggable named-entity annotators for the synthetic data pipeline: a
// deterministic gazetteer + rule annotator for desk-scale runs, and a reader
// that ingests externally produced annotation files.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scriv/common.hpp"

namespace scriv {

struct SpanAnnotation {
    int64_t begin = 0;  // [begin, end) in Unicode scalar values
    int64_t end = 0;
    std::string category;
};

class Annotator {
public:
    virtual ~Annotator() = default;
    // Deterministic, non-overlapping spans inside text.
    virtual std::vector<SpanAnnotation> annotate(const std::string& text) const = 0;
};

// Gazetteer surface matching (longest match first, word boundaries) plus two
// pattern rules: four-digit tokens in 1000..2100 are DATE, other digit runs
// are CARDINAL.
class GazetteerAnnotator : public Annotator {
public:
    // file format: category<TAB>surface per line
    static GazetteerAnnotator load(const std::string& path);
    static GazetteerAnnotator from_text(const std::string& text);
    std::vector<SpanAnnotation> annotate(const std::string& text) const override;
    std::vector<std::string> categories() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;  // surface, category
};

// Reads `begin<TAB>end<TAB>category` lines produced by an external annotator
// (one file per text). Spans are validated against the text.
class FileAnnotator : public Annotator {
public:
    explicit FileAnnotator(std::string path) : path_(std::move(path)) {}
    std::vector<SpanAnnotation> annotate(const std::string& text) const override;

private:
    std::string path_;
};

}  // namespace scriv
