// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scriv/codec.hpp"
#include "scriv/synthgen.hpp"

using namespace scriv;
using namespace scriv::synth;

namespace {

Corpus corpus() { return Corpus::load(std::string(SCRIV_DATA_DIR) + "/corpus_en.txt"); }

Generator make_generator(Family family, uint64_t seed, int l_max = 12, bool entities = false,
                         const Annotator* annotator = nullptr) {
    GenConfig cfg;
    cfg.family = family;
    cfg.l_max = l_max;
    cfg.seed = seed;
    cfg.with_entities = entities;
    return Generator(corpus(), FontPool::builtin(), cfg, annotator);
}

}  // namespace

TEST_CASE("normalize_font: reference phrase lands at the reference width") {
    FontSpec f;
    f.style = FontStyle::printed;
    auto normalized = normalize_font(f);
    const double w = measure_text(normalized, kNormalizationPhrase);
    CHECK(std::fabs(w - kNormalizationWidth) / kNormalizationWidth < 0.10);

    // font rendering 2x too wide: spacing doubles the advance
    FontSpec wide = f;
    wide.spacing = 2.0;
    auto norm_wide = normalize_font(wide);
    CHECK(norm_wide.normalization == doctest::Approx(normalize_font(f).normalization / 2.0).epsilon(1e-9));
    CHECK(std::fabs(measure_text(norm_wide, kNormalizationPhrase) - kNormalizationWidth) /
              kNormalizationWidth <
          0.10);

    // already at reference width: factor 1
    FontSpec exact = f;
    exact.normalization = 1.0;
    const double base = measure_text(exact, kNormalizationPhrase);
    exact.spacing = kNormalizationWidth * (exact.size / 24.0) / base;
    CHECK(normalize_font(exact).normalization == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("normalized fonts agree on the test phrase within 10%") {
    auto pool = FontPool::builtin();
    std::vector<double> widths;
    for (const auto& f : pool.handwritten) widths.push_back(measure_text(f, kNormalizationPhrase));
    for (const auto& f : pool.printed) widths.push_back(measure_text(f, kNormalizationPhrase));
    for (double a : widths)
        for (double b : widths) CHECK(std::fabs(a - b) / b < 0.10);
}

TEST_CASE("sample_font: 80/20 style mix within 1% over 1e5 draws") {
    auto pool = FontPool::builtin();
    Rng rng(314);
    int64_t handwritten = 0;
    std::vector<bool> seen(pool.handwritten.size() + pool.printed.size(), false);
    for (int i = 0; i < 100000; ++i) {
        auto f = sample_font(rng, pool);
        if (f.style == FontStyle::handwritten) ++handwritten;
        seen[static_cast<size_t>(f.glyph_variant == 6 ? pool.handwritten.size() + 1
                                 : f.style == FontStyle::printed ? pool.handwritten.size()
                                                                 : static_cast<size_t>(f.glyph_variant - 1))] =
            true;
    }
    const double frac = static_cast<double>(handwritten) / 1e5;
    CHECK(frac > 0.79);
    CHECK(frac < 0.81);
    for (bool s : seen) CHECK(s);  // every pool member eventually sampled

    // identical seeds give identical draw sequences
    Rng a(9), b(9);
    for (int i = 0; i < 50; ++i) {
        auto fa = sample_font(a, pool);
        auto fb = sample_font(b, pool);
        CHECK(fa.size == fb.size);
        CHECK(fa.glyph_variant == fb.glyph_variant);
    }

    FontPool broken;
    broken.handwritten = pool.handwritten;
    CHECK_THROWS_AS(sample_font(rng, broken), ConfigError);
}

TEST_CASE("draw_text: budget bound and corpus continuity") {
    auto gen = make_generator(Family::paragraph, 11);
    Rng rng(1);
    auto plan = gen.draw_text(rng, 1);
    int64_t lines = 0;
    for (const auto& b : plan.blocks) lines += static_cast<int64_t>(b.lines.size());
    CHECK(lines == 1);

    // consecutive lines of a block are consecutive in the corpus
    Rng rng2(2);
    auto plan2 = gen.draw_text(rng2, 8);
    std::string corpus_text;
    for (const auto& w : gen.corpus().words()) {
        corpus_text += w;
        corpus_text += ' ';
    }
    corpus_text += corpus_text;  // wrap-around window
    for (const auto& block : plan2.blocks) {
        if (block.container || block.lines.empty()) continue;
        std::string joined;
        for (size_t i = 0; i < block.lines.size(); ++i) {
            if (i) joined += ' ';
            joined += block.lines[i];
        }
        CHECK(corpus_text.find(joined) != std::string::npos);
    }
}

TEST_CASE("draw_text: mail blocks hit their sampled line/word targets exactly") {
    auto gen = make_generator(Family::mail, 21, 40);
    for (uint64_t trial = 0; trial < 20; ++trial) {
        Rng rng(trial);
        auto plan = gen.draw_text(rng, 40);
        for (const auto& block : plan.blocks) {
            if (block.target_words <= 0) continue;
            CHECK(static_cast<int>(block.lines.size()) == block.target_lines);
            int words = 0;
            for (const auto& line : block.lines) words += static_cast<int>(split(line, ' ').size());
            CHECK(words == block.target_words);
        }
    }
}

TEST_CASE("corpus shorter than the request wraps around with a flag") {
    auto tiny = Corpus::from_text("alpha beta gamma");
    Rng rng(3);
    bool wrapped = false;
    auto words = tiny.excerpt(rng, 7, &wrapped);
    CHECK(words.size() == 7);
    CHECK(wrapped);
}

TEST_CASE("render_page: crop, label fidelity, reading order") {
    for (Family family : {Family::paragraph, Family::mail, Family::nested, Family::margin}) {
        auto gen = make_generator(family, 77, family == Family::paragraph ? 2 : 6);
        auto sample = gen.page(0);
        CHECK(sample.image.height < gen.config().page_height);  // crop applied
        CHECK(sample.image.height >= 32);
        CHECK(sample.label.line_count() <= 6);
        sample.label.validate();
        // every label serializes through the codec
        DeskVocabSpec spec;
        spec.layout_classes = family_layout_classes(family);
        auto vocab = build_desk_vocabulary(read_text_file(std::string(SCRIV_DATA_DIR) + "/corpus_en.txt"), spec);
        auto ids = codec::serialize(sample.label, {"htr"}, vocab);
        auto [back, diag] = codec::parse(ids, vocab);
        CHECK(diag.total_repairs() == 0);
        CHECK(back == sample.label);
    }
    // margin family: A precedes body in reading order, rendered left of it
    auto gen = make_generator(Family::margin, 5, 8);
    auto sample = gen.page(3);
    REQUIRE(sample.label.blocks.size() >= 2);
    CHECK(sample.label.blocks[0].layout_class == "margin_a");
    CHECK(sample.label.blocks[1].layout_class == "body");
}

TEST_CASE("generation is deterministic given (template, seed)") {
    auto a = make_generator(Family::mail, 99, 8).page(4);
    auto b = make_generator(Family::mail, 99, 8).page(4);
    CHECK(a.label == b.label);
    REQUIRE(a.image.pixels.size() == b.image.pixels.size());
    CHECK(a.image.pixels == b.image.pixels);  // bit-identical
    auto c = make_generator(Family::mail, 100, 8).page(4);
    CHECK(c.image.pixels != a.image.pixels);
}

TEST_CASE("curriculum bound: line count never exceeds the budget") {
    auto gen = make_generator(Family::mail, 123, 40);
    for (int budget : {1, 2, 3, 5, 9}) {
        for (uint64_t i = 0; i < 5; ++i) {
            auto sample = gen.page_with_budget(i, budget);
            CHECK(sample.label.line_count() <= budget);
            CHECK(sample.label.line_count() >= 1);
        }
    }
}

TEST_CASE("entities: gazetteer annotations project onto labels") {
    auto annotator = GazetteerAnnotator::load(std::string(SCRIV_DATA_DIR) + "/gazetteer.tsv");
    auto gen = make_generator(Family::paragraph, 31, 10, true, &annotator);
    int entity_pages = 0;
    for (uint64_t i = 0; i < 20; ++i) {
        auto sample = gen.page_with_budget(i, 10);
        sample.label.validate();
        if (!sample.label.entities.empty()) ++entity_pages;
    }
    CHECK(entity_pages > 5);  // the corpus is full of names and years

    // margin family labels stay HTR-only even with an annotator configured
    auto margin_gen = make_generator(Family::margin, 31, 8, true, &annotator);
    for (uint64_t i = 0; i < 10; ++i) CHECK(margin_gen.page(i).label.entities.empty());
}

TEST_CASE("annotator worked examples") {
    auto g = GazetteerAnnotator::from_text("PER\tAnne\nPER\tBob\n");
    auto spans = g.annotate("Anne met Bob.");
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].begin == 0);
    CHECK(spans[0].end == 4);
    CHECK(spans[0].category == "PER");
    CHECK(spans[1].begin == 9);
    CHECK(spans[1].end == 12);

    auto dates = g.annotate("born in 1880");
    REQUIRE(dates.size() == 1);
    CHECK(dates[0].begin == 8);
    CHECK(dates[0].end == 12);
    CHECK(dates[0].category == "DATE");

    CHECK(g.annotate("nothing here").empty());
    // cardinal rule and no-partial-word matches
    auto counts = g.annotate("counted 42 Annexes");
    REQUIRE(counts.size() == 1);
    CHECK(counts[0].category == "CARDINAL");
}

TEST_CASE("external annotation files are validated") {
    const std::string path = "/tmp/scriv_test_ann.tsv";
    write_text_file(path, "0\t4\tPER\n9\t12\tPER\n");
    FileAnnotator ann(path);
    auto spans = ann.annotate("Anne met Bob.");
    CHECK(spans.size() == 2);
    write_text_file(path, "0\t99\tPER\n");
    CHECK_THROWS_AS(ann.annotate("short"), ContractError);
    std::remove(path.c_str());
}

TEST_CASE("render_line: contract, style independence, determinism") {
    auto gen = make_generator(Family::paragraph, 17);
    Rng rng(1);
    FontSpec font = FontPool::builtin().printed[0];
    CHECK_THROWS_AS(render_line_image(font, "", rng), ContractError);

    Rng r1(5), r2(5);
    auto img1 = render_line_image(font, "hello", r1);
    auto img2 = render_line_image(font, "hello", r2);
    CHECK(img1.pixels == img2.pixels);

    FontSpec other = FontPool::builtin().handwritten[0];
    Rng r3(5);
    auto img3 = render_line_image(other, "hello", r3);
    CHECK(img3.pixels != img1.pixels);  // different font, same label

    auto [img, text] = gen.line(7);
    CHECK(!text.empty());
    CHECK(img.height >= 32);
    auto [img_b, text_b] = gen.line(7);
    CHECK(text == text_b);
    CHECK(img.pixels == img_b.pixels);
}

TEST_CASE("augment: identity when disabled, affine brightness, shape audit") {
    auto gen = make_generator(Family::paragraph, 41, 3);
    auto sample = gen.page(0);
    Rng rng(6);
    auto same = augment(sample.image, rng, AugmentPolicy::disabled());
    CHECK(same.pixels == sample.image.pixels);

    // brightness-only policy keeps a constant image constant
    AugmentPolicy bright;
    bright.p_resolution = bright.p_elastic = bright.p_morph = bright.p_rotate = 0;
    bright.p_brightness = 1.0;
    auto flat = Image::filled(20, 20, 0.5f);
    Rng rng2(7);
    auto shifted = augment(flat, rng2, bright);
    for (float p : shifted.pixels) {
        CHECK(p == shifted.pixels[0]);
        CHECK(p >= 0.5f - 0.13f);
        CHECK(p <= 0.5f + 0.13f);
    }

    // shape changes only under resolution jitter
    AugmentPolicy no_res;
    no_res.p_resolution = 0;
    Rng rng3(8);
    for (int i = 0; i < 200; ++i) {
        auto out = augment(sample.image, rng3, no_res);
        CHECK(out.height == sample.image.height);
        CHECK(out.width == sample.image.width);
        for (float p : out.pixels) {
            CHECK(p >= 0.0f);
            CHECK(p <= 1.0f);
        }
    }
    AugmentPolicy res_only;
    res_only.p_resolution = 1.0;
    res_only.p_elastic = res_only.p_morph = res_only.p_rotate = res_only.p_brightness = 0;
    Rng rng4(9);
    for (int i = 0; i < 200; ++i) {
        auto out = augment(sample.image, rng4, res_only);
        CHECK(out.height <= sample.image.height);
        CHECK(out.height >= static_cast<int>(sample.image.height * res_only.min_scale) - 1);
    }
}

TEST_CASE("pgm round trip is bit exact") {
    auto gen = make_generator(Family::paragraph, 51, 2);
    auto sample = gen.page(1);
    const std::string path = "/tmp/scriv_test_img.pgm";
    save_pgm(sample.image, path);
    auto loaded = load_pgm(path);
    CHECK(loaded.height == sample.image.height);
    CHECK(loaded.width == sample.image.width);
    CHECK(pgm_bytes(loaded) == pgm_bytes(sample.image));
    std::remove(path.c_str());
}
