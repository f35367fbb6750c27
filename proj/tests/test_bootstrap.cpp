#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "ffrg/bootstrap.hpp"
#include "ffrg/evaluator.hpp"
#include "ffrg/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace ffrg;
using testing::kJwPairs;
using testing::reference_jw;

namespace {

Document doc_of(std::vector<Word> words) {
    Document d;
    d.doc_id = "t";
    d.words = std::move(words);
    return d;
}

} // namespace

TEST_CASE("Jaro-Winkler matches the reference on 25 pairs") {
    CHECK(std::size(kJwPairs) == 25);
    for (const auto& [a, b] : kJwPairs) {
        CAPTURE(a);
        CAPTURE(b);
        CHECK(std::abs(jaro_winkler_similarity(a, b) - reference_jw(a, b)) <= 1e-6);
        CHECK(std::abs(string_distance(a, b) - string_distance(b, a)) <= 1e-12);
    }
    CHECK(string_distance("MARTHA", "MARHTA") == doctest::Approx(0.0389).epsilon(0.003));
    CHECK(reference_jw("martha", "marhta") == doctest::Approx(0.961111).epsilon(1e-5));
    CHECK(string_distance("invoice", "invoice") == 0.0);
    CHECK(string_distance("abc", "xyz") == 1.0);
    CHECK(string_distance("", "") == 0.0);
}

TEST_CASE("key_score") {
    const auto schema = default_invoice_schema();
    const auto& inv = schema.field(1);
    CHECK(key_score("INVOICE #", inv) == 1.0);
    CHECK(key_score("zzzz", inv) <= 0.6);
    const FieldSpec only{1, "x", {"invoice number"}, {DataType::number}};
    CHECK(key_score("invoice numbre", only) == doctest::Approx(reference_jw("invoice numbre", "invoice number")));
    for (const auto& [a, b] : kJwPairs) {
        const double s = key_score(a, inv);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("localize_key") {
    const auto schema = default_invoice_schema();
    auto d = testing::line_doc({"Date", "Invoice", "Number", "Total"}, 0.1, 0.1, 0.012, 0.1);
    std::vector<Phrase> phrases{make_phrase(d, {0}), make_phrase(d, {1, 2}), make_phrase(d, {3})};
    auto m = localize_key(phrases, schema.field(1));
    REQUIRE(m);
    CHECK(m->phrase == 1);
    CHECK(m->score == 1.0);

    std::vector<Phrase> one{make_phrase(d, {3})};
    CHECK(localize_key(one, schema.field(1))->phrase == 0);

    std::vector<Phrase> same{make_phrase(d, {0}), make_phrase(d, {0})};
    CHECK(localize_key(same, schema.field(1))->phrase == 0);
    CHECK_FALSE(localize_key({}, schema.field(1)));
}

TEST_CASE("geometric_score examples") {
    const BBox key{0.1, 0.1, 0.2, 0.12};
    auto shifted = [&](double dx, double dy) { return BBox{key.x0 + dx, key.y0 + dy, key.x1 + dx, key.y1 + dy}; };
    const double right = geometric_score(key, shifted(0.2, 0));
    CHECK(right == doctest::Approx(std::exp(-0.04 / 0.5) + 4.0).epsilon(1e-12));
    CHECK(right == doctest::Approx(4.9231).epsilon(1e-4));
    CHECK(geometric_score(key, shifted(0, 0.2)) == doctest::Approx(right).epsilon(1e-12));
    const double d = 0.2 / std::sqrt(2.0);
    const double upleft = geometric_score(key, shifted(-d, -d));
    const double angle = -3 * std::numbers::pi / 4;
    CHECK(upleft == doctest::Approx(std::exp(-0.08) + 4 * std::exp(-angle * angle / 0.5)).epsilon(1e-12));
    CHECK(upleft == doctest::Approx(0.9232).epsilon(1e-3));
    CHECK(geometric_score(key, key) == doctest::Approx(5.0));

    // decreasing in distance, peaked at the two modes, bounded by 1 + alpha
    double prev = 10;
    for (double r = 0.0; r < 1.0; r += 0.05) {
        const double g = geometric_score(key, shifted(r, 0));
        CHECK(g < prev);
        CHECK(g <= 5.0);
        prev = g;
    }
    for (double a = -3.0; a < 3.0; a += 0.1) {
        const double g = geometric_score(key, shifted(0.2 * std::cos(a), 0.2 * std::sin(a)));
        CHECK(g <= right + 1e-12);
    }
}

TEST_CASE("value_score") {
    CHECK(value_score(1.0, 4.9231) == doctest::Approx(4.9231));
    CHECK(value_score(0.0, 4.9231) == 0.0);
    CHECK(value_score(0.5, 4.0) == 2.0);
    const BBox key{0.1, 0.1, 0.2, 0.12}, cand{0.3, 0.1, 0.4, 0.12};
    CHECK(value_score(key, 0.5, cand) == doctest::Approx(0.5 * geometric_score(key, cand)));
}

TEST_CASE("in_neighbor_zone") {
    const BBox cand{0.4, 0.5, 0.5, 0.52};
    CHECK(in_neighbor_zone({0.2, 0.5, 0.35, 0.52}, cand));
    CHECK(in_neighbor_zone({0.4, 0.46, 0.5, 0.48}, cand));  // 2 heights above
    CHECK_FALSE(in_neighbor_zone({0.4, 0.62, 0.5, 0.64}, cand)); // 6 heights below
    CHECK_FALSE(in_neighbor_zone({0.6, 0.5, 0.7, 0.52}, cand));  // right of the candidate
    CHECK_FALSE(in_neighbor_zone({0.4, 0.39, 0.5, 0.41}, cand)); // 5.5 heights above
}

TEST_CASE("extract_field") {
    const auto schema = default_invoice_schema();
    const auto& total = schema.field(5);

    SUBCASE("no candidate of the right type") {
        auto d = doc_of({testing::word(0, "Total", 0.1, 0.1, 0.15, 0.112), testing::word(1, "hello", 0.3, 0.1, 0.35, 0.112)});
        std::vector<Phrase> ph{make_phrase(d, {0}), make_phrase(d, {1})};
        auto fx = extract_field(d, ph, total);
        CHECK(fx.key_phrase == 0u);
        CHECK_FALSE(fx.value_phrase);
        CHECK_FALSE(fx.value_score);
    }
    SUBCASE("money value beneath the key") {
        auto d = doc_of({testing::word(0, "Total", 0.1, 0.1, 0.15, 0.112),
                         testing::word(1, "$1,200.00", 0.1, 0.13, 0.18, 0.142)});
        std::vector<Phrase> ph{make_phrase(d, {0}), make_phrase(d, {1})};
        auto fx = extract_field(d, ph, total);
        REQUIRE(fx.value_phrase);
        CHECK(*fx.value_phrase == 1u);
        CHECK(*fx.value_score > 0.1);
        CHECK(*fx.value_score == doctest::Approx(geometric_score(ph[0].box, ph[1].box)));
    }
    SUBCASE("nearer of two candidates on the key line wins") {
        auto d = doc_of({testing::word(0, "Total", 0.1, 0.1, 0.15, 0.112),
                         testing::word(1, "$9.00", 0.5, 0.1, 0.55, 0.112),
                         testing::word(2, "$5.00", 0.2, 0.1, 0.25, 0.112)});
        std::vector<Phrase> ph{make_phrase(d, {0}), make_phrase(d, {1}), make_phrase(d, {2})};
        CHECK(*extract_field(d, ph, total).value_phrase == 2u);
    }
    SUBCASE("the key phrase is never its own value") {
        // a key list that makes the only phrase typed money
        const FieldSpec odd{1, "x", {"$5.00"}, {DataType::money}};
        auto d2 = doc_of({testing::word(0, "$5.00", 0.1, 0.1, 0.15, 0.112)});
        std::vector<Phrase> ph2{make_phrase(d2, {0})};
        CHECK_FALSE(extract_field(d2, ph2, odd).value_phrase);
    }
    SUBCASE("removing the chosen value never raises the best score") {
        auto d = doc_of({testing::word(0, "Total", 0.1, 0.1, 0.15, 0.112),
                         testing::word(1, "$9.00", 0.5, 0.1, 0.55, 0.112),
                         testing::word(2, "$5.00", 0.2, 0.1, 0.25, 0.112)});
        std::vector<Phrase> ph{make_phrase(d, {0}), make_phrase(d, {1}), make_phrase(d, {2})};
        const double full = *extract_field(d, ph, total).value_score;
        ph.erase(ph.begin() + 2);
        CHECK(*extract_field(d, ph, total).value_score <= full);
    }
}

TEST_CASE("cross-field conflicts go to the higher value score") {
    // "Due Date" is an exact key for due_date and a near miss for inv_date's "date"
    auto d = doc_of({testing::word(0, "Due", 0.1, 0.1, 0.13, 0.112), testing::word(1, "Date", 0.135, 0.1, 0.17, 0.112),
                     testing::word(2, "01/31/2020", 0.2, 0.1, 0.28, 0.112)});
    const auto schema = default_invoice_schema();
    const auto phrases = group_words(d);
    REQUIRE(phrases.size() == 2);
    const auto fx = extract_document(phrases, schema);
    CHECK(fx[3].value_phrase == 1u); // due_date
    CHECK_FALSE(fx[2].value_phrase); // inv_date lost the claim

    const auto r = bootstrap_labels({d}, schema);
    CHECK(r.labels.docs[0].labels == std::vector<int>{0, 0, 4});
    CHECK(r.values[0].fields.at("due_date") == "01/31/2020");
    CHECK(r.values[0].fields.size() == 1);
}

TEST_CASE("bootstrap_labels: trivial documents") {
    const auto schema = default_invoice_schema();
    auto none = testing::line_doc({"hello", "world"});
    auto r = bootstrap_labels({none}, schema);
    CHECK(r.labels.provenance == "bootstrap");
    CHECK(r.labels.docs[0].labels == std::vector<int>{0, 0});

    // a three-word value phrase labels all three words
    auto d = doc_of({testing::word(0, "Invoice", 0.1, 0.1, 0.15, 0.112), testing::word(1, "Date", 0.152, 0.1, 0.18, 0.112),
                     testing::word(2, "Jan", 0.22, 0.1, 0.24, 0.112), testing::word(3, "31,", 0.243, 0.1, 0.26, 0.112),
                     testing::word(4, "2020", 0.263, 0.1, 0.29, 0.112)});
    r = bootstrap_labels({d}, schema);
    CHECK(r.labels.docs[0].labels == std::vector<int>{0, 0, 3, 3, 3});
    CHECK(r.values[0].fields.at("inv_date") == "Jan 31, 2020");
}

TEST_CASE("extraction is unchanged when boxes arrive in pixels at any page size") {
    const auto schema = default_invoice_schema();
    SynthConfig cfg = synth_preset("noisy-bench");
    cfg.n_docs = 20;
    const auto corpus = generate(cfg, schema).docs;
    for (int scale : {1, 3}) {
        Corpus pixels;
        for (const auto& d : corpus) {
            const double w = 850.0 * scale, h = 1100.0 * scale;
            nlohmann::json j = {{"doc_id", d.doc_id}, {"page_width", w}, {"page_height", h}};
            j["words"] = nlohmann::json::array();
            for (const auto& wd : d.words)
                j["words"].push_back({{"text", wd.text},
                                      {"box", {wd.box.x0 * w, wd.box.y0 * h, wd.box.x1 * w, wd.box.y1 * h}}});
            pixels.push_back(parse_document(j.dump()));
        }
        const auto a = bootstrap_labels(corpus, schema);
        const auto b = bootstrap_labels(pixels, schema);
        CHECK(a.labels == b.labels);
        CHECK(a.values == b.values);
    }
}

TEST_CASE("clean corpus: labels recover the generator truth") {
    const auto schema = default_invoice_schema();
    SynthConfig cfg = synth_preset("clean");
    cfg.n_docs = 200;
    const auto corpus = generate(cfg, schema);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = bootstrap_labels(corpus.docs, schema);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto q = corruption_report(corpus.docs, corpus.gold, r.labels, schema);
    CHECK(q.recall >= 0.95);
    CHECK(q.precision >= 0.95);
    CHECK(score(r.values, gold_annotations(corpus.gold), schema).macro_f1 >= 0.95);
    CHECK(secs < 30.0);
}

TEST_CASE("bootstrap output is independent of the thread count") {
    const auto schema = default_invoice_schema();
    SynthConfig cfg = synth_preset("noisy-bench");
    cfg.n_docs = 40;
    const auto corpus = generate(cfg, schema).docs;
    const auto a = bootstrap_labels(corpus, schema, {}, {}, 1);
    const auto b = bootstrap_labels(corpus, schema, {}, {}, 4);
    CHECK(a.labels == b.labels);
    CHECK(a.values == b.values);
}

TEST_CASE("RuleParams validation") {
    RuleParams p;
    p.sigma_d = 0;
    CHECK_THROWS(p.validate());
    p = {};
    p.theta_v = -1;
    CHECK_THROWS(p.validate());
    CHECK_NOTHROW(RuleParams{}.validate());
}
