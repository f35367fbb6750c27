#include <doctest.h>

#include <algorithm>

#include "ffrg/bootstrap.hpp"
#include "ffrg/errors.hpp"
#include "ffrg/ple.hpp"
#include "ffrg/synth.hpp"
#include "helpers.hpp"

using namespace ffrg;

namespace {

struct Fixture {
    FieldSchema schema = default_invoice_schema();
    SynthCorpus corpus;
    LabelSet labels;

    Fixture() {
        SynthConfig cfg = synth_preset("noisy-bench");
        cfg.n_docs = 48;
        corpus = generate(cfg, schema);
        labels = bootstrap_labels(corpus.docs, schema).labels;
    }
};

PLEConfig small_config() {
    PLEConfig cfg;
    cfg.hidden = 16;
    cfg.branch_hidden = 8;
    cfg.epochs_step1 = 1;
    cfg.epochs_step2 = 1;
    return cfg;
}

// One row per word; `hot` gives (class, probability) with the rest spread
// evenly over the other classes.
Matrix rows(const std::vector<std::pair<int, double>>& hot, int classes = 8) {
    Matrix m(hot.size(), classes);
    for (std::size_t i = 0; i < hot.size(); ++i) {
        m.row(i).setConstant((1 - hot[i].second) / (classes - 1));
        m(i, hot[i].first) = hot[i].second;
    }
    return m;
}

} // namespace

TEST_CASE("aggregate loss terms: order, weights and counts") {
    const auto t = aggregate_loss_terms(3, 1.0);
    REQUIRE(t.size() == 7);
    const std::vector<std::tuple<int, int, double>> expected{{1, 0, 1.0}, {2, 1, 1.0}, {2, 0, 1.0}, {3, 1, 1.0},
                                                             {3, 0, 1.0}, {3, 2, 1.0}, {3, 0, 1.0}};
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(t[i].branch == std::get<0>(expected[i]));
        CHECK(t[i].label_set == std::get<1>(expected[i]));
        CHECK(t[i].weight == std::get<2>(expected[i]));
    }
    const auto b = aggregate_loss_terms(3, 0.25);
    CHECK(std::count_if(b.begin(), b.end(), [](auto& x) { return x.label_set == 0 && x.weight == 0.25; }) == 3);
    CHECK(std::count_if(b.begin(), b.end(), [](auto& x) { return x.label_set == 0 && x.weight == 1.0; }) == 1);

    for (int k = 1; k <= 6; ++k) {
        const auto terms = aggregate_loss_terms(k, 0.5);
        const auto beta_terms = std::count_if(terms.begin(), terms.end(), [](auto& x) { return x.weight == 0.5; });
        CHECK(static_cast<int>(terms.size() - beta_terms) == 1 + (k - 1) * k / 2);
        CHECK(beta_terms == (k - 1) * k / 2);
    }
    CHECK(aggregate_loss_terms(1, 1.0).size() == 1);
}

TEST_CASE("total_loss examples") {
    CHECK(total_loss({{0.7}}, 1.0) == 0.7);
    // L[k-1][j] = L(s_k, l_j); distinct powers of two expose every coefficient
    const std::vector<std::vector<double>> L{{1}, {2, 4}, {8, 16, 32}};
    CHECK(total_loss(L, 1.0) == 1 + 4 + 2 + 16 + 8 + 32 + 8);
    CHECK(total_loss({{1}, {2, 4}}, 0.0) == 1 + 4);
    CHECK_THROWS_AS(total_loss({{1}, {2}}, 1.0), ValidationError);
}

TEST_CASE("refine_document rule") {
    const std::vector<int> rank{0, 1, 2};
    SUBCASE("document maximum kept") {
        Matrix p = rows({{0, 0.9}, {1, 0.6}, {1, 0.3}}, 3);
        p(0, 1) = 0.05;
        p(0, 0) = 0.9;
        p(0, 2) = 0.05;
        CHECK(refine_document(p, rank, 0.1) == std::vector<int>{0, 1, 0});
    }
    SUBCASE("sub-threshold field dropped") {
        Matrix p(3, 3);
        p << 0.92, 0.08, 0.0, 0.95, 0.05, 0.0, 0.91, 0.09, 0.0;
        CHECK(refine_document(p, rank, 0.1) == std::vector<int>{0, 0, 0});
    }
    SUBCASE("argmax gate") {
        // word 1 has the top field-1 probability but argmax background
        Matrix p(3, 3);
        p << 0.8, 0.2, 0.0, 0.55, 0.45, 0.0, 0.7, 0.3, 0.0;
        CHECK(refine_document(p, rank, 0.1) == std::vector<int>{0, 0, 0});
    }
    SUBCASE("ties go to the earlier reading rank") {
        Matrix p(3, 3);
        p << 0.2, 0.8, 0.0, 0.2, 0.8, 0.0, 0.9, 0.1, 0.0;
        CHECK(refine_document(p, std::vector<int>{1, 0, 2}, 0.1) == std::vector<int>{0, 1, 0});
    }
    CHECK(refine_document(Matrix(0, 3), {}, 0.1).empty());
}

TEST_CASE("refine_labels: at most one word per field per document") {
    std::mt19937_64 rng(3);
    Corpus corpus;
    std::vector<Matrix> probs;
    for (int d = 0; d < 10; ++d) {
        corpus.push_back(testing::random_doc(rng, 25, "d" + std::to_string(d)));
        Matrix m = Matrix::Random(25, 8).cwiseAbs();
        for (int i = 0; i < 25; ++i) m.row(i) /= m.row(i).sum();
        probs.push_back(m);
    }
    const auto l = refine_labels(probs, corpus, 0.1, "refined@branch_1");
    CHECK(l.provenance == "refined@branch_1");
    for (const auto& dl : l.docs)
        for (int c = 1; c < 8; ++c) CHECK(std::count(dl.labels.begin(), dl.labels.end(), c) <= 1);
    CHECK_THROWS_AS(refine_labels(std::span(probs).first(3), corpus, 0.1, "x"), ValidationError);
}

TEST_CASE("K=1 equals the baseline and the first branch of K=3") {
    Fixture f;
    PLEConfig cfg = small_config();
    cfg.branches = 1;
    const auto one = train(f.corpus.docs, f.labels, f.schema, cfg);
    const auto base = train_baseline(f.corpus.docs, f.labels, f.schema, small_config());
    CHECK(one.params == base.params);
    CHECK(one.refined.empty());

    cfg.branches = 3;
    std::vector<ModelParams> stages;
    const auto three = train(f.corpus.docs, f.labels, f.schema, cfg, 1, [&](int stage, const ModelParams& p) {
        stages.push_back(p);
        CHECK(stage == static_cast<int>(stages.size()));
    });
    REQUIRE(stages.size() == 3);
    CHECK(three.params.trunk == one.params.trunk);
    CHECK(three.params.branches[0] == one.params.branches[0]);
    CHECK(three.refined.size() == 2);
    CHECK(three.refined[0].provenance == "refined@branch_1");
    CHECK(three.refined[1].provenance == "refined@branch_2");

    // freeze contract: trunk and earlier branches untouched by later stages
    CHECK(stages[2].trunk == stages[0].trunk);
    CHECK(stages[2].branches[0] == stages[0].branches[0]);
    CHECK(stages[2].branches[1] == stages[1].branches[1]);
    CHECK_FALSE(stages[2].branches[2] == stages[1].branches[2]);
}

TEST_CASE("training is deterministic and thread-count independent") {
    Fixture f;
    const auto cfg = small_config();
    const auto a = train(f.corpus.docs, f.labels, f.schema, cfg, 1);
    const auto b = train(f.corpus.docs, f.labels, f.schema, cfg, 4);
    CHECK(encode_checkpoint(a.params, f.schema) == encode_checkpoint(b.params, f.schema));
    CHECK(a.refined == b.refined);
    PLEConfig other = cfg;
    other.seed = 8;
    CHECK_FALSE(train(f.corpus.docs, f.labels, f.schema, other).params == a.params);
}

TEST_CASE("ablation switches train") {
    Fixture f;
    PLEConfig cfg = small_config();
    cfg.two_step = false;
    const auto joint = train(f.corpus.docs, f.labels, f.schema, cfg);
    CHECK(joint.refined.size() == 2);
    cfg.two_step = true;
    cfg.refined_labels = false;
    const auto plain = train(f.corpus.docs, f.labels, f.schema, cfg);
    CHECK(plain.params.branches.size() == 3);
}

TEST_CASE("training input errors") {
    Fixture f;
    CHECK_THROWS_AS(train({}, LabelSet{}, f.schema, small_config()), ValidationError);
    LabelSet bad = f.labels;
    bad.docs[0].labels[0] = 99;
    CHECK_THROWS_AS(train(f.corpus.docs, bad, f.schema, small_config()), ValidationError);
    PLEConfig cfg = small_config();
    cfg.branches = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.beta = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("ensemble_predict") {
    const auto p = init_params({features::kDim, 16, 8, 8, 3}, 5);
    std::mt19937_64 rng(1);
    const auto x = featurize(testing::random_doc(rng, 12));
    const auto mean = ensemble_predict(p, x);
    const Matrix by_hand = (forward(p, x, 0) + forward(p, x, 1) + forward(p, x, 2)) / 3.0;
    CHECK((mean - by_hand).cwiseAbs().maxCoeff() <= 1e-15);
    for (int i = 0; i < 12; ++i) CHECK(std::abs(mean.row(i).sum() - 1.0) <= 1e-9);

    // swapping branches 2 and 3 leaves the mean unchanged
    auto q = p;
    std::swap(q.branches[1], q.branches[2]);
    CHECK((ensemble_predict(q, x) - mean).cwiseAbs().maxCoeff() <= 1e-15);

    auto single = p;
    single.branches.resize(1);
    single.dims.branches = 1;
    CHECK(ensemble_predict(single, x) == forward(p, x, 0));

    // two branches voting [1,0] and [0,1] average to [0.5,0.5]
    auto two = ModelParams::zeros({features::kDim, 2, 2, 2, 2});
    two.trunk.bias << 1, 0;
    two.branches[0].out.bias << 100, -100;
    two.branches[1].out.bias << -100, 100;
    const auto half = ensemble_predict(two, x);
    CHECK(half(0, 0) == doctest::Approx(0.5));
    CHECK(half(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("extract_from_scores") {
    const auto schema = default_invoice_schema();
    Document d;
    d.doc_id = "x";
    d.words = {testing::word(0, "Invoice", 0.1, 0.1, 0.15, 0.112), testing::word(1, "Date", 0.152, 0.1, 0.18, 0.112),
               testing::word(2, "Jan", 0.3, 0.1, 0.32, 0.112), testing::word(3, "31,", 0.323, 0.1, 0.34, 0.112),
               testing::word(4, "2020", 0.343, 0.1, 0.37, 0.112), testing::word(5, "INV-7", 0.3, 0.3, 0.34, 0.312)};
    d.phrases = std::vector<Phrase>{make_phrase(d, {0, 1}), make_phrase(d, {2, 3, 4}), make_phrase(d, {5})};

    SUBCASE("three-word date") {
        const Matrix p = rows({{0, 0.9}, {0, 0.9}, {3, 0.6}, {3, 0.8}, {3, 0.5}, {0, 0.9}});
        const auto out = extract_from_scores(p, d, schema);
        CHECK(out.values.fields.at("inv_date") == "Jan 31, 2020");
        CHECK(out.anchors[2] == 3);
        CHECK(out.spans[2] == std::vector<int>{2, 3, 4});
        CHECK(out.values.fields.size() == 1);
    }
    SUBCASE("run stops at a word of another class") {
        const Matrix p = rows({{0, 0.9}, {0, 0.9}, {0, 0.6}, {3, 0.8}, {3, 0.5}, {0, 0.9}});
        CHECK(extract_from_scores(p, d, schema).values.fields.at("inv_date") == "31, 2020");
    }
    SUBCASE("singleton phrase") {
        const Matrix p = rows({{0, 0.9}, {0, 0.9}, {0, 0.9}, {0, 0.9}, {0, 0.9}, {1, 0.7}});
        const auto out = extract_from_scores(p, d, schema);
        CHECK(out.values.fields.at("inv_number") == "INV-7");
        CHECK(out.spans[0] == std::vector<int>{5});
        CHECK(out.anchors[1] == -1);
    }
    SUBCASE("nothing above threshold") {
        Matrix p = rows({{0, 0.95}, {0, 0.95}, {0, 0.95}, {0, 0.95}, {0, 0.95}, {0, 0.95}});
        CHECK(extract_from_scores(p, d, schema).values.fields.empty());
        CHECK(extract_from_scores(p, d, schema, 0.9).values.fields.empty());
    }
}

TEST_CASE("extract_values rejects a schema mismatch") {
    const auto p = init_params({features::kDim, 8, 8, 4, 1}, 1);
    CHECK_THROWS_AS(extract_values(p, testing::line_doc({"a"}), default_invoice_schema()), ConfigError);
}
