#include "ffrg/ple.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ffrg/errors.hpp"
#include "ffrg/features.hpp"
#include "ffrg/parallel.hpp"

namespace ffrg {

void PLEConfig::validate() const {
    if (branches < 1) throw ConfigError("branch count must be >= 1");
    if (!(beta >= 0)) throw ConfigError("beta must be >= 0");
    if (!(refine_threshold >= 0 && refine_threshold <= 1)) throw ConfigError("refine_threshold must be in [0,1]");
    if (epochs_step1 < 0 || epochs_step2 < 0) throw ConfigError("epoch counts must be >= 0");
    if (batch_docs < 1) throw ConfigError("batch size must be >= 1");
    if (!(lr > 0)) throw ConfigError("learning rate must be positive");
    if (hidden < 1 || branch_hidden < 1) throw ConfigError("hidden widths must be >= 1");
}

std::vector<LossTerm> aggregate_loss_terms(int branches, double beta) {
    std::vector<LossTerm> terms{{1, 0, 1.0}};
    for (int k = 2; k <= branches; ++k) {
        for (int j = 1; j <= k - 1; ++j) {
            terms.push_back({k, j, 1.0});
            terms.push_back({k, 0, beta});
        }
    }
    return terms;
}

double total_loss(const std::vector<std::vector<double>>& branch_losses, double beta) {
    const int branches = static_cast<int>(branch_losses.size());
    double total = 0;
    for (const auto& t : aggregate_loss_terms(branches, beta)) {
        const auto& row = branch_losses.at(t.branch - 1);
        if (t.label_set >= static_cast<int>(row.size()))
            throw ValidationError("total_loss: missing L(s_" + std::to_string(t.branch) + ", l_" +
                                  std::to_string(t.label_set) + ")");
        total += t.weight * row[t.label_set];
    }
    return total;
}

std::vector<int> refine_document(const Matrix& probs, std::span<const int> rank, double threshold) {
    const Eigen::Index n = probs.rows();
    std::vector<int> labels(n, 0);
    if (n == 0) return labels;
    const Eigen::Index classes = probs.cols();

    std::vector<int> argmax(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index c;
        probs.row(i).maxCoeff(&c); // first maximum on ties
        argmax[i] = static_cast<int>(c);
    }

    for (Eigen::Index c = 1; c < classes; ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n; ++i) {
            const double p = probs(i, c), q = probs(best, c);
            if (p > q || (p == q && rank[i] < rank[best])) best = i;
        }
        if (argmax[best] == c && probs(best, c) > threshold) labels[best] = static_cast<int>(c);
    }
    return labels;
}

LabelSet refine_labels(std::span<const Matrix> probs, const Corpus& corpus, double threshold, std::string provenance) {
    if (probs.size() != corpus.size()) throw ValidationError("refine_labels: one score matrix per document required");
    LabelSet out;
    out.provenance = std::move(provenance);
    out.docs.reserve(corpus.size());
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto rank = reading_rank(corpus[d]);
        out.docs.push_back({corpus[d].doc_id, refine_document(probs[d], rank, threshold)});
    }
    return out;
}

namespace {

struct TrainDoc {
    Matrix features;
    Matrix hidden; // cached trunk activations once the trunk is frozen
    std::vector<int> rank;
};

std::vector<TrainDoc> prepare(const Corpus& corpus, int threads) {
    std::vector<TrainDoc> docs(corpus.size());
    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        docs[i].features = featurize(corpus[i]);
        docs[i].rank = reading_rank(corpus[i]);
    });
    return docs;
}

void check_labels(const Corpus& corpus, const LabelSet& labels, int classes) {
    if (corpus.empty()) throw ValidationError("training corpus is empty");
    if (labels.docs.size() != corpus.size()) throw ValidationError("label set does not cover the corpus");
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto& l = labels.docs[d];
        if (l.doc_id != corpus[d].doc_id || l.labels.size() != corpus[d].words.size())
            throw ValidationError("labels misaligned with corpus at doc " + corpus[d].doc_id);
        for (int c : l.labels)
            if (c < 0 || c >= classes)
                throw ValidationError(corpus[d].doc_id + ": label " + std::to_string(c) + " out of range");
    }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ull + tag;
    x ^= x >> 31;
    x *= 0xbf58476d1ce4e5b9ull;
    return x ^ (x >> 29);
}

std::vector<std::vector<std::size_t>> batches(std::size_t n, int batch_docs, std::mt19937_64& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t b = 0; b < n; b += batch_docs)
        out.emplace_back(order.begin() + b, order.begin() + std::min(n, b + batch_docs));
    return out;
}

Matrix stack(const std::vector<TrainDoc>& docs, const std::vector<std::size_t>& ids, Matrix TrainDoc::*member) {
    Eigen::Index rows = 0;
    for (auto i : ids) rows += (docs[i].*member).rows();
    const Eigen::Index cols = (docs[ids.front()].*member).cols();
    Matrix out(rows, cols);
    Eigen::Index r = 0;
    for (auto i : ids) {
        const Matrix& m = docs[i].*member;
        if (m.rows()) out.middleRows(r, m.rows()) = m;
        r += m.rows();
    }
    return out;
}

std::vector<int> stack_labels(const LabelSet& labels, const std::vector<std::size_t>& ids) {
    std::vector<int> out;
    for (auto i : ids) out.insert(out.end(), labels.docs[i].labels.begin(), labels.docs[i].labels.end());
    return out;
}

// Labels and weights feeding branch k (0-based) for one batch.
struct StackedTerms {
    std::vector<std::vector<int>> labels;
    std::vector<double> weights;

    BranchObjective objective(int branch) const {
        BranchObjective obj{branch, {}};
        for (std::size_t t = 0; t < labels.size(); ++t) obj.terms.push_back({labels[t], weights[t]});
        return obj;
    }
};

// label_sets[0] = bootstrap, label_sets[j] = refined by branch j.
StackedTerms branch_terms(int branch, const std::vector<const LabelSet*>& label_sets, const PLEConfig& cfg,
                          const std::vector<std::size_t>& ids) {
    StackedTerms st;
    if (branch == 0 || !cfg.refined_labels) {
        st.labels.push_back(stack_labels(*label_sets[0], ids));
        st.weights.push_back(1.0);
        return st;
    }
    for (const auto& t : aggregate_loss_terms(branch + 1, cfg.beta)) {
        if (t.branch != branch + 1 || t.weight == 0) continue;
        st.labels.push_back(stack_labels(*label_sets.at(t.label_set), ids));
        st.weights.push_back(t.weight);
    }
    return st;
}

std::vector<std::span<const double>> as_const(std::vector<std::span<double>> v) {
    return {v.begin(), v.end()};
}

std::vector<Matrix> branch_scores(const ModelParams& params, const std::vector<TrainDoc>& docs, int branch, bool cached,
                                  int threads) {
    std::vector<Matrix> out(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        out[i] = cached ? branch_forward(params, branch, docs[i].hidden) : forward(params, docs[i].features, branch);
    });
    return out;
}

LabelSet refine_from(const std::vector<Matrix>& scores, const std::vector<TrainDoc>& docs, const Corpus& corpus,
                     double threshold, int branch) {
    LabelSet out;
    out.provenance = "refined@branch_" + std::to_string(branch);
    for (std::size_t d = 0; d < docs.size(); ++d)
        out.docs.push_back({corpus[d].doc_id, refine_document(scores[d], docs[d].rank, threshold)});
    return out;
}

void step_one(ModelParams& params, const std::vector<TrainDoc>& docs, const LabelSet& labels, const PLEConfig& cfg) {
    std::mt19937_64 rng(stream_seed(cfg.seed, 1));
    AdamState state;
    for (int epoch = 0; epoch < cfg.epochs_step1; ++epoch) {
        for (const auto& ids : batches(docs.size(), cfg.batch_docs, rng)) {
            const Matrix x = stack(docs, ids, &TrainDoc::features);
            const auto y = stack_labels(labels, ids);
            const BranchObjective obj{0, {{y, 1.0}}};
            LossGrad lg = loss_and_grad(params, x, std::span(&obj, 1));
            auto p = params.trunk_blocks();
            auto pb = params.branch_blocks(0);
            p.insert(p.end(), pb.begin(), pb.end());
            auto g = lg.grad.trunk_blocks();
            auto gb = lg.grad.branch_blocks(0);
            g.insert(g.end(), gb.begin(), gb.end());
            adam_step(p, as_const(g), state, cfg.lr);
        }
    }
}

} // namespace

TrainResult train_baseline(const Corpus& corpus, const LabelSet& labels, const FieldSchema& schema, PLEConfig cfg,
                           int threads) {
    cfg.branches = 1;
    return train(corpus, labels, schema, cfg, threads);
}

TrainResult train(const Corpus& corpus, const LabelSet& bootstrap, const FieldSchema& schema, const PLEConfig& cfg,
                  int threads, const StageCallback& on_stage_end) {
    cfg.validate();
    const ModelDims dims{features::kDim, cfg.hidden, cfg.branch_hidden, schema.num_classes(), cfg.branches};
    check_labels(corpus, bootstrap, dims.classes);

    TrainResult result{init_params(dims, cfg.seed), {}};
    ModelParams& params = result.params;
    auto docs = prepare(corpus, threads);

    std::vector<const LabelSet*> label_sets{&bootstrap};
    result.refined.reserve(cfg.branches);

    if (cfg.two_step) {
        step_one(params, docs, bootstrap, cfg);
        if (on_stage_end) on_stage_end(1, params);
        if (cfg.branches == 1) return result;

        parallel_for(docs.size(), threads, [&](std::size_t i) { docs[i].hidden = trunk_forward(params, docs[i].features); });

        for (int k = 1; k < cfg.branches; ++k) {
            // labels from the branch frozen in the previous stage
            result.refined.push_back(
                refine_from(branch_scores(params, docs, k - 1, true, threads), docs, corpus, cfg.refine_threshold, k));
            label_sets.clear();
            label_sets.push_back(&bootstrap);
            for (const auto& r : result.refined) label_sets.push_back(&r);

            std::mt19937_64 rng(stream_seed(cfg.seed, 100 + k));
            AdamState state;
            for (int epoch = 0; epoch < cfg.epochs_step2; ++epoch) {
                for (const auto& ids : batches(docs.size(), cfg.batch_docs, rng)) {
                    const Matrix h = stack(docs, ids, &TrainDoc::hidden);
                    const StackedTerms st = branch_terms(k, label_sets, cfg, ids);
                    ModelParams grad = ModelParams::zeros(dims);
                    branch_loss_and_grad(params, h, st.objective(k), grad.branches[k]);
                    adam_step(params.branch_blocks(k), as_const(grad.branch_blocks(k)), state, cfg.lr);
                }
            }
            if (on_stage_end) on_stage_end(k + 1, params);
        }
        return result;
    }

    // Single-step ablation: everything trains jointly; refined labels are
    // regenerated from the current branches at the start of every epoch.
    const int epochs = cfg.epochs_step1 + (cfg.branches - 1) * cfg.epochs_step2;
    std::mt19937_64 rng(stream_seed(cfg.seed, 1));
    AdamState state;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        result.refined.clear();
        if (cfg.refined_labels)
            for (int k = 1; k < cfg.branches; ++k)
                result.refined.push_back(refine_from(branch_scores(params, docs, k - 1, false, threads), docs, corpus,
                                                     cfg.refine_threshold, k));
        label_sets.assign({&bootstrap});
        for (const auto& r : result.refined) label_sets.push_back(&r);

        for (const auto& ids : batches(docs.size(), cfg.batch_docs, rng)) {
            const Matrix x = stack(docs, ids, &TrainDoc::features);
            std::vector<StackedTerms> per_branch;
            for (int k = 0; k < cfg.branches; ++k) per_branch.push_back(branch_terms(k, label_sets, cfg, ids));
            std::vector<BranchObjective> objectives;
            for (int k = 0; k < cfg.branches; ++k) objectives.push_back(per_branch[k].objective(k));
            LossGrad lg = loss_and_grad(params, x, objectives);
            adam_step(params.blocks(), as_const(lg.grad.blocks()), state, cfg.lr);
        }
    }
    if (on_stage_end) on_stage_end(cfg.branches, params);
    return result;
}

Matrix ensemble_predict(const ModelParams& params, const Matrix& features) {
    const Matrix hidden = trunk_forward(params, features);
    Matrix mean = Matrix::Zero(features.rows(), params.dims.classes);
    for (int k = 0; k < params.dims.branches; ++k) mean += branch_forward(params, k, hidden);
    mean /= static_cast<double>(params.dims.branches);
    return mean;
}

DocPrediction extract_from_scores(const Matrix& probs, const Document& doc, const FieldSchema& schema,
                                  double threshold, const GroupingConfig& grouping) {
    DocPrediction out;
    out.values.doc_id = doc.doc_id;
    const int n = static_cast<int>(doc.words.size());
    out.word_class.assign(n, 0);
    out.anchors.assign(schema.num_fields(), -1);
    out.spans.assign(schema.num_fields(), {});
    if (n == 0) return out;

    for (int i = 0; i < n; ++i) {
        Eigen::Index c;
        probs.row(i).maxCoeff(&c);
        out.word_class[i] = static_cast<int>(c);
    }
    const auto rank = reading_rank(doc);
    const auto anchors = refine_document(probs, rank, threshold);
    const auto phrases = doc.phrases ? *doc.phrases : group_words(doc, grouping);
    const auto owner = phrase_of_word(doc, phrases);

    for (int w = 0; w < n; ++w) {
        const int field = anchors[w];
        if (field == 0) continue;
        out.anchors[field - 1] = w;
        std::vector<int> run{w};
        if (owner[w] >= 0) {
            const auto& ids = phrases[owner[w]].word_ids;
            const auto pos = std::find(ids.begin(), ids.end(), w) - ids.begin();
            auto lo = pos, hi = pos;
            while (lo > 0 && out.word_class[ids[lo - 1]] == field) --lo;
            while (hi + 1 < static_cast<std::ptrdiff_t>(ids.size()) && out.word_class[ids[hi + 1]] == field) ++hi;
            run.assign(ids.begin() + lo, ids.begin() + hi + 1);
        }
        std::string value;
        for (std::size_t i = 0; i < run.size(); ++i) {
            if (i) value += ' ';
            value += doc.words[run[i]].text;
        }
        out.values.fields[schema.field(field).name] = value;
        out.spans[field - 1] = std::move(run);
    }
    return out;
}

DocPrediction extract_values(const ModelParams& params, const Document& doc, const FieldSchema& schema,
                             double threshold, const GroupingConfig& grouping) {
    if (params.dims.classes != schema.num_classes()) throw ConfigError("model and schema disagree on class count");
    return extract_from_scores(ensemble_predict(params, featurize(doc)), doc, schema, threshold, grouping);
}

std::vector<DocPrediction> predict_corpus(const ModelParams& params, const Corpus& corpus, const FieldSchema& schema,
                                          double threshold, int threads, const GroupingConfig& grouping) {
    std::vector<DocPrediction> out(corpus.size());
    parallel_for(corpus.size(), threads,
                 [&](std::size_t i) { out[i] = extract_values(params, corpus[i], schema, threshold, grouping); });
    return out;
}

} // namespace ffrg
