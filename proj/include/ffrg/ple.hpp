#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ffrg/document.hpp"
#include "ffrg/grouping.hpp"
#include "ffrg/model.hpp"

namespace ffrg {

struct PLEConfig {
    int branches = 3;
    double beta = 1.0;
    double refine_threshold = 0.1;
    int epochs_step1 = 2;
    int epochs_step2 = 2; // per refinement stage
    int batch_docs = 8;
    double lr = 3e-3;
    int hidden = 64;
    int branch_hidden = 64;
    std::uint64_t seed = 7;
    // Ablation switches. two_step=false trains every branch and the trunk
    // jointly; refined_labels=false trains each branch on bootstrap labels only.
    bool two_step = true;
    bool refined_labels = true;

    void validate() const;
};

/// One cross-entropy term of the aggregate loss: branch k (1-based) scored
/// against label set j (0 = bootstrap, j >= 1 = refined by branch j).
struct LossTerm {
    int branch;
    int label_set;
    double weight;
};

/// Terms of L(s_1, l_0) + sum_{k=2..K} sum_{j=1..k-1} (L(s_k, l_j) + beta L(s_k, l_0)),
/// in that order. The bootstrap term is repeated once per inner pair.
std::vector<LossTerm> aggregate_loss_terms(int branches, double beta);

/// Evaluates the aggregate loss from a matrix of per-(branch, label set)
/// losses: branch_losses[k-1][j] = L(s_k, l_j).
double total_loss(const std::vector<std::vector<double>>& branch_losses, double beta);

/// Refinement for one document: per positive class, the word with the
/// document-highest probability for that class is kept when its argmax is
/// that class and the probability exceeds `threshold`. Ties go to the
/// earlier word in reading order (`rank`). Everything else is background.
std::vector<int> refine_document(const Matrix& probs, std::span<const int> rank, double threshold);

/// refine_document over a corpus, one probability matrix per document.
LabelSet refine_labels(std::span<const Matrix> probs, const Corpus& corpus, double threshold, std::string provenance);

struct TrainResult {
    ModelParams params;
    std::vector<LabelSet> refined; // refined[j-1] holds l_j
};

/// Plain supervised training of the trunk and first branch on `labels`.
TrainResult train_baseline(const Corpus& corpus, const LabelSet& labels, const FieldSchema& schema, PLEConfig cfg,
                           int threads = 1);

/// Two-step progressive training: trunk + branch 1 on bootstrap labels, then
/// with the trunk and earlier branches frozen, each later branch is trained
/// on refined labels from every earlier branch plus beta-weighted bootstrap
/// labels. Refined labels are generated once per stage.
/// `on_stage_end(stage, params)` fires after step 1 (stage 1) and after each
/// refinement stage k (stage k = branch k).
using StageCallback = std::function<void(int, const ModelParams&)>;
TrainResult train(const Corpus& corpus, const LabelSet& bootstrap, const FieldSchema& schema, const PLEConfig& cfg,
                  int threads = 1, const StageCallback& on_stage_end = {});

/// Mean of the branch probability rows.
Matrix ensemble_predict(const ModelParams& params, const Matrix& features);

struct DocPrediction {
    Annotation values;
    std::vector<int> word_class; // argmax of the averaged scores
    std::vector<int> anchors;    // word id chosen per field, -1 when absent (index field_id - 1)
    std::vector<std::vector<int>> spans; // value word ids per field, same indexing
};

/// Anchor selection with the refinement rule on averaged scores, then
/// expansion to the contiguous same-class run inside the anchor's phrase.
DocPrediction extract_values(const ModelParams& params, const Document& doc, const FieldSchema& schema,
                             double threshold = 0.1, const GroupingConfig& grouping = {});

/// Same, from precomputed averaged probabilities.
DocPrediction extract_from_scores(const Matrix& probs, const Document& doc, const FieldSchema& schema,
                                  double threshold = 0.1, const GroupingConfig& grouping = {});

std::vector<DocPrediction> predict_corpus(const ModelParams& params, const Corpus& corpus, const FieldSchema& schema,
                                          double threshold = 0.1, int threads = 1, const GroupingConfig& grouping = {});

} // namespace ffrg
