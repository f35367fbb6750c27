#pragma once

#include <string>

#include "ffrg/bootstrap.hpp"
#include "ffrg/evaluator.hpp"
#include "ffrg/grouping.hpp"
#include "ffrg/ple.hpp"
#include "ffrg/synth.hpp"

namespace ffrg {

/// synth -> bootstrap -> train -> extract -> eval on a held-out test split.
struct PipelineConfig {
    SynthConfig synth = synth_preset("clean"); // n_docs is the training size
    int n_test = 200;
    RuleParams rules;
    GroupingConfig grouping;
    PLEConfig ple;
};

struct PipelineResult {
    SynthCorpus train_set, test_set;
    LabelSet bootstrap;
    ModelParams params;
    std::vector<DocPrediction> predictions; // test split
    LabelQuality label_quality; // bootstrap labels vs truth, training split
    EvalReport bootstrap_report; // rule engine alone, test split
    EvalReport report;           // trained model, test split
};

/// Test documents come from an independent stream (seed + 1, prefix "test").
PipelineResult run_pipeline(const PipelineConfig& cfg, const FieldSchema& schema, int threads = 1);

} // namespace ffrg
