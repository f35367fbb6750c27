#include "ffrg/pipeline.hpp"

namespace ffrg {

PipelineResult run_pipeline(const PipelineConfig& cfg, const FieldSchema& schema, int threads) {
    cfg.synth.validate();
    cfg.rules.validate();
    cfg.grouping.validate();
    cfg.ple.validate();

    PipelineResult out;
    out.train_set = generate(cfg.synth, schema, threads);
    SynthConfig test_cfg = cfg.synth;
    test_cfg.n_docs = cfg.n_test;
    test_cfg.seed = cfg.synth.seed + 1;
    test_cfg.id_prefix = "test";
    out.test_set = generate(test_cfg, schema, threads);
    const SynthCorpus& train_set = out.train_set;
    const SynthCorpus& test_set = out.test_set;

    BootstrapResult boot = bootstrap_labels(train_set.docs, schema, cfg.rules, cfg.grouping, threads);
    out.label_quality = corruption_report(train_set.docs, train_set.gold, boot.labels, schema);
    out.bootstrap = std::move(boot.labels);

    const auto gold = gold_annotations(test_set.gold);
    out.bootstrap_report =
        score(bootstrap_labels(test_set.docs, schema, cfg.rules, cfg.grouping, threads).values, gold, schema);

    out.params = train(train_set.docs, out.bootstrap, schema, cfg.ple, threads).params;
    out.predictions = predict_corpus(out.params, test_set.docs, schema, cfg.ple.refine_threshold, threads, cfg.grouping);
    std::vector<Annotation> pred;
    for (const auto& p : out.predictions) pred.push_back(p.values);
    out.report = score(pred, gold, schema);
    return out;
}

} // namespace ffrg
