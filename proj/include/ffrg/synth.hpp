#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ffrg/document.hpp"

namespace ffrg {

enum class Layout { key_left, key_above, mixed };

struct SynthConfig {
    int n_docs = 100;
    std::uint64_t seed = 7;
    std::vector<Layout> layouts{Layout::mixed};
    double key_paraphrase_rate = 0;
    double unknown_key_rate = 0;
    double char_noise_rate = 0;
    double distractor_density = 0; // distractor phrases per document
    double bbox_jitter = 0;        // std of per-phrase translation, normalized units
    int min_fields = 3;
    std::string id_prefix = "doc";

    void validate() const;
};

/// Named fixtures: "clean" and "noisy-bench".
SynthConfig synth_preset(const std::string& name);

/// Gold values plus the word ids each value occupies.
struct GoldRecord {
    Annotation values;
    std::map<std::string, std::vector<int>> word_ids;
};

struct SynthCorpus {
    Corpus docs;
    std::vector<GoldRecord> gold;
};

/// Deterministic generator. Every document derives its own RNG stream from
/// (seed, index), so output is identical for any thread count.
SynthCorpus generate(const SynthConfig& cfg, const FieldSchema& schema, int threads = 1);

/// Gold JSONL: {"doc_id", "fields": {name: value}, "word_ids": {name: [ids]}}.
std::string serialize_gold(const GoldRecord& g);
std::vector<GoldRecord> read_gold(const std::string& path);
void write_gold(const std::string& path, const std::vector<GoldRecord>& gold);
std::vector<Annotation> gold_annotations(const std::vector<GoldRecord>& gold);

/// Word-level labels implied by the gold word ids.
LabelSet truth_labels(const Corpus& docs, const std::vector<GoldRecord>& gold, const FieldSchema& schema);

struct LabelQuality {
    long true_positive = 0, labeled = 0, positives = 0;
    double precision = 0, recall = 0;
};

/// Word-level precision/recall of a label set against generator truth.
LabelQuality corruption_report(const Corpus& docs, const std::vector<GoldRecord>& gold, const LabelSet& labels,
                               const FieldSchema& schema);

} // namespace ffrg
