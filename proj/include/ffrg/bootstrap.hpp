#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "ffrg/document.hpp"
#include "ffrg/grouping.hpp"

namespace ffrg {

struct RuleParams {
    double sigma_d = 0.5;
    double sigma_a = 0.5; // radians
    double mu_d = 0.0;
    double alpha = 4.0;
    double theta_v = 0.1;
    double zone_above = 4.0; // in candidate heights
    double zone_below = 1.0;

    void validate() const;
};

/// 1 - Jaro-Winkler similarity (prefix scale 0.1, prefix up to 4 chars).
/// Both inputs are lowercased and trimmed first. Two empty strings give 0.
double string_distance(std::string_view a, std::string_view b);
double jaro_winkler_similarity(std::string_view a, std::string_view b);

/// 1 - min over the field's keys of string_distance(phrase text, key).
double key_score(std::string_view phrase_text, const FieldSpec& field);

struct KeyMatch {
    std::size_t phrase = 0;
    double score = 0;
};

/// Highest key score; ties go to the earlier phrase. nullopt for no phrases.
std::optional<KeyMatch> localize_key(const std::vector<Phrase>& phrases, const FieldSpec& field);

/// Distance term plus alpha times the best of the two angle modes (0, pi/2),
/// measured from the key center to the value center with y pointing down.
double geometric_score(const BBox& key, const BBox& value, const RuleParams& p = {});

inline double value_score(double key_score, double geometric) { return key_score * geometric; }
double value_score(const BBox& key, double key_score, const BBox& candidate, const RuleParams& p = {});

/// Key center inside [0, cand.x1] x [cand.y0 - above*h, cand.y1 + below*h].
bool in_neighbor_zone(const BBox& key, const BBox& candidate, const RuleParams& p = {});

struct FieldExtraction {
    int field_id = 0;
    std::optional<std::size_t> key_phrase;
    std::optional<std::size_t> value_phrase;
    double key_score = 0;
    std::optional<double> value_score;
};

/// Key localization, type gate, neighbor-zone gate and value selection for
/// one field. `phrase_types` holds type_of() of every phrase text.
FieldExtraction extract_field(const std::vector<Phrase>& phrases, const std::vector<DataTypeSet>& phrase_types,
                              const FieldSpec& field, const RuleParams& p = {});
FieldExtraction extract_field(const Document& doc, const std::vector<Phrase>& phrases, const FieldSpec& field,
                              const RuleParams& p = {});

std::vector<DataTypeSet> phrase_types(const std::vector<Phrase>& phrases);

/// All fields for one document, with cross-field claims on the same value
/// phrase resolved in favour of the higher value score (then lower field id).
std::vector<FieldExtraction> extract_document(const std::vector<Phrase>& phrases, const FieldSchema& schema,
                                              const RuleParams& p = {});

struct BootstrapResult {
    LabelSet labels;                 // provenance "bootstrap"
    std::vector<Annotation> values;  // the rule engine's own predictions
};

/// Runs the rule engine over a corpus. Documents without stored phrases are
/// grouped with `grouping`. Output order follows the corpus.
BootstrapResult bootstrap_labels(const Corpus& corpus, const FieldSchema& schema, const RuleParams& p = {},
                                 const GroupingConfig& grouping = {}, int threads = 1);

// Unnormalized Gaussian kernel, peak 1 at x = mu.
inline double gaussian_kernel(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z);
}

} // namespace ffrg
