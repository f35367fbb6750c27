#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffrg/document.hpp"

namespace ffrg {

struct FieldMetrics {
    std::string name;
    // Counts are absent on aggregated reports.
    std::optional<long> tp, fp, fn;
    double precision = 0, recall = 0, f1 = 0;
    bool included = true; // false when the field never occurs in gold or predictions
};

struct EvalReport {
    std::vector<FieldMetrics> fields;
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
    int runs = 1;
};

/// NFC, trim, collapse internal whitespace runs to one space. Case is kept.
std::string normalize_value(std::string_view s);

/// Precision, recall and F1 with the 0/0 -> 0 convention.
double safe_ratio(double num, double den);
double harmonic_mean(double p, double r);

/// Exact-match scoring keyed by (doc_id, field name).
EvalReport score(const std::vector<Annotation>& predictions, const std::vector<Annotation>& gold,
                 const FieldSchema& schema);

/// Mean of every metric across runs; counts dropped.
EvalReport aggregate_runs(const std::vector<EvalReport>& reports);

std::string report_to_json(const EvalReport& report, bool per_field = true);

} // namespace ffrg
