#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffrg/document.hpp"
#include "ffrg/ple.hpp"
#include "ffrg/synth.hpp"

namespace ffrg {

/// Outcome of one (document, field) pair when predictions meet gold.
enum class Outcome { correct, extractor_error, value_text_error, missed };

std::string_view to_string(Outcome o);

/// A wrong prediction is a value-text error (right words, misread text) when
/// it overlaps the gold words, or, without word ids, when the strings are
/// Jaro-Winkler similar (>= 0.9). Everything else wrong is an extractor error.
Outcome classify_outcome(const std::optional<std::string>& pred, const std::optional<std::string>& gold,
                         const std::vector<int>& pred_words = {}, const std::vector<int>& gold_words = {});

/// Per-word predicted classes and boxes, plus the extracted values.
std::string extract_overlay(const Document& doc, const DocPrediction& pred, const FieldSchema& schema);

/// Per-field outcome records against gold, one JSON object per document.
std::string inspect_overlay(const Document& doc, const DocPrediction& pred, const GoldRecord& gold,
                            const FieldSchema& schema);

/// SVG of the page with every word boxed; `colors[w]` may be empty for none.
std::string render_svg(const Document& doc, const std::vector<std::string>& colors,
                       const std::vector<std::string>& captions = {});

/// Palette used for per-class overlays (background is grey).
std::string class_color(int cls);
/// Correct red, extractor error blue, value-text error purple, missed grey.
std::string outcome_color(Outcome o);

} // namespace ffrg
