#pragma once

#include <vector>

#include "ffrg/document.hpp"

namespace ffrg {

struct GroupingConfig {
    double eps_scale = 0.8;        // eps = eps_scale * median word height
    double vertical_penalty = 3.0; // weight on vertical center offset
    int min_pts = 1;

    void validate() const;
};

/// Anisotropic gap metric: hypot(horizontal gap, penalty * |center dy|).
double word_distance(const Word& a, const Word& b, double vertical_penalty = 3.0);

/// Median word height of the document, 0 for an empty document.
double median_word_height(const Document& doc);

/// DBSCAN over word_distance. With min_pts = 1 every word lands in a cluster.
/// Phrases come back ordered by the reading rank of their first word, and
/// members within a phrase follow reading order.
std::vector<Phrase> group_words(const Document& doc, const GroupingConfig& cfg = {});

/// Copy of the document with phrases filled in.
Document with_phrases(Document doc, const GroupingConfig& cfg = {});

/// phrase index for each word id (-1 if the word is in no phrase).
std::vector<int> phrase_of_word(const Document& doc, const std::vector<Phrase>& phrases);

} // namespace ffrg
