#include "ffrg/bootstrap.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>
#include <string>

#include "ffrg/errors.hpp"
#include "ffrg/parallel.hpp"
#include "ffrg/typer.hpp"

namespace ffrg {

void RuleParams::validate() const {
    if (!(sigma_d > 0) || !(sigma_a > 0)) throw ConfigError("sigma_d and sigma_a must be positive");
    if (!(theta_v >= 0)) throw ConfigError("theta_v must be >= 0");
    if (!(alpha >= 0)) throw ConfigError("alpha must be >= 0");
    if (!(zone_above >= 0) || !(zone_below >= 0)) throw ConfigError("neighbor zone extents must be >= 0");
}

namespace {

std::string normalize_key_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    out.erase(out.begin(), std::find_if(out.begin(), out.end(), not_space));
    out.erase(std::find_if(out.rbegin(), out.rend(), not_space).base(), out.end());
    return out;
}

double jaro(const std::string& a, const std::string& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;

    const int la = static_cast<int>(a.size());
    const int lb = static_cast<int>(b.size());
    const int window = std::max(0, std::max(la, lb) / 2 - 1);

    std::vector<char> matched_a(la, 0), matched_b(lb, 0);
    int matches = 0;
    for (int i = 0; i < la; ++i) {
        const int lo = std::max(0, i - window);
        const int hi = std::min(lb - 1, i + window);
        for (int j = lo; j <= hi; ++j) {
            if (!matched_b[j] && a[i] == b[j]) {
                matched_a[i] = matched_b[j] = 1;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    int half_transpositions = 0;
    for (int i = 0, k = 0; i < la; ++i) {
        if (!matched_a[i]) continue;
        while (!matched_b[k]) ++k;
        if (a[i] != b[k]) ++half_transpositions;
        ++k;
    }
    const double m = matches;
    const double t = half_transpositions / 2.0;
    return (m / la + m / lb + (m - t) / m) / 3.0;
}

} // namespace

double jaro_winkler_similarity(std::string_view a_raw, std::string_view b_raw) {
    const std::string a = normalize_key_text(a_raw);
    const std::string b = normalize_key_text(b_raw);
    const double j = jaro(a, b);
    int prefix = 0;
    while (prefix < 4 && prefix < static_cast<int>(std::min(a.size(), b.size())) && a[prefix] == b[prefix]) ++prefix;
    return j + prefix * 0.1 * (1.0 - j);
}

double string_distance(std::string_view a, std::string_view b) {
    return 1.0 - jaro_winkler_similarity(a, b);
}

double key_score(std::string_view phrase_text, const FieldSpec& field) {
    double best = 1.0;
    for (const auto& k : field.keys) best = std::min(best, string_distance(phrase_text, k));
    return 1.0 - best;
}

std::optional<KeyMatch> localize_key(const std::vector<Phrase>& phrases, const FieldSpec& field) {
    std::optional<KeyMatch> best;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        const double s = key_score(phrases[i].text, field);
        if (!best || s > best->score) best = KeyMatch{i, s};
    }
    return best;
}

double geometric_score(const BBox& key, const BBox& value, const RuleParams& p) {
    const double dx = value.cx() - key.cx();
    const double dy = value.cy() - key.cy();
    const double dist = std::hypot(dx, dy);
    const double angle = (dx == 0 && dy == 0) ? 0.0 : std::atan2(dy, dx);
    const double angle_term = std::max(gaussian_kernel(angle, 0.0, p.sigma_a),
                                       gaussian_kernel(angle, std::numbers::pi / 2, p.sigma_a));
    return gaussian_kernel(dist, p.mu_d, p.sigma_d) + p.alpha * angle_term;
}

double value_score(const BBox& key, double ks, const BBox& candidate, const RuleParams& p) {
    return value_score(ks, geometric_score(key, candidate, p));
}

bool in_neighbor_zone(const BBox& key, const BBox& candidate, const RuleParams& p) {
    const double h = candidate.height();
    const double x = key.cx();
    const double y = key.cy();
    return x >= 0.0 && x <= candidate.x1 && y >= candidate.y0 - p.zone_above * h && y <= candidate.y1 + p.zone_below * h;
}

std::vector<DataTypeSet> phrase_types(const std::vector<Phrase>& phrases) {
    std::vector<DataTypeSet> out;
    out.reserve(phrases.size());
    for (const auto& ph : phrases) out.push_back(type_of(ph.text));
    return out;
}

FieldExtraction extract_field(const std::vector<Phrase>& phrases, const std::vector<DataTypeSet>& types,
                              const FieldSpec& field, const RuleParams& p) {
    FieldExtraction out;
    out.field_id = field.id;
    auto key = localize_key(phrases, field);
    if (!key) return out;
    out.key_phrase = key->phrase;
    out.key_score = key->score;

    const BBox& key_box = phrases[key->phrase].box;
    std::optional<std::size_t> best;
    double best_score = 0;
    for (std::size_t j = 0; j < phrases.size(); ++j) {
        if (j == key->phrase) continue;
        if (!types[j].intersects(field.allowed_types)) continue;
        if (!in_neighbor_zone(key_box, phrases[j].box, p)) continue;
        const double s = value_score(key_box, key->score, phrases[j].box, p);
        if (!best || s > best_score) {
            best = j;
            best_score = s;
        }
    }
    if (best && best_score > p.theta_v) {
        out.value_phrase = best;
        out.value_score = best_score;
    }
    return out;
}

FieldExtraction extract_field(const Document&, const std::vector<Phrase>& phrases, const FieldSpec& field,
                              const RuleParams& p) {
    return extract_field(phrases, phrase_types(phrases), field, p);
}

std::vector<FieldExtraction> extract_document(const std::vector<Phrase>& phrases, const FieldSchema& schema,
                                              const RuleParams& p) {
    const auto types = phrase_types(phrases);
    std::vector<FieldExtraction> out;
    out.reserve(schema.fields().size());
    for (const auto& f : schema.fields()) out.push_back(extract_field(phrases, types, f, p));

    // Field ids ascend, so a strict comparison keeps the lower id on ties.
    for (std::size_t a = 0; a < out.size(); ++a) {
        for (std::size_t b = a + 1; b < out.size(); ++b) {
            if (!out[a].value_phrase || !out[b].value_phrase || *out[a].value_phrase != *out[b].value_phrase) continue;
            auto& loser = *out[b].value_score > *out[a].value_score ? out[a] : out[b];
            loser.value_phrase.reset();
            loser.value_score.reset();
            if (&loser == &out[a]) break;
        }
    }
    return out;
}

BootstrapResult bootstrap_labels(const Corpus& corpus, const FieldSchema& schema, const RuleParams& p,
                                 const GroupingConfig& grouping, int threads) {
    p.validate();
    BootstrapResult result;
    result.labels = LabelSet::background(corpus, "bootstrap");
    result.values.resize(corpus.size());

    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        const Document& doc = corpus[i];
        const auto phrases = doc.phrases ? *doc.phrases : group_words(doc, grouping);
        const auto fields = extract_document(phrases, schema, p);
        auto& labels = result.labels.docs[i].labels;
        Annotation& values = result.values[i];
        values.doc_id = doc.doc_id;
        for (const auto& fx : fields) {
            if (!fx.value_phrase) continue;
            const Phrase& ph = phrases[*fx.value_phrase];
            for (int wid : ph.word_ids) labels[wid] = fx.field_id;
            values.fields[schema.field(fx.field_id).name] = ph.text;
        }
    });
    return result;
}

} // namespace ffrg
