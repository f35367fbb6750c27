#include "ffrg/evaluator.hpp"

#include <cctype>
#include <map>

#include <json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "ffrg/errors.hpp"

namespace ffrg {

std::string normalize_value(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    std::string composed;
    if (U_SUCCESS(status)) {
        icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
        icu::UnicodeString n = nfc->normalize(u, status);
        if (U_SUCCESS(status)) n.toUTF8String(composed);
    }
    if (U_FAILURE(status)) composed.assign(s);

    std::string out;
    out.reserve(composed.size());
    bool pending_space = false;
    for (unsigned char c : composed) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

double safe_ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

double harmonic_mean(double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); }

EvalReport score(const std::vector<Annotation>& predictions, const std::vector<Annotation>& gold,
                 const FieldSchema& schema) {
    std::map<std::string, const Annotation*> pred_by_doc, gold_by_doc;
    for (const auto& a : predictions) pred_by_doc[a.doc_id] = &a;
    for (const auto& a : gold) gold_by_doc[a.doc_id] = &a;

    auto check_fields = [&](const Annotation& a, const char* what) {
        for (const auto& [name, value] : a.fields)
            if (!schema.find(name))
                throw ValidationError(std::string(what) + " for doc " + a.doc_id + " names unknown field '" + name + "'");
    };
    for (const auto& a : predictions) check_fields(a, "prediction");
    for (const auto& a : gold) check_fields(a, "annotation");

    std::map<std::string, bool> doc_ids;
    for (const auto& [id, _] : pred_by_doc) doc_ids[id] = true;
    for (const auto& [id, _] : gold_by_doc) doc_ids[id] = true;

    const int n = schema.num_fields();
    std::vector<long> tp(n, 0), fp(n, 0), fn(n, 0);
    auto lookup = [](const std::map<std::string, const Annotation*>& m, const std::string& doc,
                     const std::string& field) -> const std::string* {
        auto it = m.find(doc);
        if (it == m.end()) return nullptr;
        auto f = it->second->fields.find(field);
        return f == it->second->fields.end() ? nullptr : &f->second;
    };

    for (const auto& [doc, _] : doc_ids) {
        for (int k = 0; k < n; ++k) {
            const auto& name = schema.fields()[k].name;
            const std::string* p = lookup(pred_by_doc, doc, name);
            const std::string* g = lookup(gold_by_doc, doc, name);
            if (p && g && normalize_value(*p) == normalize_value(*g)) {
                ++tp[k];
            } else {
                if (p) ++fp[k];
                if (g) ++fn[k];
            }
        }
    }

    EvalReport report;
    int included = 0;
    for (int k = 0; k < n; ++k) {
        FieldMetrics m;
        m.name = schema.fields()[k].name;
        m.tp = tp[k];
        m.fp = fp[k];
        m.fn = fn[k];
        m.precision = safe_ratio(tp[k], tp[k] + fp[k]);
        m.recall = safe_ratio(tp[k], tp[k] + fn[k]);
        m.f1 = harmonic_mean(m.precision, m.recall);
        m.included = tp[k] + fp[k] + fn[k] > 0;
        if (m.included) {
            ++included;
            report.macro_precision += m.precision;
            report.macro_recall += m.recall;
            report.macro_f1 += m.f1;
        }
        report.fields.push_back(std::move(m));
    }
    report.macro_precision = safe_ratio(report.macro_precision, included);
    report.macro_recall = safe_ratio(report.macro_recall, included);
    report.macro_f1 = safe_ratio(report.macro_f1, included);
    return report;
}

EvalReport aggregate_runs(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw ValidationError("aggregate_runs: no reports");
    EvalReport out;
    out.runs = static_cast<int>(reports.size());
    out.fields = reports.front().fields;
    for (auto& f : out.fields) {
        f.tp.reset();
        f.fp.reset();
        f.fn.reset();
        f.precision = f.recall = f.f1 = 0;
        f.included = false;
    }
    const double n = static_cast<double>(reports.size());
    for (const auto& r : reports) {
        if (r.fields.size() != out.fields.size()) throw ValidationError("aggregate_runs: reports disagree on fields");
        for (size_t k = 0; k < r.fields.size(); ++k) {
            out.fields[k].precision += r.fields[k].precision / n;
            out.fields[k].recall += r.fields[k].recall / n;
            out.fields[k].f1 += r.fields[k].f1 / n;
            out.fields[k].included = out.fields[k].included || r.fields[k].included;
        }
        out.macro_precision += r.macro_precision / n;
        out.macro_recall += r.macro_recall / n;
        out.macro_f1 += r.macro_f1 / n;
    }
    return out;
}

std::string report_to_json(const EvalReport& report, bool per_field) {
    nlohmann::ordered_json j;
    j["runs"] = report.runs;
    j["macro_precision"] = report.macro_precision;
    j["macro_recall"] = report.macro_recall;
    j["macro_f1"] = report.macro_f1;
    if (per_field) {
        auto fields = nlohmann::ordered_json::array();
        for (const auto& f : report.fields) {
            nlohmann::ordered_json jf;
            jf["name"] = f.name;
            if (f.tp) jf["tp"] = *f.tp;
            if (f.fp) jf["fp"] = *f.fp;
            if (f.fn) jf["fn"] = *f.fn;
            jf["precision"] = f.precision;
            jf["recall"] = f.recall;
            jf["f1"] = f.f1;
            jf["included"] = f.included;
            fields.push_back(std::move(jf));
        }
        j["fields"] = std::move(fields);
    }
    return j.dump(2) + "\n";
}

} // namespace ffrg
