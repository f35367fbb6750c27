#include "ffrg/overlay.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "ffrg/bootstrap.hpp"
#include "ffrg/evaluator.hpp"

namespace ffrg {

using nlohmann::ordered_json;

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::correct: return "correct";
    case Outcome::extractor_error: return "extractor-error";
    case Outcome::value_text_error: return "value-text-error";
    case Outcome::missed: return "missed";
    }
    return "?";
}

Outcome classify_outcome(const std::optional<std::string>& pred, const std::optional<std::string>& gold,
                         const std::vector<int>& pred_words, const std::vector<int>& gold_words) {
    if (!pred) return Outcome::missed;
    if (!gold) return Outcome::extractor_error;
    if (normalize_value(*pred) == normalize_value(*gold)) return Outcome::correct;
    if (!gold_words.empty()) {
        const bool overlap = std::any_of(pred_words.begin(), pred_words.end(), [&](int w) {
            return std::find(gold_words.begin(), gold_words.end(), w) != gold_words.end();
        });
        return overlap ? Outcome::value_text_error : Outcome::extractor_error;
    }
    return jaro_winkler_similarity(*pred, *gold) >= 0.9 ? Outcome::value_text_error : Outcome::extractor_error;
}

namespace {

ordered_json box_json(const BBox& b) { return {b.x0, b.y0, b.x1, b.y1}; }

std::string class_name(int cls, const FieldSchema& schema) {
    return cls == 0 ? "background" : schema.field(cls).name;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string extract_overlay(const Document& doc, const DocPrediction& pred, const FieldSchema& schema) {
    ordered_json words = ordered_json::array();
    for (const auto& w : doc.words)
        words.push_back({{"id", w.id}, {"text", w.text}, {"bbox", box_json(w.box)},
                         {"class", class_name(pred.word_class.at(w.id), schema)}});
    ordered_json values = ordered_json::object();
    for (const auto& f : schema.fields()) {
        auto it = pred.values.fields.find(f.name);
        if (it == pred.values.fields.end()) continue;
        values[f.name] = {{"value", it->second}, {"word_ids", pred.spans[f.id - 1]}};
    }
    return ordered_json{{"doc_id", doc.doc_id}, {"words", words}, {"values", values}}.dump();
}

std::string inspect_overlay(const Document& doc, const DocPrediction& pred, const GoldRecord& gold,
                            const FieldSchema& schema) {
    ordered_json fields = ordered_json::array();
    for (const auto& f : schema.fields()) {
        std::optional<std::string> p, g;
        if (auto it = pred.values.fields.find(f.name); it != pred.values.fields.end()) p = it->second;
        if (auto it = gold.values.fields.find(f.name); it != gold.values.fields.end()) g = it->second;
        if (!p && !g) continue;
        std::vector<int> gw;
        if (auto it = gold.word_ids.find(f.name); it != gold.word_ids.end()) gw = it->second;
        const auto& pw = pred.spans[f.id - 1];
        const Outcome o = classify_outcome(p, g, pw, gw);
        fields.push_back({{"field", f.name},
                          {"status", to_string(o)},
                          {"pred", p ? ordered_json(*p) : ordered_json(nullptr)},
                          {"gold", g ? ordered_json(*g) : ordered_json(nullptr)},
                          {"pred_word_ids", pw},
                          {"gold_word_ids", gw}});
    }
    return ordered_json{{"doc_id", doc.doc_id}, {"fields", fields}}.dump();
}

std::string class_color(int cls) {
    static const char* palette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                                    "#42d4f4", "#f032e6", "#9a6324", "#469990", "#808000"};
    if (cls == 0) return "#bbbbbb";
    return palette[(cls - 1) % 10];
}

std::string outcome_color(Outcome o) {
    switch (o) {
    case Outcome::correct: return "red";
    case Outcome::extractor_error: return "blue";
    case Outcome::value_text_error: return "purple";
    case Outcome::missed: return "grey";
    }
    return "black";
}

std::string render_svg(const Document& doc, const std::vector<std::string>& colors,
                       const std::vector<std::string>& captions) {
    const double W = doc.page_width > 1 ? doc.page_width : 850;
    const double H = doc.page_height > 1 ? doc.page_height : 1100;
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                  W, H, W, H);
    out += buf;
    for (const auto& w : doc.words) {
        const std::string& color = w.id < static_cast<int>(colors.size()) ? colors[w.id] : std::string();
        const double x = w.box.x0 * W, y = w.box.y0 * H, bw = w.box.width() * W, bh = w.box.height() * H;
        const std::string fill = color.empty() ? "black" : color;
        if (!color.empty()) {
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"%s\"/>\n", x,
                          y, bw, bh, color.c_str());
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"%.1f\" fill=\"%s\">", x, y + 0.85 * bh,
                      0.9 * bh, fill.c_str());
        out += buf;
        out += escape_xml(w.text);
        out += "</text>\n";
    }
    double y = 16;
    for (const auto& c : captions) {
        std::snprintf(buf, sizeof buf, "<text x=\"4\" y=\"%.1f\" font-size=\"11\" fill=\"#444\">", y);
        out += buf;
        out += escape_xml(c);
        out += "</text>\n";
        y += 13;
    }
    out += "</svg>\n";
    return out;
}

} // namespace ffrg
