#include "ffrg/document.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ffrg/errors.hpp"

namespace ffrg {

using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

// Disjoint-set forest over [0, n).
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

auto word_key(const Word& w) {
    return std::tie(w.box.x0, w.box.y0, w.box.x1, w.box.y1, w.text);
}

} // namespace

bool BBox::is_valid() const {
    return in_unit(x0) && in_unit(y0) && in_unit(x1) && in_unit(y1) && x0 <= x1 && y0 <= y1;
}

BBox BBox::merge(const BBox& a, const BBox& b) {
    return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

Phrase make_phrase(const Document& doc, std::vector<int> word_ids) {
    if (word_ids.empty()) throw ValidationError(doc.doc_id + ": empty phrase");
    Phrase p;
    p.box = doc.words.at(word_ids.front()).box;
    for (size_t i = 0; i < word_ids.size(); ++i) {
        const Word& w = doc.words.at(word_ids[i]);
        if (i) p.text += ' ';
        p.text += w.text;
        p.box = BBox::merge(p.box, w.box);
    }
    p.word_ids = std::move(word_ids);
    return p;
}

std::vector<int> reading_order(const Document& doc) {
    const auto& words = doc.words;
    const int n = static_cast<int>(words.size());
    UnionFind lines(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const BBox& a = words[i].box;
            const BBox& b = words[j].box;
            double tol = 0.5 * std::min(a.height(), b.height());
            if (std::abs(a.cy() - b.cy()) <= tol) lines.unite(i, j);
        }
    }

    std::unordered_map<int, std::vector<int>> members;
    for (int i = 0; i < n; ++i) members[lines.find(i)].push_back(i);

    auto word_less = [&](int a, int b) { return word_key(words[a]) < word_key(words[b]); };

    std::vector<std::vector<int>> grouped;
    grouped.reserve(members.size());
    for (auto& [root, ids] : members) {
        std::sort(ids.begin(), ids.end(), word_less);
        grouped.push_back(std::move(ids));
    }

    auto top = [&](const std::vector<int>& line) {
        double t = words[line.front()].box.y0;
        for (int id : line) t = std::min(t, words[id].box.y0);
        return t;
    };
    std::sort(grouped.begin(), grouped.end(), [&](const auto& a, const auto& b) {
        double ta = top(a), tb = top(b);
        if (ta != tb) return ta < tb;
        // first word of each line is already the x-minimal one
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), word_less);
    });

    std::vector<int> order;
    order.reserve(n);
    for (const auto& line : grouped) order.insert(order.end(), line.begin(), line.end());
    return order;
}

std::vector<int> reading_rank(const Document& doc) {
    auto order = reading_order(doc);
    std::vector<int> rank(order.size());
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    return rank;
}

// --- Schema ----------------------------------------------------------------

FieldSchema::FieldSchema(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
    std::unordered_set<std::string> names;
    for (size_t i = 0; i < fields_.size(); ++i) {
        const auto& f = fields_[i];
        if (f.id != static_cast<int>(i) + 1)
            throw ValidationError("schema field '" + f.name + "': ids must be 1..N in order");
        if (f.name.empty()) throw ValidationError("schema field " + std::to_string(f.id) + ": empty name");
        if (!names.insert(f.name).second) throw ValidationError("schema: duplicate field name '" + f.name + "'");
        if (f.keys.empty()) throw ValidationError("schema field '" + f.name + "': no keys");
        for (const auto& k : f.keys) {
            std::string lowered = k;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (k.empty() || lowered != k || trim(k) != k)
                throw ValidationError("schema field '" + f.name + "': key '" + k + "' must be lowercase and trimmed");
        }
        if (f.allowed_types.empty()) throw ValidationError("schema field '" + f.name + "': no data types");
    }
}

const FieldSpec& FieldSchema::field(int field_id) const {
    if (field_id < 1 || field_id > num_fields())
        throw ValidationError("field id " + std::to_string(field_id) + " out of range");
    return fields_[field_id - 1];
}

std::optional<int> FieldSchema::find(std::string_view name) const {
    for (const auto& f : fields_)
        if (f.name == name) return f.id;
    return std::nullopt;
}

std::uint64_t FieldSchema::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : serialize_schema(*this)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

FieldSchema default_invoice_schema() {
    using DT = DataType;
    return FieldSchema({
        {1, "inv_number", {"invoice number", "invoice #", "invoice", "invoice no.", "invoice no"}, {DT::number}},
        {2, "po_number", {"po #", "po number", "p.o. #", "p.o. number", "po", "purchase order number"}, {DT::number}},
        {3, "inv_date", {"date", "invoice date:", "invoice date"}, {DT::date}},
        {4, "due_date", {"due date"}, {DT::date}},
        {5, "total_amount", {"total", "invoice total"}, {DT::number, DT::money}},
        {6, "due_amount", {"amount due", "balance due"}, {DT::number, DT::money}},
        {7, "total_tax", {"tax"}, {DT::number, DT::money}},
    });
}

FieldSchema parse_schema(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("schema: ") + e.what());
    }
    try {
        std::vector<FieldSpec> fields;
        for (const auto& jf : j.at("fields")) {
            FieldSpec f;
            f.id = jf.at("id").get<int>();
            f.name = jf.at("name").get<std::string>();
            f.keys = jf.at("keys").get<std::vector<std::string>>();
            for (const auto& t : jf.at("types")) f.allowed_types.insert(data_type_from_string(t.get<std::string>()));
            fields.push_back(std::move(f));
        }
        return FieldSchema(std::move(fields));
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema: ") + e.what());
    }
}

FieldSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schema(ss.str());
}

std::string serialize_schema(const FieldSchema& schema) {
    json fields = json::array();
    for (const auto& f : schema.fields()) {
        json types = json::array();
        for (auto t : f.allowed_types.members()) types.push_back(std::string(to_string(t)));
        fields.push_back({{"id", f.id}, {"name", f.name}, {"keys", f.keys}, {"types", types}});
    }
    return json{{"fields", fields}}.dump();
}

// --- Documents --------------------------------------------------------------

Document parse_document(std::string_view line, long line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }

    Document doc;
    std::vector<std::array<double, 4>> raw;
    try {
        doc.doc_id = j.at("doc_id").get<std::string>();
        doc.page_width = j.at("page_width").get<int>();
        doc.page_height = j.at("page_height").get<int>();
        for (const auto& jw : j.at("words")) {
            Word w;
            w.id = static_cast<int>(doc.words.size());
            w.text = trim(jw.at("text").get<std::string>());
            auto box = jw.at("box").get<std::vector<double>>();
            if (box.size() != 4) throw ParseError(doc.doc_id + ": word " + std::to_string(w.id) + " box needs 4 numbers", line_no);
            raw.push_back({box[0], box[1], box[2], box[3]});
            doc.words.push_back(std::move(w));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad document: ") + e.what(), line_no);
    }

    auto where = [&](const Word& w) {
        return (line_no >= 0 ? "line " + std::to_string(line_no) + ": " : std::string()) + doc.doc_id + " word " +
               std::to_string(w.id) + " '" + w.text + "'";
    };

    if (doc.page_width <= 0 || doc.page_height <= 0)
        throw ValidationError(doc.doc_id + ": page dimensions must be positive");

    double max_coord = 0;
    for (const auto& b : raw)
        for (double v : b) max_coord = std::max(max_coord, v);
    const bool pixels = max_coord > 1.5;

    for (size_t i = 0; i < raw.size(); ++i) {
        auto& w = doc.words[i];
        if (w.text.empty()) throw ValidationError(where(w) + ": empty text");
        auto [x0, y0, x1, y1] = raw[i];
        if (pixels) {
            x0 /= doc.page_width;
            x1 /= doc.page_width;
            y0 /= doc.page_height;
            y1 /= doc.page_height;
        }
        w.box = {x0, y0, x1, y1};
        if (!w.box.is_valid()) throw ValidationError(where(w) + ": box outside [0,1] or inverted");
    }

    if (j.contains("phrases")) {
        std::vector<Phrase> phrases;
        std::vector<bool> used(doc.words.size(), false);
        try {
            for (const auto& jp : j.at("phrases")) {
                auto ids = jp.at("word_ids").get<std::vector<int>>();
                for (int id : ids) {
                    if (id < 0 || id >= static_cast<int>(doc.words.size()))
                        throw ValidationError(doc.doc_id + ": phrase references missing word " + std::to_string(id));
                    if (used[id])
                        throw ValidationError(doc.doc_id + ": word " + std::to_string(id) + " in two phrases");
                    used[id] = true;
                }
                phrases.push_back(make_phrase(doc, std::move(ids)));
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad phrases: ") + e.what(), line_no);
        }
        doc.phrases = std::move(phrases);
    }
    return doc;
}

std::string serialize_document(const Document& doc) {
    json words = json::array();
    for (const auto& w : doc.words)
        words.push_back({{"text", w.text}, {"box", {w.box.x0, w.box.y0, w.box.x1, w.box.y1}}});
    json j = {{"doc_id", doc.doc_id},
              {"page_width", doc.page_width},
              {"page_height", doc.page_height},
              {"words", words}};
    if (doc.phrases) {
        json phrases = json::array();
        for (const auto& p : *doc.phrases)
            phrases.push_back({{"word_ids", p.word_ids},
                               {"text", p.text},
                               {"box", {p.box.x0, p.box.y0, p.box.x1, p.box.y1}}});
        j["phrases"] = phrases;
    }
    return j.dump();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

namespace {

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

template <class T, class F>
void write_jsonl(const std::string& path, const std::vector<T>& items, F&& encode) {
    std::string text;
    for (const auto& item : items) {
        text += encode(item);
        text += '\n';
    }
    write_text(path, text);
}

} // namespace

Corpus read_documents(const std::string& path) {
    auto lines = read_lines(path);
    Corpus corpus;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        corpus.push_back(parse_document(lines[i], static_cast<long>(i) + 1));
    }
    return corpus;
}

void write_documents(const std::string& path, const Corpus& corpus) {
    write_jsonl(path, corpus, serialize_document);
}

// --- Labels ----------------------------------------------------------------

LabelSet LabelSet::background(const Corpus& corpus, std::string provenance) {
    LabelSet ls;
    ls.provenance = std::move(provenance);
    ls.docs.reserve(corpus.size());
    for (const auto& d : corpus) ls.docs.push_back({d.doc_id, std::vector<int>(d.words.size(), 0)});
    return ls;
}

const DocLabels* LabelSet::find(std::string_view doc_id) const {
    for (const auto& d : docs)
        if (d.doc_id == doc_id) return &d;
    return nullptr;
}

std::string serialize_doc_labels(const DocLabels& labels, const std::string& provenance) {
    json pairs = json::array();
    for (size_t i = 0; i < labels.labels.size(); ++i)
        if (labels.labels[i] != 0) pairs.push_back({static_cast<int>(i), labels.labels[i]});
    return json{{"doc_id", labels.doc_id}, {"labels", pairs}, {"provenance", provenance}}.dump();
}

void write_labels(const std::string& path, const LabelSet& labels) {
    write_jsonl(path, labels.docs, [&](const DocLabels& d) { return serialize_doc_labels(d, labels.provenance); });
}

LabelSet read_labels(const std::string& path, const Corpus& corpus) {
    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < corpus.size(); ++i) index.emplace(corpus[i].doc_id, i);

    LabelSet ls = LabelSet::background(corpus, "");
    std::vector<bool> seen(corpus.size(), false);
    auto lines = read_lines(path);
    for (size_t ln = 0; ln < lines.size(); ++ln) {
        if (blank(lines[ln])) continue;
        const long line_no = static_cast<long>(ln) + 1;
        json j;
        try {
            j = json::parse(lines[ln]);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        try {
            auto doc_id = j.at("doc_id").get<std::string>();
            auto it = index.find(doc_id);
            if (it == index.end())
                throw ValidationError("line " + std::to_string(line_no) + ": labels for unknown doc " + doc_id);
            auto& dst = ls.docs[it->second].labels;
            for (const auto& pair : j.at("labels")) {
                int wid = pair.at(0).get<int>();
                int cls = pair.at(1).get<int>();
                if (wid < 0 || wid >= static_cast<int>(dst.size()) || cls < 0)
                    throw ValidationError("line " + std::to_string(line_no) + ": " + doc_id + " label [" +
                                          std::to_string(wid) + "," + std::to_string(cls) + "] out of range");
                dst[wid] = cls;
            }
            if (j.contains("provenance")) ls.provenance = j.at("provenance").get<std::string>();
            seen[it->second] = true;
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad label record: ") + e.what(), line_no);
        }
    }
    for (size_t i = 0; i < corpus.size(); ++i)
        if (!seen[i]) throw ValidationError("labels missing for doc " + corpus[i].doc_id);
    return ls;
}

// --- Annotations -----------------------------------------------------------

Annotation parse_annotation(std::string_view line, long line_no) {
    try {
        json j = json::parse(line);
        Annotation a;
        a.doc_id = j.at("doc_id").get<std::string>();
        a.fields = j.at("fields").get<std::map<std::string, std::string>>();
        return a;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad annotation: ") + e.what(), line_no);
    }
}

std::string serialize_annotation(const Annotation& a) {
    return json{{"doc_id", a.doc_id}, {"fields", a.fields}}.dump();
}

std::vector<Annotation> read_annotations(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<Annotation> out;
    std::unordered_set<std::string> ids;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        out.push_back(parse_annotation(lines[i], static_cast<long>(i) + 1));
        if (!ids.insert(out.back().doc_id).second)
            throw ValidationError("line " + std::to_string(i + 1) + ": duplicate doc " + out.back().doc_id);
    }
    return out;
}

void write_annotations(const std::string& path, const std::vector<Annotation>& annotations) {
    write_jsonl(path, annotations, serialize_annotation);
}

} // namespace ffrg
