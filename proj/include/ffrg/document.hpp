#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffrg/data_type.hpp"

namespace ffrg {

// Normalized page coordinates, origin top-left, y grows downward.
struct BBox {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }

    bool contains(const BBox& o) const {
        return x0 <= o.x0 && y0 <= o.y0 && x1 >= o.x1 && y1 >= o.y1;
    }
    bool is_valid() const;

    static BBox merge(const BBox& a, const BBox& b);

    friend bool operator==(const BBox&, const BBox&) = default;
};

struct Word {
    int id = 0;
    std::string text;
    BBox box;

    friend bool operator==(const Word&, const Word&) = default;
};

struct Phrase {
    std::vector<int> word_ids; // reading order
    std::string text;
    BBox box;

    friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct Document {
    std::string doc_id;
    int page_width = 1;
    int page_height = 1;
    std::vector<Word> words;
    std::optional<std::vector<Phrase>> phrases;

    friend bool operator==(const Document&, const Document&) = default;
};

using Corpus = std::vector<Document>;

/// Builds a phrase from word ids already in reading order.
Phrase make_phrase(const Document& doc, std::vector<int> word_ids);

/// Word ids sorted into reading order.
///
/// Two words share a line when their vertical centers differ by at most half
/// the smaller of the two heights; lines are the transitive closure of that
/// relation. Lines are ordered by their top edge, words within a line by x0.
/// Remaining ties fall back to the full box and then the text, so the result
/// only depends on the multiset of (text, box) pairs.
std::vector<int> reading_order(const Document& doc);

/// rank[word_id] = position of the word in reading order.
std::vector<int> reading_rank(const Document& doc);

// --- Field schema ----------------------------------------------------------

struct FieldSpec {
    int id = 0; // 1..N, 0 is background
    std::string name;
    std::vector<std::string> keys; // lowercase, trimmed
    DataTypeSet allowed_types;
};

class FieldSchema {
public:
    FieldSchema() = default;
    explicit FieldSchema(std::vector<FieldSpec> fields);

    const std::vector<FieldSpec>& fields() const { return fields_; }
    int num_fields() const { return static_cast<int>(fields_.size()); }
    int num_classes() const { return num_fields() + 1; }

    const FieldSpec& field(int field_id) const;
    std::optional<int> find(std::string_view name) const;

    /// Stable 64-bit digest of the canonical JSON form.
    std::uint64_t hash() const;

private:
    std::vector<FieldSpec> fields_;
};

/// The seven invoice fields with their key lists and data types.
FieldSchema default_invoice_schema();

// --- Labels and annotations -----------------------------------------------

struct DocLabels {
    std::string doc_id;
    std::vector<int> labels; // one class per word id
    friend bool operator==(const DocLabels&, const DocLabels&) = default;
};

struct LabelSet {
    std::string provenance; // "bootstrap" or "refined@branch_j"
    std::vector<DocLabels> docs;

    /// All-background labels aligned with the corpus.
    static LabelSet background(const Corpus& corpus, std::string provenance);
    const DocLabels* find(std::string_view doc_id) const;

    friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

/// Ground-truth or predicted values: field name -> value string.
struct Annotation {
    std::string doc_id;
    std::map<std::string, std::string> fields;
    friend bool operator==(const Annotation&, const Annotation&) = default;
};

// --- JSON Lines I/O -------------------------------------------------------

Document parse_document(std::string_view line, long line_no = -1);
std::string serialize_document(const Document& doc);

Corpus read_documents(const std::string& path);
void write_documents(const std::string& path, const Corpus& corpus);

FieldSchema parse_schema(std::string_view json_text);
FieldSchema load_schema(const std::string& path);
std::string serialize_schema(const FieldSchema& schema);

/// Labels are matched to documents by doc_id and validated against word counts.
LabelSet read_labels(const std::string& path, const Corpus& corpus);
void write_labels(const std::string& path, const LabelSet& labels);
std::string serialize_doc_labels(const DocLabels& labels, const std::string& provenance);

Annotation parse_annotation(std::string_view line, long line_no = -1);
std::string serialize_annotation(const Annotation& a);
std::vector<Annotation> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<Annotation>& annotations);

/// Splits a file into lines; throws IoError when it cannot be opened.
std::vector<std::string> read_lines(const std::string& path);
void write_text(const std::string& path, const std::string& text);

} // namespace ffrg
