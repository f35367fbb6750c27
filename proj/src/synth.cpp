#include "ffrg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ffrg/errors.hpp"
#include "ffrg/parallel.hpp"

namespace ffrg {

void SynthConfig::validate() const {
    auto rate = [](double r, const char* name) {
        if (!(r >= 0 && r <= 1)) throw ConfigError(std::string(name) + " must be in [0,1]");
    };
    if (n_docs < 0) throw ConfigError("n_docs must be >= 0");
    if (layouts.empty()) throw ConfigError("at least one layout template is required");
    rate(key_paraphrase_rate, "key_paraphrase_rate");
    rate(unknown_key_rate, "unknown_key_rate");
    rate(char_noise_rate, "char_noise_rate");
    if (!(distractor_density >= 0)) throw ConfigError("distractor_density must be >= 0");
    if (!(bbox_jitter >= 0)) throw ConfigError("bbox_jitter must be >= 0");
    if (min_fields < 0) throw ConfigError("min_fields must be >= 0");
}

SynthConfig synth_preset(const std::string& name) {
    SynthConfig cfg;
    cfg.layouts = {Layout::key_left, Layout::key_above, Layout::mixed};
    if (name == "clean") return cfg;
    if (name == "noisy-bench") {
        cfg.key_paraphrase_rate = 0.3;
        cfg.unknown_key_rate = 0.1;
        cfg.char_noise_rate = 0.03;
        cfg.distractor_density = 20;
        cfg.bbox_jitter = 0.005;
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "' (expected clean or noisy-bench)");
}

namespace {

constexpr double kPageWidth = 850;
constexpr double kPageHeight = 1100;

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    bool chance(double p) { return p > 0 && uniform() < p; }
    double normal(double sd) { return sd > 0 ? std::normal_distribution<double>(0.0, sd)(gen_) : 0.0; }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[integer(0, static_cast<int>(v.size()) - 1)]; }
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[integer(0, i)]);
    }

private:
    std::mt19937_64 gen_;
};

// --- Text generators ---------------------------------------------------------

const std::vector<std::string> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s = "0" + s;
    return s;
}

std::string random_date(Rng& rng) {
    const int y = rng.integer(2017, 2023), m = rng.integer(1, 12), d = rng.integer(1, 28);
    switch (rng.integer(0, 2)) {
    case 0: return pad(m, 2) + "/" + pad(d, 2) + "/" + std::to_string(y);
    case 1: return std::to_string(y) + "-" + pad(m, 2) + "-" + pad(d, 2);
    default: return kMonths[m - 1] + " " + std::to_string(d) + ", " + std::to_string(y);
    }
}

std::string group_thousands(long whole) {
    std::string digits = std::to_string(whole);
    std::string out;
    const int n = static_cast<int>(digits.size());
    for (int i = 0; i < n; ++i) {
        if (i && (n - i) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

std::string format_money(long cents, int style) {
    const std::string amount = group_thousands(cents / 100) + "." + pad(static_cast<int>(cents % 100), 2);
    switch (style) {
    case 0: return "$" + amount;
    case 1: return amount;
    default: return "USD " + amount;
    }
}

std::string random_id(Rng& rng, bool purchase_order) {
    auto digits = [&](int n) {
        std::string s;
        for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.integer(i == 0 ? 1 : 0, 9)));
        return s;
    };
    if (purchase_order) {
        switch (rng.integer(0, 2)) {
        case 0: return "45" + digits(8);
        case 1: return "P" + digits(5);
        default: return "#" + digits(6);
        }
    }
    switch (rng.integer(0, 3)) {
    case 0: return "INV-" + digits(6);
    case 1: return std::string(1, static_cast<char>('A' + rng.integer(0, 25))) + "B" + digits(5);
    case 2: return digits(8);
    default: return "#" + digits(6);
    }
}

struct FieldText {
    std::vector<std::string> paraphrases; // near misses of the lexicon
    std::vector<std::string> unknown;     // keys outside the lexicon
};

const std::unordered_map<std::string, FieldText>& invoice_key_variants() {
    static const std::unordered_map<std::string, FieldText> table = {
        {"inv_number", {{"Invoice Num", "Inv Number", "Inv. No.", "Invoice ID", "Invoice Number:", "Invoice No:"},
                        {"Reference", "Bill No", "Document"}}},
        {"po_number", {{"PO No.", "Purchase Order", "P.O. No", "PO Num", "PO Number:", "Purchase Order No"},
                       {"Order Ref", "Customer Ref", "Your Ref"}}},
        {"inv_date", {{"Invoice Dt", "Inv Date", "Invoice Date", "Date:", "Date Issued", "Billing Date"},
                      {"Issued", "Created", "Dated"}}},
        {"due_date", {{"Due Date:", "Due On", "Due By", "Payment Due Date", "Date Due"},
                      {"Pay Before", "Payable By", "Expires"}}},
        {"total_amount", {{"Total:", "Grand Total", "Invoice Total:", "Total Amount", "Totals"},
                          {"Sum", "Net Payable", "Charges"}}},
        {"due_amount", {{"Amount Due:", "Balance Due:", "Amount Payable", "Balance", "Total Due"},
                        {"Please Pay", "Pay This", "Outstanding"}}},
        {"total_tax", {{"Tax:", "Sales Tax", "Tax Amount", "Taxes", "Total Tax"}, {"VAT", "GST", "Levy"}}},
    };
    return table;
}

std::string title_case(const std::string& s) {
    std::string out = s;
    bool start = true;
    for (char& c : out) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            c = static_cast<char>(start ? std::toupper(c) : std::tolower(c));
            start = false;
        } else if (c == ' ') {
            start = true;
        }
    }
    return out;
}

std::string upper_case(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string styled(Rng& rng, const std::string& key) {
    switch (rng.integer(0, 2)) {
    case 0: return title_case(key);
    case 1: return upper_case(key);
    default: return key;
    }
}

char corrupt_char(Rng& rng, char c) {
    static const std::unordered_map<char, std::string> confusions = {
        {'0', "O8"}, {'O', "0Q"}, {'o', "0c"}, {'1', "l7"}, {'l', "1I"}, {'I', "1l"}, {'5', "S6"}, {'S', "58"},
        {'8', "B3"}, {'B', "8R"}, {'e', "c"}, {'c', "e"},  {'a', "o"},  {'2', "Z"},  {'6', "b5"}, {'9', "g"},
        {'.', ","},  {',', "."},  {'$', "S"},  {'n', "m"},  {'m', "n"},  {'t', "f"},  {'r', "n"},  {'u', "v"}};
    auto it = confusions.find(c);
    if (it != confusions.end()) return it->second[rng.integer(0, static_cast<int>(it->second.size()) - 1)];
    if (std::isdigit(static_cast<unsigned char>(c))) return static_cast<char>('0' + rng.integer(0, 9));
    if (std::isupper(static_cast<unsigned char>(c))) return static_cast<char>('A' + rng.integer(0, 25));
    if (std::islower(static_cast<unsigned char>(c))) return static_cast<char>('a' + rng.integer(0, 25));
    return c;
}

// --- Layout ------------------------------------------------------------------

struct Placed {
    std::vector<std::string> words;
    double x0 = 0, y0 = 0; // normalized top-left
    int field = 0;         // field id for value phrases
    std::vector<int> word_ids;
};

struct Metrics {
    double height;     // normalized y
    double char_width; // normalized x
    double space;      // normalized x
};

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

double text_width(const std::vector<std::string>& words, const Metrics& m) {
    double w = 0;
    for (size_t i = 0; i < words.size(); ++i) w += words[i].size() * m.char_width + (i ? m.space : 0);
    return w;
}

struct Slot {
    double x, y;
};

constexpr double kColumnWidth = 0.31;

// 2 rows x 3 columns. Rows sit further apart than the context radius used by
// the featurizer, so each value's neighborhood holds its own key only.
std::vector<Slot> grid(double y_top) {
    std::vector<Slot> slots;
    for (int r = 0; r < 2; ++r)
        for (double x : {0.03, 0.35, 0.67}) slots.push_back({x, y_top + 0.16 * r});
    return slots;
}

enum class ValueKind { date, money, id, po_id };

ValueKind value_kind(const FieldSpec& f) {
    if (f.allowed_types.contains(DataType::money)) return ValueKind::money;
    if (f.allowed_types.contains(DataType::date)) return ValueKind::date;
    return f.name.rfind("po", 0) == 0 ? ValueKind::po_id : ValueKind::id;
}

struct DocBuilder {
    const SynthConfig& cfg;
    const FieldSchema& schema;
    Rng rng;
    Metrics m{};
    std::vector<Placed> placed;

    DocBuilder(const SynthConfig& c, const FieldSchema& s, std::uint64_t seed) : cfg(c), schema(s), rng(seed) {
        const double font = rng.integer(11, 14);
        m = {font / kPageHeight, 0.55 * font / kPageWidth, 0.35 * font / kPageWidth};
    }

    Placed& put(const std::string& text, double x, double y, int field = 0) {
        Placed p;
        p.words = split_words(text);
        p.x0 = x;
        p.y0 = y;
        p.field = field;
        placed.push_back(std::move(p));
        return placed.back();
    }

    // key and value in the chosen relation; returns false if it cannot fit
    void put_pair(const std::string& key, const std::string& value, Slot slot, bool above, int field) {
        const auto key_words = split_words(key);
        const auto value_words = split_words(value);
        const double kw = text_width(key_words, m);
        const double vw = text_width(value_words, m);
        if (!above && kw + 0.04 + vw > kColumnWidth) above = true; // would run into the next column
        if (above) {
            // value centered under the key; a wide value pushes the key right
            const double kx = slot.x + std::max(0.0, 0.5 * (vw - kw));
            put(key, kx, slot.y);
            put(value, kx + 0.5 * kw - 0.5 * vw, slot.y + 1.7 * m.height, field);
        } else {
            put(key, slot.x, slot.y);
            put(value, slot.x + kw + rng.uniform(0.02, 0.04), slot.y, field);
        }
    }

    std::string value_for(const FieldSpec& f, long total_cents, long tax_cents, long due_cents, int money_style) {
        switch (value_kind(f)) {
        case ValueKind::date: return random_date(rng);
        case ValueKind::id: return random_id(rng, false);
        case ValueKind::po_id: return random_id(rng, true);
        case ValueKind::money: break;
        }
        long cents = total_cents;
        if (f.name.find("tax") != std::string::npos) cents = tax_cents;
        else if (f.name.find("due") != std::string::npos) cents = due_cents;
        else if (f.name.find("total") == std::string::npos) cents = rng.integer(100, 500000);
        return format_money(cents, money_style);
    }

    std::string key_for(const FieldSpec& f) {
        const auto& table = invoice_key_variants();
        auto it = table.find(f.name);
        if (rng.chance(cfg.unknown_key_rate)) {
            if (it != table.end()) return rng.pick(it->second.unknown);
            return "Ref";
        }
        if (rng.chance(cfg.key_paraphrase_rate)) {
            if (it != table.end()) return rng.pick(it->second.paraphrases);
            return title_case(f.keys.front()) + ":";
        }
        return styled(rng, rng.pick(f.keys));
    }

    void add_distractors(std::vector<Slot>& top_free, std::vector<Slot>& bottom_free, bool above_layout) {
        static const std::vector<std::pair<std::string, int>> confusers = {
            {"Subtotal", 2}, {"Ship Date", 1}, {"Account Number", 0}, {"Order Date", 1}, {"Amount Paid", 2},
            {"Customer No", 0}, {"Discount", 2}, {"Shipping", 2}, {"Delivery Date", 1}, {"Phone", 3}};
        static const std::vector<std::string> items = {"Consulting services", "Widget A", "Office chairs",
                                                       "Software license", "Maintenance", "Freight",
                                                       "Printer paper", "Cloud hosting", "Support plan"};
        double budget = cfg.distractor_density;
        if (budget <= 0) return;
        budget = std::max(0.0, budget + rng.normal(0.15 * budget));

        int table_rows = 0;
        bool table_header = false;
        int loose = 0;
        while (budget > 0) {
            const double r = rng.uniform();
            if (r < 0.35 && (!top_free.empty() || !bottom_free.empty())) {
                auto [label, kind] = rng.pick(confusers);
                const bool use_bottom = kind == 2 ? !bottom_free.empty() : top_free.empty();
                auto& pool = use_bottom ? bottom_free : top_free;
                if (pool.empty()) continue;
                const int idx = rng.integer(0, static_cast<int>(pool.size()) - 1);
                Slot slot = pool[idx];
                pool.erase(pool.begin() + idx);
                std::string value;
                switch (kind) {
                case 0: value = random_id(rng, false); break;
                case 1: value = random_date(rng); break;
                case 2: value = format_money(rng.integer(100, 300000), rng.integer(0, 1)); break;
                default: value = "555-" + pad(rng.integer(100, 999), 3) + "-" + pad(rng.integer(0, 9999), 4); break;
                }
                put_pair(styled(rng, label), value, slot, above_layout && rng.chance(0.5), 0);
                budget -= 2;
            } else if (r < 0.85 && table_rows < 6) {
                if (!table_header) {
                    const double y = 0.44;
                    put("Description", 0.06, y);
                    put("Qty", 0.50, y);
                    put("Unit Price", 0.62, y);
                    put("Line Total", 0.80, y);
                    table_header = true;
                    budget -= 4;
                }
                const double y = 0.44 + 0.025 * (table_rows + 1);
                const int qty = rng.integer(1, 20);
                const long unit = rng.integer(100, 90000);
                put(rng.pick(items), 0.06, y);
                put(std::to_string(qty), 0.50, y);
                put(format_money(unit, 1), 0.62, y);
                put(format_money(unit * qty, rng.integer(0, 1)), 0.80, y);
                ++table_rows;
                budget -= 4;
            } else if (loose < 3) {
                const double y = loose == 0 ? 0.05 : (loose == 1 ? 0.08 : 0.97);
                switch (rng.integer(0, 2)) {
                case 0: put("Tel " + pad(rng.integer(200, 999), 3) + "-" + pad(rng.integer(0, 9999), 4), 0.62, y); break;
                case 1: put(std::to_string(rng.integer(10000, 99999)), 0.62, y); break;
                default: put("Page 1 of " + std::to_string(rng.integer(1, 3)), 0.62, y); break;
                }
                ++loose;
                budget -= 1;
            } else {
                budget -= 1; // nowhere left to put it
            }
        }
    }

    std::pair<Document, GoldRecord> build(const std::string& doc_id) {
        const auto& fields = schema.fields();
        std::vector<int> top_fields, bottom_fields;
        for (const auto& f : fields)
            (value_kind(f) == ValueKind::money ? bottom_fields : top_fields).push_back(f.id);

        auto top_slots = grid(0.13);
        auto bottom_slots = grid(0.70);
        if (top_fields.size() > top_slots.size() || bottom_fields.size() > bottom_slots.size())
            throw ConfigError("schema has too many fields for the synthetic layout grid");

        const Layout layout = rng.pick(cfg.layouts);
        const int lo = std::min<int>(cfg.min_fields, static_cast<int>(fields.size()));
        const int count = rng.integer(lo, static_cast<int>(fields.size()));
        std::vector<int> chosen;
        for (const auto& f : fields) chosen.push_back(f.id);
        rng.shuffle(chosen);
        chosen.resize(count);
        std::sort(chosen.begin(), chosen.end());

        rng.shuffle(top_slots);
        rng.shuffle(bottom_slots);

        const long subtotal = rng.integer(5000, 2000000);
        const long tax = subtotal * rng.integer(5, 10) / 100;
        const long total = subtotal + tax;
        const long due = rng.chance(0.7) ? total : total - total * rng.integer(10, 50) / 100;
        const int money_style = rng.integer(0, 2);

        put(rng.pick(std::vector<std::string>{"Acme Supply Co", "Northwind Traders", "Globex Corporation",
                                              "Initech Services", "Blue Harbor Logistics", "Summit Office Goods"}),
            0.06, 0.05);

        GoldRecord gold;
        gold.values.doc_id = doc_id;
        std::vector<std::pair<int, size_t>> value_index; // field id -> placed index
        size_t top_used = 0, bottom_used = 0;
        for (int id : chosen) {
            const FieldSpec& f = schema.field(id);
            const bool bottom = value_kind(f) == ValueKind::money;
            Slot slot = bottom ? bottom_slots[bottom_used++] : top_slots[top_used++];
            const bool above = layout == Layout::key_above || (layout == Layout::mixed && rng.chance(0.5));
            const std::string value = value_for(f, total, tax, due, money_style);
            put_pair(key_for(f), value, slot, above, id);
            gold.values.fields[f.name] = value;
            value_index.emplace_back(id, placed.size() - 1);
        }

        std::vector<Slot> top_free(top_slots.begin() + top_used, top_slots.end());
        std::vector<Slot> bottom_free(bottom_slots.begin() + bottom_used, bottom_slots.end());
        add_distractors(top_free, bottom_free, layout != Layout::key_left);

        put("Thank you for your business", 0.30, 0.95);

        Document doc;
        doc.doc_id = doc_id;
        doc.page_width = static_cast<int>(kPageWidth);
        doc.page_height = static_cast<int>(kPageHeight);
        for (auto& p : placed) {
            double x = p.x0 + rng.normal(cfg.bbox_jitter);
            double y = p.y0 + rng.normal(cfg.bbox_jitter);
            const double width = text_width(p.words, m);
            x = std::clamp(x, 0.005, 0.995 - width);
            y = std::clamp(y, 0.005, 0.995 - m.height);
            for (const auto& w : p.words) {
                const double wx = w.size() * m.char_width;
                Word word;
                word.id = static_cast<int>(doc.words.size());
                word.text = w;
                word.box = {x, y, x + wx, y + m.height};
                p.word_ids.push_back(word.id);
                doc.words.push_back(std::move(word));
                x += wx + m.space;
            }
        }

        for (auto [id, idx] : value_index) gold.word_ids[schema.field(id).name] = placed[idx].word_ids;

        if (cfg.char_noise_rate > 0) {
            for (auto& w : doc.words)
                for (char& c : w.text)
                    if (rng.chance(cfg.char_noise_rate)) c = corrupt_char(rng, c);
        }
        return {std::move(doc), std::move(gold)};
    }
};

} // namespace

SynthCorpus generate(const SynthConfig& cfg, const FieldSchema& schema, int threads) {
    cfg.validate();
    SynthCorpus out;
    out.docs.resize(cfg.n_docs);
    out.gold.resize(cfg.n_docs);
    parallel_for(static_cast<std::size_t>(cfg.n_docs), threads, [&](std::size_t i) {
        DocBuilder builder(cfg, schema, mix(mix(cfg.seed) ^ (0x51ull + i)));
        std::string id = cfg.id_prefix + "-" + std::to_string(cfg.seed) + "-" + pad(static_cast<int>(i), 5);
        auto [doc, gold] = builder.build(id);
        out.docs[i] = std::move(doc);
        out.gold[i] = std::move(gold);
    });
    return out;
}

std::string serialize_gold(const GoldRecord& g) {
    nlohmann::json j = {{"doc_id", g.values.doc_id}, {"fields", g.values.fields}};
    if (!g.word_ids.empty()) j["word_ids"] = g.word_ids;
    return j.dump();
}

std::vector<GoldRecord> read_gold(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<GoldRecord> out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
        GoldRecord g;
        g.values = parse_annotation(lines[i], static_cast<long>(i) + 1);
        try {
            auto j = nlohmann::json::parse(lines[i]);
            if (j.contains("word_ids")) g.word_ids = j.at("word_ids").get<std::map<std::string, std::vector<int>>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad word_ids: ") + e.what(), static_cast<long>(i) + 1);
        }
        out.push_back(std::move(g));
    }
    return out;
}

void write_gold(const std::string& path, const std::vector<GoldRecord>& gold) {
    std::string text;
    for (const auto& g : gold) text += serialize_gold(g) + "\n";
    write_text(path, text);
}

std::vector<Annotation> gold_annotations(const std::vector<GoldRecord>& gold) {
    std::vector<Annotation> out;
    out.reserve(gold.size());
    for (const auto& g : gold) out.push_back(g.values);
    return out;
}

LabelSet truth_labels(const Corpus& docs, const std::vector<GoldRecord>& gold, const FieldSchema& schema) {
    std::unordered_map<std::string, const GoldRecord*> by_id;
    for (const auto& g : gold) by_id[g.values.doc_id] = &g;
    LabelSet truth = LabelSet::background(docs, "truth");
    for (size_t d = 0; d < docs.size(); ++d) {
        auto it = by_id.find(docs[d].doc_id);
        if (it == by_id.end()) throw ValidationError("no gold record for doc " + docs[d].doc_id);
        for (const auto& [name, ids] : it->second->word_ids) {
            auto fid = schema.find(name);
            if (!fid) throw ValidationError(docs[d].doc_id + ": gold names unknown field '" + name + "'");
            for (int w : ids) {
                if (w < 0 || w >= static_cast<int>(docs[d].words.size()))
                    throw ValidationError(docs[d].doc_id + ": gold word id " + std::to_string(w) + " out of range");
                truth.docs[d].labels[w] = *fid;
            }
        }
    }
    return truth;
}

LabelQuality corruption_report(const Corpus& docs, const std::vector<GoldRecord>& gold, const LabelSet& labels,
                               const FieldSchema& schema) {
    if (labels.docs.size() != docs.size()) throw ValidationError("label set and corpus differ in size");
    const LabelSet truth = truth_labels(docs, gold, schema);
    LabelQuality q;
    for (size_t d = 0; d < docs.size(); ++d) {
        const auto& pred = labels.docs[d];
        if (pred.doc_id != docs[d].doc_id || pred.labels.size() != docs[d].words.size())
            throw ValidationError("label set does not match corpus at doc " + docs[d].doc_id);
        const auto& t = truth.docs[d].labels;
        for (size_t w = 0; w < t.size(); ++w) {
            if (pred.labels[w] != 0) ++q.labeled;
            if (t[w] != 0) ++q.positives;
            if (t[w] != 0 && pred.labels[w] == t[w]) ++q.true_positive;
        }
    }
    q.precision = q.labeled ? static_cast<double>(q.true_positive) / q.labeled : 0.0;
    q.recall = q.positives ? static_cast<double>(q.true_positive) / q.positives : 0.0;
    return q;
}

} // namespace ffrg
