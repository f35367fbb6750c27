// ffrg: command-line front end for the field-extraction toolkit.
//
// Exit codes: 0 success, 1 validation/parse/config error or bad usage, 2 I/O error.
// Logs go to stderr; data only to files (pipeline also prints its report).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffrg/bootstrap.hpp"
#include "ffrg/errors.hpp"
#include "ffrg/evaluator.hpp"
#include "ffrg/features.hpp"
#include "ffrg/grouping.hpp"
#include "ffrg/model.hpp"
#include "ffrg/overlay.hpp"
#include "ffrg/parallel.hpp"
#include "ffrg/pipeline.hpp"
#include "ffrg/ple.hpp"
#include "ffrg/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ffrg;

namespace {

struct Settings {
    std::uint64_t seed = 7;
    int threads = 0;
    std::string config;

    // paths
    std::string in, docs, schema, labels, model, gold, pred, out, values, report, overlay, svg, out_docs, out_gold,
        out_dir;

    std::string preset = "clean";
    int n = 200;
    int n_test = 200;
    bool per_field = false;
    double threshold = 0.1;
    bool one_step = false;
    bool no_refined = false;

    RuleParams rules;
    GroupingConfig grouping;
    PLEConfig ple;
    SynthConfig synth; // only fields named in `synth_touched` override the preset
    std::string layout;
    std::set<std::string> synth_touched;
};

// Config keys ("section.key") and the CLI options that shadow them.
struct Binding {
    std::vector<CLI::Option*> options;
    std::function<void(const json&)> set;
};

class Registry {
public:
    template <class T>
    void key(const std::string& name, T& target, std::function<void()> touched = {}) {
        auto& b = map_[name];
        b.set = [&target, touched](const json& j) {
            target = j.get<T>();
            if (touched) touched();
        };
    }

    template <class T>
    CLI::Option* option(CLI::App* app, const std::string& flag, const std::string& name, T& target,
                        const std::string& help) {
        auto* opt = app->add_option(flag, target, help);
        map_.at(name).options.push_back(opt);
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& name, bool& target,
                      const std::string& help) {
        auto* opt = app->add_flag(flag, target, help);
        map_.at(name).options.push_back(opt);
        return opt;
    }

    bool given(const std::string& name) const {
        for (auto* o : map_.at(name).options)
            if (o->count() > 0) return true;
        return false;
    }

    void apply(const json& cfg) {
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        for (const auto& [k, v] : cfg.items()) {
            if (v.is_object()) {
                for (const auto& [k2, v2] : v.items()) assign(k + "." + k2, v2);
            } else {
                assign(k, v);
            }
        }
    }

private:
    void assign(const std::string& name, const json& value) {
        auto it = map_.find(name);
        if (it == map_.end()) throw ConfigError("unknown config key '" + name + "'");
        if (given(name)) return; // command-line flags win
        try {
            it->second.set(value);
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + name + "': " + e.what());
        }
    }

    std::map<std::string, Binding> map_;
};

void register_keys(Registry& r, Settings& s) {
    r.key("seed", s.seed);
    r.key("threads", s.threads);
    for (auto [name, target] : std::initializer_list<std::pair<const char*, std::string*>>{
             {"paths.in", &s.in},           {"paths.docs", &s.docs},         {"paths.schema", &s.schema},
             {"paths.labels", &s.labels},   {"paths.model", &s.model},       {"paths.gold", &s.gold},
             {"paths.pred", &s.pred},       {"paths.out", &s.out},           {"paths.values", &s.values},
             {"paths.report", &s.report},   {"paths.overlay", &s.overlay},   {"paths.svg", &s.svg},
             {"paths.out_docs", &s.out_docs}, {"paths.out_gold", &s.out_gold}, {"paths.out_dir", &s.out_dir}})
        r.key(name, *target);

    r.key("rules.sigma_d", s.rules.sigma_d);
    r.key("rules.sigma_a", s.rules.sigma_a);
    r.key("rules.mu_d", s.rules.mu_d);
    r.key("rules.alpha", s.rules.alpha);
    r.key("rules.theta_v", s.rules.theta_v);
    r.key("rules.zone_above", s.rules.zone_above);
    r.key("rules.zone_below", s.rules.zone_below);

    r.key("grouping.eps_scale", s.grouping.eps_scale);
    r.key("grouping.vertical_penalty", s.grouping.vertical_penalty);
    r.key("grouping.min_pts", s.grouping.min_pts);

    r.key("ple.branches", s.ple.branches);
    r.key("ple.beta", s.ple.beta);
    r.key("ple.refine_threshold", s.ple.refine_threshold);
    r.key("ple.epochs_step1", s.ple.epochs_step1);
    r.key("ple.epochs_step2", s.ple.epochs_step2);
    r.key("ple.batch_docs", s.ple.batch_docs);
    r.key("ple.lr", s.ple.lr);
    r.key("ple.hidden", s.ple.hidden);
    r.key("ple.branch_hidden", s.ple.branch_hidden);
    r.key("ple.one_step", s.one_step);
    r.key("ple.no_refined", s.no_refined);

    auto touch = [&s](const char* f) { return [&s, f] { s.synth_touched.insert(f); }; };
    r.key("synth.preset", s.preset);
    r.key("synth.n", s.n);
    r.key("synth.n_test", s.n_test);
    r.key("synth.layout", s.layout, touch("layout"));
    r.key("synth.key_paraphrase_rate", s.synth.key_paraphrase_rate, touch("key_paraphrase_rate"));
    r.key("synth.unknown_key_rate", s.synth.unknown_key_rate, touch("unknown_key_rate"));
    r.key("synth.char_noise_rate", s.synth.char_noise_rate, touch("char_noise_rate"));
    r.key("synth.distractor_density", s.synth.distractor_density, touch("distractor_density"));
    r.key("synth.bbox_jitter", s.synth.bbox_jitter, touch("bbox_jitter"));
    r.key("synth.min_fields", s.synth.min_fields, touch("min_fields"));

    r.key("eval.per_field", s.per_field);
    r.key("extract.threshold", s.threshold);
}

int resolve_threads(const Settings& s) {
    if (s.threads > 0) return s.threads;
    if (const char* env = std::getenv("FFRG_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t > 0) return t;
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("FFRG_THREADS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw ConfigError(std::string("missing required ") + flag);
}

FieldSchema schema_or_default(const std::string& path) {
    return path.empty() ? default_invoice_schema() : load_schema(path);
}

void log(const std::string& msg) { std::cerr << "[ffrg] " << msg << "\n"; }

Layout layout_from_string(const std::string& s) {
    if (s == "key_left" || s == "key-left") return Layout::key_left;
    if (s == "key_above" || s == "key-above") return Layout::key_above;
    if (s == "mixed") return Layout::mixed;
    throw ConfigError("unknown layout '" + s + "'");
}

SynthConfig synth_config(const Settings& s) {
    SynthConfig cfg = synth_preset(s.preset);
    cfg.n_docs = s.n;
    cfg.seed = s.seed;
    const auto& t = s.synth_touched;
    if (t.count("layout")) cfg.layouts = {layout_from_string(s.layout)};
    if (t.count("key_paraphrase_rate")) cfg.key_paraphrase_rate = s.synth.key_paraphrase_rate;
    if (t.count("unknown_key_rate")) cfg.unknown_key_rate = s.synth.unknown_key_rate;
    if (t.count("char_noise_rate")) cfg.char_noise_rate = s.synth.char_noise_rate;
    if (t.count("distractor_density")) cfg.distractor_density = s.synth.distractor_density;
    if (t.count("bbox_jitter")) cfg.bbox_jitter = s.synth.bbox_jitter;
    if (t.count("min_fields")) cfg.min_fields = s.synth.min_fields;
    cfg.validate();
    return cfg;
}

PLEConfig ple_config(const Settings& s) {
    PLEConfig cfg = s.ple;
    cfg.seed = s.seed;
    cfg.two_step = !s.one_step;
    cfg.refined_labels = !s.no_refined;
    cfg.validate();
    return cfg;
}

void write_svgs(const std::string& dir, const Corpus& docs,
                const std::function<std::string(std::size_t)>& render) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
    for (std::size_t i = 0; i < docs.size(); ++i) write_text((fs::path(dir) / (docs[i].doc_id + ".svg")).string(), render(i));
}

std::vector<std::string> class_colors(const DocPrediction& p) {
    std::vector<std::string> colors;
    for (int c : p.word_class) colors.push_back(c == 0 ? std::string() : class_color(c));
    return colors;
}

// --- subcommands ------------------------------------------------------------

int run_synth(const Settings& s, int threads) {
    require(s.out_docs, "--out-docs");
    require(s.out_gold, "--out-gold");
    const auto schema = schema_or_default(s.schema);
    const auto cfg = synth_config(s);
    const auto corpus = generate(cfg, schema, threads);
    write_documents(s.out_docs, corpus.docs);
    write_gold(s.out_gold, corpus.gold);
    log("wrote " + std::to_string(corpus.docs.size()) + " documents (" + s.preset + ", seed " +
        std::to_string(cfg.seed) + ")");
    return 0;
}

int run_group(const Settings& s, int threads) {
    require(s.in, "--in");
    require(s.out, "--out");
    s.grouping.validate();
    Corpus docs = read_documents(s.in);
    parallel_for(docs.size(), threads, [&](std::size_t i) { docs[i] = with_phrases(std::move(docs[i]), s.grouping); });
    write_documents(s.out, docs);
    log("grouped " + std::to_string(docs.size()) + " documents");
    return 0;
}

int run_bootstrap(const Settings& s, int threads) {
    require(s.docs, "--docs");
    require(s.out, "--out");
    const auto schema = schema_or_default(s.schema);
    const auto docs = read_documents(s.docs);
    const auto result = bootstrap_labels(docs, schema, s.rules, s.grouping, threads);
    write_labels(s.out, result.labels);
    if (!s.values.empty()) write_annotations(s.values, result.values);
    long positives = 0;
    for (const auto& d : result.labels.docs)
        for (int c : d.labels) positives += c != 0;
    log("labeled " + std::to_string(positives) + " words in " + std::to_string(docs.size()) + " documents");
    return 0;
}

int run_train(const Settings& s, int threads) {
    require(s.docs, "--docs");
    require(s.labels, "--labels");
    require(s.out, "--out");
    const auto schema = schema_or_default(s.schema);
    const auto docs = read_documents(s.docs);
    const auto labels = read_labels(s.labels, docs);
    const auto cfg = ple_config(s);
    const auto result = train(docs, labels, schema, cfg, threads,
                              [](int stage, const ModelParams&) { log("finished stage " + std::to_string(stage)); });
    save_checkpoint(s.out, result.params, schema);
    log("saved " + s.out);
    return 0;
}

int run_extract(const Settings& s, int threads) {
    require(s.model, "--model");
    require(s.docs, "--docs");
    require(s.out, "--out");
    const auto ckpt = load_checkpoint(s.model);
    const auto docs = read_documents(s.docs);
    std::vector<DocPrediction> preds(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        preds[i] = extract_values(ckpt.params, docs[i], ckpt.schema, s.threshold, s.grouping);
    });
    std::vector<Annotation> values;
    for (const auto& p : preds) values.push_back(p.values);
    write_annotations(s.out, values);
    if (!s.overlay.empty()) {
        std::string text;
        for (std::size_t i = 0; i < docs.size(); ++i) text += extract_overlay(docs[i], preds[i], ckpt.schema) + "\n";
        write_text(s.overlay, text);
    }
    if (!s.svg.empty())
        write_svgs(s.svg, docs, [&](std::size_t i) { return render_svg(docs[i], class_colors(preds[i])); });
    log("extracted " + std::to_string(docs.size()) + " documents");
    return 0;
}

int run_eval(const Settings& s, int) {
    require(s.pred, "--pred");
    require(s.gold, "--gold");
    const auto schema = schema_or_default(s.schema);
    const auto report = score(read_annotations(s.pred), read_annotations(s.gold), schema);
    const auto text = report_to_json(report, s.per_field) + "\n";
    if (s.report.empty())
        std::cout << text;
    else
        write_text(s.report, text);
    log("macro F1 " + std::to_string(report.macro_f1));
    return 0;
}

int run_inspect(const Settings& s, int threads) {
    require(s.model, "--model");
    require(s.docs, "--docs");
    require(s.gold, "--gold");
    require(s.out, "--out");
    const auto ckpt = load_checkpoint(s.model);
    const auto docs = read_documents(s.docs);
    const auto gold = read_gold(s.gold);
    std::map<std::string, const GoldRecord*> by_id;
    for (const auto& g : gold) by_id[g.values.doc_id] = &g;
    const GoldRecord empty;

    std::vector<DocPrediction> preds(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        preds[i] = extract_values(ckpt.params, docs[i], ckpt.schema, s.threshold, s.grouping);
    });
    auto gold_of = [&](std::size_t i) -> const GoldRecord& {
        auto it = by_id.find(docs[i].doc_id);
        return it == by_id.end() ? empty : *it->second;
    };

    std::string text;
    for (std::size_t i = 0; i < docs.size(); ++i) text += inspect_overlay(docs[i], preds[i], gold_of(i), ckpt.schema) + "\n";
    write_text(s.out, text);

    if (!s.svg.empty()) {
        write_svgs(s.svg, docs, [&](std::size_t i) {
            const auto& g = gold_of(i);
            std::vector<std::string> colors(docs[i].words.size());
            std::vector<std::string> captions;
            for (const auto& f : ckpt.schema.fields()) {
                std::optional<std::string> p, gv;
                if (auto it = preds[i].values.fields.find(f.name); it != preds[i].values.fields.end()) p = it->second;
                if (auto it = g.values.fields.find(f.name); it != g.values.fields.end()) gv = it->second;
                if (!p && !gv) continue;
                std::vector<int> gw;
                if (auto it = g.word_ids.find(f.name); it != g.word_ids.end()) gw = it->second;
                const Outcome o = classify_outcome(p, gv, preds[i].spans[f.id - 1], gw);
                const auto& marked = o == Outcome::missed ? gw : preds[i].spans[f.id - 1];
                for (int w : marked)
                    if (w >= 0 && w < static_cast<int>(colors.size())) colors[w] = outcome_color(o);
                captions.push_back(f.name + ": " + std::string(to_string(o)));
            }
            return render_svg(docs[i], colors, captions);
        });
    }
    log("inspected " + std::to_string(docs.size()) + " documents");
    return 0;
}

int run_pipeline(const Settings& s, int threads) {
    const auto schema = schema_or_default(s.schema);
    PipelineConfig cfg;
    cfg.synth = synth_config(s);
    cfg.n_test = s.n_test;
    cfg.rules = s.rules;
    cfg.grouping = s.grouping;
    cfg.ple = ple_config(s);

    log("pipeline: preset " + s.preset + ", " + std::to_string(cfg.synth.n_docs) + " train / " +
        std::to_string(cfg.n_test) + " test documents, seed " + std::to_string(s.seed));
    const auto result = ffrg::run_pipeline(cfg, schema, threads);
    const std::string report = report_to_json(result.report, true) + "\n";

    if (!s.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(s.out_dir, ec);
        if (ec) throw IoError("cannot create directory " + s.out_dir + ": " + ec.message());
        const fs::path dir(s.out_dir);
        write_documents((dir / "train_docs.jsonl").string(), result.train_set.docs);
        write_gold((dir / "train_gold.jsonl").string(), result.train_set.gold);
        write_documents((dir / "test_docs.jsonl").string(), result.test_set.docs);
        write_gold((dir / "test_gold.jsonl").string(), result.test_set.gold);
        write_labels((dir / "labels.jsonl").string(), result.bootstrap);
        save_checkpoint((dir / "model.ffrg").string(), result.params, schema);
        std::vector<Annotation> values;
        for (const auto& p : result.predictions) values.push_back(p.values);
        write_annotations((dir / "values.jsonl").string(), values);
        write_text((dir / "report.json").string(), report);
    }
    if (!s.report.empty()) write_text(s.report, report);

    char buf[160];
    std::snprintf(buf, sizeof buf, "bootstrap labels P %.3f R %.3f | bootstrap F1 %.4f | model F1 %.4f",
                  result.label_quality.precision, result.label_quality.recall, result.bootstrap_report.macro_f1,
                  result.report.macro_f1);
    log(buf);
    std::cout << report;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Settings s;
    Registry reg;
    register_keys(reg, s);

    CLI::App app{"Form field extraction: rule bootstrap + progressive pseudo-label ensemble", "ffrg"};
    app.require_subcommand(1);
    app.fallthrough();
    reg.option(&app, "--seed", "seed", s.seed, "Random seed");
    reg.option(&app, "--threads", "threads", s.threads, "Worker threads (default: $FFRG_THREADS or 1)");
    app.add_option("--config", s.config, "JSON config file; flags override its values");

    auto add_rules = [&](CLI::App* c) {
        reg.option(c, "--theta-v", "rules.theta_v", s.rules.theta_v, "Value score threshold");
        reg.option(c, "--alpha", "rules.alpha", s.rules.alpha, "Angle term weight");
        reg.option(c, "--sigma-d", "rules.sigma_d", s.rules.sigma_d, "Distance kernel width");
        reg.option(c, "--sigma-a", "rules.sigma_a", s.rules.sigma_a, "Angle kernel width (radians)");
    };
    auto add_grouping = [&](CLI::App* c) {
        reg.option(c, "--eps-scale", "grouping.eps_scale", s.grouping.eps_scale, "DBSCAN eps / median word height");
    };
    auto add_ple = [&](CLI::App* c) {
        reg.option(c, "--branches", "ple.branches", s.ple.branches, "Branch count K");
        reg.option(c, "--beta", "ple.beta", s.ple.beta, "Weight of bootstrap labels in later branches");
        reg.option(c, "--epochs-step1", "ple.epochs_step1", s.ple.epochs_step1, "Epochs for trunk + branch 1");
        reg.option(c, "--epochs-step2", "ple.epochs_step2", s.ple.epochs_step2, "Epochs per refinement stage");
        reg.option(c, "--lr", "ple.lr", s.ple.lr, "Adam learning rate");
        reg.flag(c, "--one-step", "ple.one_step", s.one_step, "Train all branches jointly (ablation)");
        reg.flag(c, "--no-refined", "ple.no_refined", s.no_refined, "Train later branches on bootstrap labels only");
    };
    auto add_synth = [&](CLI::App* c) {
        reg.option(c, "--preset", "synth.preset", s.preset, "clean | noisy-bench")
            ->check(CLI::IsMember({"clean", "noisy-bench"}));
        reg.option(c, "--n", "synth.n", s.n, "Number of documents");
        reg.option(c, "--schema", "paths.schema", s.schema, "Schema JSON (default: built-in invoice schema)");
    };

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with gold values");
    add_synth(synth);
    reg.option(synth, "--out-docs", "paths.out_docs", s.out_docs, "Output documents JSONL");
    reg.option(synth, "--out-gold", "paths.out_gold", s.out_gold, "Output gold JSONL");

    auto* group = app.add_subcommand("group", "Cluster words into phrases");
    reg.option(group, "--in", "paths.in", s.in, "Input documents JSONL");
    reg.option(group, "--out", "paths.out", s.out, "Documents JSONL with phrases");
    add_grouping(group);

    auto* boot = app.add_subcommand("bootstrap", "Mine word labels with the rule engine");
    reg.option(boot, "--docs", "paths.docs", s.docs, "Documents JSONL");
    reg.option(boot, "--schema", "paths.schema", s.schema, "Schema JSON");
    reg.option(boot, "--out", "paths.out", s.out, "Output labels JSONL");
    reg.option(boot, "--values", "paths.values", s.values, "Also write extracted values JSONL");
    add_rules(boot);
    add_grouping(boot);

    auto* tr = app.add_subcommand("train", "Train the token classifier with progressive refinement");
    reg.option(tr, "--docs", "paths.docs", s.docs, "Documents JSONL");
    reg.option(tr, "--labels", "paths.labels", s.labels, "Bootstrap labels JSONL");
    reg.option(tr, "--schema", "paths.schema", s.schema, "Schema JSON");
    reg.option(tr, "--out", "paths.out", s.out, "Output checkpoint");
    add_ple(tr);

    auto* ex = app.add_subcommand("extract", "Extract field values with a trained model");
    reg.option(ex, "--model", "paths.model", s.model, "Checkpoint");
    reg.option(ex, "--docs", "paths.docs", s.docs, "Documents JSONL");
    reg.option(ex, "--out", "paths.out", s.out, "Output values JSONL");
    reg.option(ex, "--overlay", "paths.overlay", s.overlay, "Per-word overlay JSONL");
    reg.option(ex, "--svg", "paths.svg", s.svg, "Directory for one SVG per document");
    reg.option(ex, "--threshold", "extract.threshold", s.threshold, "Anchor probability threshold");
    add_grouping(ex);

    auto* ev = app.add_subcommand("eval", "Score predicted values against gold");
    reg.option(ev, "--pred", "paths.pred", s.pred, "Predicted values JSONL");
    reg.option(ev, "--gold", "paths.gold", s.gold, "Gold values JSONL");
    reg.option(ev, "--schema", "paths.schema", s.schema, "Schema JSON");
    reg.option(ev, "--report", "paths.report", s.report, "Report JSON (default: stdout)");
    reg.flag(ev, "--per-field", "eval.per_field", s.per_field, "Include per-field metrics");

    auto* ins = app.add_subcommand("inspect", "Per-field outcome overlays of predictions vs gold");
    reg.option(ins, "--model", "paths.model", s.model, "Checkpoint");
    reg.option(ins, "--docs", "paths.docs", s.docs, "Documents JSONL");
    reg.option(ins, "--gold", "paths.gold", s.gold, "Gold JSONL");
    reg.option(ins, "--out", "paths.out", s.out, "Output overlay JSONL");
    reg.option(ins, "--svg", "paths.svg", s.svg, "Directory for one SVG per document");
    reg.option(ins, "--threshold", "extract.threshold", s.threshold, "Anchor probability threshold");
    add_grouping(ins);

    auto* pipe = app.add_subcommand("pipeline", "synth -> bootstrap -> train -> extract -> eval");
    add_synth(pipe);
    reg.option(pipe, "--n-test", "synth.n_test", s.n_test, "Held-out test documents");
    reg.option(pipe, "--out-dir", "paths.out_dir", s.out_dir, "Directory for every intermediate artifact");
    reg.option(pipe, "--report", "paths.report", s.report, "Report JSON");
    add_rules(pipe);
    add_grouping(pipe);
    add_ple(pipe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    try {
        if (!s.config.empty()) {
            const auto lines = read_lines(s.config);
            std::string text;
            for (const auto& l : lines) text += l + "\n";
            json cfg;
            try {
                cfg = json::parse(text);
            } catch (const json::parse_error& e) {
                throw ParseError(s.config + ": " + e.what());
            }
            reg.apply(cfg);
        }
        const int threads = resolve_threads(s);

        if (*synth) return run_synth(s, threads);
        if (*group) return run_group(s, threads);
        if (*boot) return run_bootstrap(s, threads);
        if (*tr) return run_train(s, threads);
        if (*ex) return run_extract(s, threads);
        if (*ev) return run_eval(s, threads);
        if (*ins) return run_inspect(s, threads);
        if (*pipe) return run_pipeline(s, threads);
    } catch (const IoError& e) {
        std::cerr << "ffrg: I/O error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "ffrg: parse error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "ffrg: invalid input: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "ffrg: configuration error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
