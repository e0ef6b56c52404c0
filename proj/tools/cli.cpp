#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "homoseg/corpus.hpp"
#include "homoseg/errors.hpp"
#include "homoseg/gradcheck.hpp"
#include "homoseg/model.hpp"
#include "homoseg/pnm.hpp"
#include "homoseg/report.hpp"
#include "homoseg/rng.hpp"
#include "homoseg/synthdata.hpp"
#include "homoseg/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace homoseg::cli {

namespace {

// ---------------------------------------------------------------------------
// Resolved per-subcommand configuration; echoed to config.json.

struct GenDataConfig {
    std::string out = "corpus";
    int scenes = 2;
    std::string size = "1120x1120";
    std::uint64_t seed = 1;
    double grass_fraction = 0.5;
    int fence_lines = 2;
    double elevation_m = 10.0;
    int brush = 64;
    int patch_size = 224;
    double split_ratio = 0.9;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GenDataConfig, out, scenes, size, seed, grass_fraction,
                                                fence_lines, elevation_m, brush, patch_size, split_ratio)

struct TrainCliConfig {
    std::string data;
    std::string out = "run";
    std::string mode = "multi";
    int epochs = 100;
    int batch_size = 8;
    std::uint64_t seed = 0;
    double lr_start = 1e-5;
    double lr_end = 1e-5;
    double beta = 0.5;
    double lambda_smooth = 1.0;
    double epsilon = 1e-6;
    double clamp = 1e-7;
    bool normalize_smooth = false;
    double t_max = 1.0;
    std::string t_granularity = "step";
    bool augment = false;
    int hidden = 8;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainCliConfig, data, out, mode, epochs, batch_size, seed,
                                                lr_start, lr_end, beta, lambda_smooth, epsilon, clamp,
                                                normalize_smooth, t_max, t_granularity, augment, hidden)

struct EvalCliConfig {
    std::string data;
    std::string checkpoint;
    std::string out = "eval";
    std::string name = "model";
    std::optional<double> threshold;
};

void to_json(json& j, const EvalCliConfig& c) {
    j = json{{"data", c.data}, {"checkpoint", c.checkpoint}, {"out", c.out}, {"name", c.name}};
    j["threshold"] = c.threshold ? json(*c.threshold) : json(nullptr);
}

void from_json(const json& j, EvalCliConfig& c) {
    c.data = j.value("data", c.data);
    c.checkpoint = j.value("checkpoint", c.checkpoint);
    c.out = j.value("out", c.out);
    c.name = j.value("name", c.name);
    if (j.contains("threshold") && !j.at("threshold").is_null()) c.threshold = j.at("threshold").get<double>();
}

struct GradcheckCliConfig {
    std::uint64_t seed = 0;
    int instances = 100;
    std::string sizes = "8x8";
    double tolerance = 1e-3;
    bool perturb_weights = false;
    std::string out;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GradcheckCliConfig, seed, instances, sizes, tolerance,
                                                perturb_weights, out)

struct CompareCliConfig {
    std::string a;
    std::string b;
    std::string name_a = "A";
    std::string name_b = "B";
    std::string out;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CompareCliConfig, a, b, name_a, name_b, out)

struct ReportCliConfig {
    std::vector<std::string> metrics;
    std::vector<std::string> rows;
    std::string out;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ReportCliConfig, metrics, rows, out)

// ---------------------------------------------------------------------------
// helpers

std::pair<int, int> parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw UsageError("size must look like WIDTHxHEIGHT, got '" + text + "'");
    try {
        std::size_t used = 0;
        const int w = std::stoi(text.substr(0, x), &used);
        if (used != x) throw std::invalid_argument(text);
        const std::string rest = text.substr(x + 1);
        const int h = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(text);
        return {w, h};
    } catch (const std::logic_error&) {
        throw UsageError("size must look like WIDTHxHEIGHT, got '" + text + "'");
    }
}

std::vector<std::pair<int, int>> parse_sizes(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_size(item));
    }
    if (out.empty()) throw UsageError("no sizes given");
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory: " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path.string());
    out << text;
    if (!out) throw IoError("failed writing: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

template <class Config>
void write_config(const fs::path& dir, const std::string& command, const Config& cfg) {
    json j = cfg;
    j["command"] = command;
    write_json(dir / "config.json", j);
}

template <class Config>
void load_config(const std::string& path, const std::string& command, Config& cfg) {
    const json j = read_json(path);
    if (j.contains("command") && j.at("command") != command) {
        throw UsageError("config file " + path + " belongs to '" + j.at("command").get<std::string>() +
                         "', not '" + command + "'");
    }
    try {
        from_json(j, cfg);
    } catch (const json::exception& e) {
        throw UsageError("invalid config file " + path + ": " + e.what());
    }
}

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// gen-data

void cmd_gen_data(const GenDataConfig& cfg, std::ostream& out) {
    const auto [width, height] = parse_size(cfg.size);
    if (cfg.scenes < 1) throw ConfigError("--scenes must be >= 1");
    const fs::path root(cfg.out);
    ensure_dir(root / "scenes");
    ensure_dir(root / "patches");
    const BrushSpec brush{cfg.brush};

    std::vector<ManifestRow> rows;
    for (int s = 0; s < cfg.scenes; ++s) {
        SceneSpec spec;
        spec.width = width;
        spec.height = height;
        spec.grass_fraction = cfg.grass_fraction;
        spec.texture_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
        spec.fence_lines = cfg.fence_lines;
        spec.elevation_m = cfg.elevation_m;
        const Scene scene = generate_scene(spec);
        const LabelMask annotated = brush_annotate(scene.mask, brush);

        char stem[32];
        std::snprintf(stem, sizeof stem, "scene_%03d", s);
        write_ppm(root / "scenes" / (std::string(stem) + ".ppm"), scene.image);
        write_pgm(root / "scenes" / (std::string(stem) + "_true.pgm"), scene.mask);
        write_pgm(root / "scenes" / (std::string(stem) + "_brush.pgm"), annotated);

        const TileGrid grid = tile_grid(width, height, cfg.patch_size);
        const auto patches = tile_patches(scene.image, annotated, cfg.patch_size);
        for (int k = 0; k < grid.count(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "%s_r%02d_c%02d", stem, k / grid.cols, k % grid.cols);
            const std::string img = "patches/" + std::string(name) + ".ppm";
            const std::string msk = "patches/" + std::string(name) + "_mask.pgm";
            write_ppm(root / img, patches[static_cast<std::size_t>(k)].image);
            write_pgm(root / msk, patches[static_cast<std::size_t>(k)].mask);
            rows.push_back({img, msk, "", spec.texture_seed, cfg.elevation_m});
        }
    }

    const SplitIndices parts = split(rows.size(), cfg.split_ratio, cfg.seed);
    for (auto i : parts.train) rows[i].split = "train";
    for (auto i : parts.eval) rows[i].split = "eval";
    write_manifest(root / "manifest.csv", rows);
    write_config(root, "gen-data", cfg);
    out << "wrote " << cfg.scenes << " scenes, " << rows.size() << " patches (" << parts.train.size()
        << " train / " << parts.eval.size() << " eval) to " << root.string() << "\n";
}

// ---------------------------------------------------------------------------
// train

TrainConfig to_train_config(const TrainCliConfig& c) {
    TrainConfig t;
    t.epochs = c.epochs;
    t.batch_size = c.batch_size;
    t.seed = c.seed;
    t.alpha_start = c.lr_start;
    t.alpha_end = c.lr_end;
    t.loss.beta = c.beta;
    t.loss.lambda_smooth = c.lambda_smooth;
    t.loss.epsilon = c.epsilon;
    t.loss.clamp = c.clamp;
    t.loss.normalize_smooth = c.normalize_smooth;
    t.t_max = c.t_max;
    t.augment = c.augment;
    if (c.mode == "multi") t.mode = TrainMode::multi_objective;
    else if (c.mode == "single") t.mode = TrainMode::single_objective;
    else throw ConfigError("--mode must be 'single' or 'multi', got '" + c.mode + "'");
    if (c.t_granularity == "step") t.t_granularity = TGranularity::step;
    else if (c.t_granularity == "epoch") t.t_granularity = TGranularity::epoch;
    else throw ConfigError("--t-granularity must be 'step' or 'epoch'");
    return t;
}

void cmd_train(const TrainCliConfig& cfg, std::ostream& out) {
    const TrainConfig tc = to_train_config(cfg);
    tc.validate();
    if (cfg.data.empty()) throw UsageError("--data is required");
    if (!fs::exists(fs::path(cfg.data) / "manifest.csv")) {
        throw IoError("missing manifest: " + (fs::path(cfg.data) / "manifest.csv").string());
    }
    const CorpusSplit train_split = load_split(cfg.data, "train");
    if (train_split.samples.empty()) throw UsageError("corpus has no training patches");

    const fs::path root(cfg.out);
    ensure_dir(root / "checkpoints");
    write_config(root, "train", cfg);

    SegModel model = init_model(cfg.seed, 3, cfg.hidden);
    auto on_epoch = [&](int epoch, const SegModel& m, const AdamState& a) {
        char name[32];
        std::snprintf(name, sizeof name, "epoch_%03d.ckpt", epoch);
        save_checkpoint(root / "checkpoints" / name, m, a);
    };
    const TrainResult result = train(tc, train_split.samples, std::move(model), on_epoch);
    save_checkpoint(root / "model.ckpt", result.model, result.adam);
    write_history_csv(root / "history.csv", result.history);

    json summary;
    summary["steps"] = result.history.records.size();
    summary["train_patches"] = train_split.samples.size();
    summary["final_t"] = result.final_t;
    summary["final_alpha"] = result.final_alpha;
    if (!result.history.records.empty()) {
        const auto& last = result.history.records.back();
        summary["last_dicece"] = last.dice_ce;
        summary["last_smooth"] = last.smooth;
        summary["last_combined"] = last.combined;
    }
    write_json(root / "train_summary.json", summary);

    out << "trained " << result.history.records.size() << " steps over " << cfg.epochs
        << " epochs; final t = " << result.final_t << "\n";
}

// ---------------------------------------------------------------------------
// eval

void cmd_eval(const EvalCliConfig& cfg, std::ostream& out) {
    if (cfg.checkpoint.empty()) throw UsageError("--checkpoint is required");
    if (cfg.data.empty()) throw UsageError("--data is required");
    if (cfg.threshold && !(*cfg.threshold >= 0.0 && *cfg.threshold <= 1.0)) {
        throw ConfigError("--threshold must lie in [0,1]");
    }
    if (!fs::exists(cfg.checkpoint)) throw IoError("missing checkpoint: " + cfg.checkpoint);
    const Checkpoint ck = load_checkpoint(cfg.checkpoint);
    const CorpusSplit train_split = load_split(cfg.data, "train");
    const CorpusSplit eval_split = load_split(cfg.data, "eval");
    if (train_split.samples.empty() || eval_split.samples.empty()) {
        throw UsageError("corpus needs both train and eval patches");
    }

    const ProtocolResult res =
        run_evaluation_protocol(ck.model, train_split.samples, eval_split.samples, cfg.threshold);

    const fs::path root(cfg.out);
    ensure_dir(root);
    write_config(root, "eval", cfg);

    json j = to_json(res.report);
    j["name"] = cfg.name;
    j["threshold_overridden"] = res.threshold_overridden;
    j["calibration_eer"] = std::isnan(res.calibration_eer) ? json(nullptr) : json(res.calibration_eer);
    j["scaler"] = res.scaler ? json{{"min", res.scaler->min_score}, {"max", res.scaler->max_score}}
                             : json(nullptr);
    j["mean_smoothness"] = res.mean_smoothness;
    j["eval_patches"] = eval_split.samples.size();
    j["eval_fingerprint"] = fingerprint(eval_split);
    j["checkpoint"] = cfg.checkpoint;
    write_json(root / "metrics.json", j);
    if (res.report.roc_defined) write_roc_csv(root / "roc.csv", res.eval_roc);

    const std::string table = format_table({ReportRow::from(cfg.name, res.report)});
    write_text(root / "report.txt", table);
    out << table;
}

// ---------------------------------------------------------------------------
// gradcheck

int cmd_gradcheck(const GradcheckCliConfig& cfg, std::ostream& out) {
    GradcheckOptions opt;
    opt.seed = cfg.seed;
    opt.instances = cfg.instances;
    opt.sizes = parse_sizes(cfg.sizes);
    opt.tolerance = cfg.tolerance;
    opt.perturb_weights = cfg.perturb_weights;
    const GradcheckReport report = run_gradcheck(opt);

    json blocks = json::array();
    for (const auto& b : report.blocks) {
        char line[160];
        std::snprintf(line, sizeof line, "%-24s max_rel_err=%.3e checked=%zu skipped=%zu %s\n",
                      b.name.c_str(), b.max_rel_error, b.checked, b.skipped, b.passed ? "PASS" : "FAIL");
        out << line;
        blocks.push_back({{"name", b.name},
                          {"max_rel_error", b.max_rel_error},
                          {"checked", b.checked},
                          {"skipped", b.skipped},
                          {"passed", b.passed}});
    }
    out << (report.passed() ? "gradcheck passed\n" : "gradcheck FAILED\n");
    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        write_config(cfg.out, "gradcheck", cfg);
        write_json(fs::path(cfg.out) / "gradcheck.json", json{{"passed", report.passed()}, {"blocks", blocks}});
    }
    return report.passed() ? kSuccess : kNumericalAbort;
}

// ---------------------------------------------------------------------------
// compare / report

json load_metrics_json(const std::string& where) {
    fs::path p(where);
    if (fs::is_directory(p)) p /= "metrics.json";
    return read_json(p);
}

void cmd_compare(const CompareCliConfig& cfg, std::ostream& out) {
    if (cfg.a.empty() || cfg.b.empty()) throw UsageError("--a and --b are required");
    const json a = load_metrics_json(cfg.a);
    const json b = load_metrics_json(cfg.b);
    const auto fa = a.value("eval_fingerprint", std::string{});
    const auto fb = b.value("eval_fingerprint", std::string{});
    if (fa != fb) {
        throw UsageError("metrics were computed on different evaluation sets (" + fa + " vs " + fb + ")");
    }
    const std::vector<ReportRow> rows = {ReportRow::from(cfg.name_a, metrics_from_json(a)),
                                         ReportRow::from(cfg.name_b, metrics_from_json(b))};
    std::ostringstream text;
    text << format_table(rows) << "\nMean prediction smoothness (per adjacent pair)\n";
    auto smooth_of = [](const json& j) {
        return j.contains("mean_smoothness") && !j.at("mean_smoothness").is_null()
                   ? j.at("mean_smoothness").get<double>()
                   : std::nan("");
    };
    const double sa = smooth_of(a), sb = smooth_of(b);
    for (const auto& [name, value] : {std::pair{cfg.name_a, sa}, std::pair{cfg.name_b, sb}}) {
        char line[128];
        std::snprintf(line, sizeof line, "  %s: %.6f\n", name.c_str(), value);
        text << line;
    }
    out << text.str();
    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        write_config(cfg.out, "compare", cfg);
        write_text(fs::path(cfg.out) / "compare.txt", text.str());
        json j;
        j["rows"] = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            json r;
            r["name"] = rows[i].name;
            const auto values = rows[i].values();
            for (std::size_t c = 0; c < values.size(); ++c) {
                r[std::string(kMetricColumns[c])] = std::isnan(values[c]) ? json(nullptr) : json(values[c]);
            }
            r["mean_smoothness"] = i == 0 ? sa : sb;
            j["rows"].push_back(r);
        }
        write_json(fs::path(cfg.out) / "compare.json", j);
    }
}

ReportRow parse_row(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--row expects NAME=v1,v2,v3,v4,v5,v6");
    ReportRow row;
    row.name = spec.substr(0, eq);
    std::vector<double> v;
    std::istringstream in(spec.substr(eq + 1));
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw UsageError("--row value '" + item + "' is not a number");
        }
    }
    if (v.size() != 6) throw UsageError("--row needs exactly six values, got " + std::to_string(v.size()));
    row.accuracy = v[0];
    row.jaccard = v[1];
    row.dice = v[2];
    row.roc_auc = v[3];
    row.eer = v[4];
    row.eer_threshold = v[5];
    return row;
}

void cmd_report(const ReportCliConfig& cfg, std::ostream& out) {
    std::vector<ReportRow> rows;
    for (const auto& m : cfg.metrics) {
        const auto eq = m.find('=');
        const std::string name = eq == std::string::npos ? m : m.substr(0, eq);
        const std::string path = eq == std::string::npos ? m : m.substr(eq + 1);
        rows.push_back(ReportRow::from(name, metrics_from_json(load_metrics_json(path))));
    }
    for (const auto& r : cfg.rows) rows.push_back(parse_row(r));
    if (rows.empty()) throw UsageError("report needs at least one --metrics or --row");
    std::string table = format_table(rows) + "\n";
    for (const auto& row : rows) table += row.name + ": " + format_row_values(row) + "\n";
    out << table;
    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        write_config(cfg.out, "report", cfg);
        write_text(fs::path(cfg.out) / "report.txt", table);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    GenDataConfig gen;
    TrainCliConfig tr;
    EvalCliConfig ev;
    GradcheckCliConfig gc;
    CompareCliConfig cmp;
    ReportCliConfig rep;

    CLI::App app{"Homotopy multi-objective segmentation training and evaluation"};
    app.require_subcommand(1);
    std::string config_path;

    try {
        if (const auto cfg_file = find_config_arg(args); cfg_file && !args.empty()) {
            const std::string& command = args.front();
            if (command == "gen-data") load_config(*cfg_file, command, gen);
            else if (command == "train") load_config(*cfg_file, command, tr);
            else if (command == "eval") load_config(*cfg_file, command, ev);
            else if (command == "gradcheck") load_config(*cfg_file, command, gc);
            else if (command == "compare") load_config(*cfg_file, command, cmp);
            else if (command == "report") load_config(*cfg_file, command, rep);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Load settings from a config.json echo of an earlier run");
    };

    auto* g = app.add_subcommand("gen-data", "Generate a synthetic scene corpus with brush-annotated masks");
    add_config(g);
    g->add_option("--out", gen.out, "Output directory")->capture_default_str();
    g->add_option("--scenes", gen.scenes, "Number of scenes")->capture_default_str();
    g->add_option("--size", gen.size, "Scene size WIDTHxHEIGHT")->capture_default_str();
    g->add_option("--seed", gen.seed, "Corpus seed")->capture_default_str();
    g->add_option("--grass-fraction", gen.grass_fraction, "Target grass fraction in (0,1]")->capture_default_str();
    g->add_option("--fence-lines", gen.fence_lines, "Fence lines per scene")->capture_default_str();
    g->add_option("--elevation", gen.elevation_m, "Flight elevation in metres")->capture_default_str();
    g->add_option("--brush", gen.brush, "Annotation brush diameter in pixels")->capture_default_str();
    g->add_option("--patch-size", gen.patch_size, "Patch side length")->capture_default_str();
    g->add_option("--split-ratio", gen.split_ratio, "Training fraction")->capture_default_str();

    auto* t = app.add_subcommand("train", "Train a model with the homotopy schedule");
    add_config(t);
    t->add_option("--data", tr.data, "Corpus directory containing manifest.csv");
    t->add_option("--out", tr.out, "Output directory")->capture_default_str();
    t->add_option("--mode", tr.mode, "multi (homotopy) or single (t = 0)")->capture_default_str();
    t->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
    t->add_option("--batch-size", tr.batch_size, "Patches per step")->capture_default_str();
    t->add_option("--seed", tr.seed, "Initialisation and shuffling seed")->capture_default_str();
    t->add_option("--lr-start", tr.lr_start, "Initial learning rate")->capture_default_str();
    t->add_option("--lr-end", tr.lr_end, "Final learning rate")->capture_default_str();
    t->add_option("--beta", tr.beta, "Dice weight in DiceCE")->capture_default_str();
    t->add_option("--lambda-smooth", tr.lambda_smooth, "Smoothness loss scale")->capture_default_str();
    t->add_option("--epsilon", tr.epsilon, "Dice epsilon")->capture_default_str();
    t->add_option("--clamp", tr.clamp, "CE probability clamp")->capture_default_str();
    t->add_flag("--normalize-smooth", tr.normalize_smooth, "Divide the smoothness sum by the pair count");
    t->add_option("--t-max", tr.t_max, "Final homotopy parameter")->capture_default_str();
    t->add_option("--t-granularity", tr.t_granularity, "step or epoch")->capture_default_str();
    t->add_flag("--augment", tr.augment, "Random rotations, flips and colour jitter");
    t->add_option("--hidden", tr.hidden, "Hidden channels")->capture_default_str();

    auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on the held-out split");
    add_config(e);
    double threshold_flag = 0.0;
    e->add_option("--data", ev.data, "Corpus directory");
    e->add_option("--checkpoint", ev.checkpoint, "Model checkpoint");
    e->add_option("--out", ev.out, "Output directory")->capture_default_str();
    e->add_option("--name", ev.name, "Model name in the report")->capture_default_str();
    auto* threshold_opt = e->add_option("--threshold", threshold_flag, "Override the EER threshold");

    auto* gr = app.add_subcommand("gradcheck", "Finite-difference verification of all gradients");
    add_config(gr);
    gr->add_option("--seed", gc.seed, "Instance seed")->capture_default_str();
    gr->add_option("--instances", gc.instances, "Random instances per size")->capture_default_str();
    gr->add_option("--sizes", gc.sizes, "Comma-separated WIDTHxHEIGHT list")->capture_default_str();
    gr->add_option("--tolerance", gc.tolerance, "Relative tolerance")->capture_default_str();
    gr->add_flag("--perturb-weights", gc.perturb_weights, "Inject a gradient bug (checker self-test)");
    gr->add_option("--out", gc.out, "Optional output directory");

    auto* c = app.add_subcommand("compare", "Side-by-side comparison of two evaluations");
    add_config(c);
    c->add_option("--a", cmp.a, "First metrics.json or eval directory");
    c->add_option("--b", cmp.b, "Second metrics.json or eval directory");
    c->add_option("--name-a", cmp.name_a, "Name of the first model")->capture_default_str();
    c->add_option("--name-b", cmp.name_b, "Name of the second model")->capture_default_str();
    c->add_option("--out", cmp.out, "Optional output directory");

    auto* r = app.add_subcommand("report", "Render metrics as a comparison table");
    add_config(r);
    r->add_option("--metrics", rep.metrics, "NAME=path to metrics.json (repeatable)");
    r->add_option("--row", rep.rows, "NAME=acc,jaccard,dice,auc,eer,threshold (repeatable)");
    r->add_option("--out", rep.out, "Optional output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& pe) {
        err << "error: " << pe.what() << "\n";
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << sub->help();
        }
        return kUsageError;
    }

    try {
        if (g->parsed()) {
            cmd_gen_data(gen, out);
        } else if (t->parsed()) {
            cmd_train(tr, out);
        } else if (e->parsed()) {
            if (threshold_opt->count() > 0) ev.threshold = threshold_flag;
            cmd_eval(ev, out);
        } else if (gr->parsed()) {
            return cmd_gradcheck(gc, out);
        } else if (c->parsed()) {
            cmd_compare(cmp, out);
        } else if (r->parsed()) {
            cmd_report(rep, out);
        }
    } catch (const NumericalError& ex) {
        err << "numerical abort: " << ex.what() << "\n";
        return kNumericalAbort;
    } catch (const IoError& ex) {
        err << "I/O error: " << ex.what() << "\n";
        return kIoError;
    } catch (const fs::filesystem_error& ex) {
        err << "I/O error: " << ex.what() << "\n";
        return kIoError;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageError;
    }
    return kSuccess;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace homoseg::cli
