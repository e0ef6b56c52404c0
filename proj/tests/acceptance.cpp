// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <string>

#include "cli_helpers.hpp"
#include "homoseg/gradcheck.hpp"
#include "homoseg/losses.hpp"
#include "homoseg/metrics.hpp"
#include "homoseg/report.hpp"
#include "homoseg/rng.hpp"
#include "homoseg/schedule.hpp"
#include "homoseg/synthdata.hpp"
#include "homoseg/trainer.hpp"
#include "morphology_oracle.hpp"

using namespace homoseg;
using namespace homoseg::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
    Outcome o;
    const auto t0 = Clock::now();
    GradcheckOptions opt;
    opt.instances = 100;
    opt.sizes = {{4, 4}, {8, 8}};
    const GradcheckReport report = run_gradcheck(opt);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    for (const auto& b : report.blocks) {
        worst = std::max(worst, b.max_rel_error);
        o.require(b.passed, b.name + " max rel err " + fmt("%.3e", b.max_rel_error));
    }
    for (const char* name : {"dice", "ce", "dice_ce", "smooth", "combined", "conv1_weights", "conv1_bias",
                             "conv2_weights", "conv2_bias"}) {
        o.require(std::any_of(report.blocks.begin(), report.blocks.end(),
                              [&](const GradcheckBlock& b) { return b.name == std::string(name) + "@8x8"; }),
                  std::string("missing block ") + name);
    }
    opt.perturb_weights = true;
    opt.instances = 5;
    o.require(!run_gradcheck(opt).passed(), "checker accepted perturbed gradients");
    o.require(elapsed < 60.0, fmt("runtime %.1f s", elapsed));
    if (o.pass) o.detail = fmt("%.0f blocks, worst rel err %.2e, %.1f s", static_cast<double>(report.blocks.size()), worst, elapsed);
    return o;
}

Outcome homotopy_endpoints() {
    Outcome o;
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const int w = 1 + static_cast<int>(uniform_index(rng, 16)), h = 1 + static_cast<int>(uniform_index(rng, 16));
        ProbMap p(w, h);
        LabelMask g(w, h);
        for (auto& v : p.values()) v = uniform01(rng);
        for (auto& v : g.values()) v = uniform01(rng) < 0.5;
        LossConfig cfg;
        cfg.beta = uniform01(rng);
        cfg.lambda_smooth = uniform(rng, 0.0, 3.0);
        cfg.normalize_smooth = k % 2 == 0;
        o.require(combined_loss(p, g, 0.0, cfg) == dice_ce_loss(p, g, cfg), "t=0 differs from DiceCE");
        o.require(combined_loss(p, g, 1.0, cfg) == smoothness_loss(p, cfg.lambda_smooth, cfg.normalize_smooth),
                  "t=1 differs from smoothness");
    }

    SceneSpec spec;
    spec.width = spec.height = 128;
    spec.texture_seed = 5;
    spec.fence_lines = 2;
    const Scene scene = generate_scene(spec);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 4;
    cfg.alpha_start = 1e-2;
    cfg.alpha_end = 1e-3;
    cfg.t_max = 1.0;
    const auto res = train(cfg, tile_patches(scene.image, brush_annotate(scene.mask, BrushSpec{16}), 32),
                           init_model(3));
    double worst = 0.0;
    for (const auto& r : res.history.records) {
        worst = std::max(worst, std::abs(r.combined - ((1 - r.t) * r.dice_ce + r.t * r.smooth)));
    }
    o.require(worst <= 1e-10, fmt("affine audit residual %.3e", worst));
    o.require(res.history.records.front().combined == res.history.records.front().dice_ce,
              "first step not at t = 0");
    if (o.pass) {
        o.detail = fmt("bit-exact on 200 instances; audit max residual %.1e over %.0f steps", worst,
                       static_cast<double>(res.history.records.size()));
    }
    return o;
}

Outcome metric_oracles() {
    Outcome o;
    Rng rng(2);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + uniform_index(rng, 199);
        std::vector<double> s;
        std::vector<std::uint8_t> y;
        while (true) {
            s.clear();
            y.clear();
            for (std::size_t i = 0; i < n; ++i) {
                y.push_back(uniform01(rng) < 0.5);
                double v = uniform01(rng) * 0.8 + 0.2 * y.back();
                if (k % 2) v = std::round(v * 20) / 20;
                s.push_back(v);
            }
            const auto pos = std::count(y.begin(), y.end(), 1);
            if (pos > 0 && pos < static_cast<long>(n)) break;
        }
        double wins = 0, pairs = 0, npos = 0, nneg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            (y[i] ? npos : nneg) += 1;
            if (!y[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (y[j]) continue;
                pairs += 1;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
        const RocCurve c = roc_curve(s, y);
        worst = std::max(worst, std::abs(auc(c) - wins / pairs));
        for (const auto& pt : c.points) {
            double tp = 0, fp = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (s[i] >= pt.threshold) (y[i] ? tp : fp) += 1;
            }
            o.require(pt.tpr == tp / npos && pt.fpr == fp / nneg, "ROC point differs from sweep");
        }
    }
    o.require(worst <= 1e-12, fmt("AUC vs Mann-Whitney %.3e", worst));
    for (int k = 0; k < 1000; ++k) {
        const ConfusionCounts c{uniform_index(rng, 100), uniform_index(rng, 100), uniform_index(rng, 100),
                                uniform_index(rng, 100)};
        const double j = jaccard(c);
        o.require(std::abs(dice_score(c) - 2 * j / (1 + j)) <= 1e-15, "dice/jaccard identity");
    }
    if (o.pass) o.detail = fmt("max |AUC - MW| %.1e on 50 instances; ROC sweep exact; identity on 1000 tuples", worst);
    return o;
}

Outcome behavioral_experiment(const fs::path& work) {
    Outcome o;
    const auto t0 = Clock::now();
    const auto corpus = work / "corpus";
    auto r = run_cli({"gen-data", "--out", corpus.string(), "--scenes", "8", "--size", "1120x1120", "--grass-fraction",
                      "0.5", "--brush", "64", "--patch-size", "64", "--seed", "1"});
    o.require(r.code == 0, "gen-data failed: " + r.err);
    if (!o.pass) return o;
    const std::vector<std::string> common = {"--epochs", "4",     "--batch-size", "8",     "--lr-start",
                                             "1e-2",     "--lr-end", "1e-3",       "--seed", "1",
                                             "--normalize-smooth", "--t-granularity", "step"};
    double dice[2], smooth[2];
    std::size_t steps[2];
    const char* modes[2] = {"single", "multi"};
    for (int m = 0; m < 2; ++m) {
        const auto run_dir = work / modes[m];
        std::vector<std::string> args = {"train", "--data", corpus.string(), "--out", run_dir.string(), "--mode",
                                         modes[m], "--t-max", "0.5"};
        args.insert(args.end(), common.begin(), common.end());
        r = run_cli(args);
        o.require(r.code == 0, std::string(modes[m]) + " training failed: " + r.err);
        if (!o.pass) return o;
        steps[m] = json::parse(slurp(run_dir / "train_summary.json")).at("steps").get<std::size_t>();
        r = run_cli({"eval", "--data", corpus.string(), "--checkpoint", (run_dir / "model.ckpt").string(), "--out",
                     (work / (std::string("eval_") + modes[m])).string(), "--name", modes[m]});
        o.require(r.code == 0, "eval failed: " + r.err);
        if (!o.pass) return o;
        const json j = json::parse(slurp(work / (std::string("eval_") + modes[m]) / "metrics.json"));
        dice[m] = j.at("dice").get<double>();
        smooth[m] = j.at("mean_smoothness").get<double>();
    }
    const double elapsed = seconds_since(t0);
    o.require(steps[0] == steps[1], "unequal step budgets");
    o.require(smooth[1] < smooth[0], fmt("multi smoothness %.6f not below single %.6f", smooth[1], smooth[0]));
    o.require(std::abs(dice[1] - dice[0]) <= 0.05, fmt("Dice gap %.4f (multi %.4f)", dice[1] - dice[0], dice[1]));
    o.require(elapsed < 600.0, fmt("runtime %.0f s", elapsed));
    if (o.pass) {
        o.detail = fmt("smoothness multi %.6f < single %.6f; ", smooth[1], smooth[0]) +
                   fmt("Dice multi %.4f vs single %.4f; %.0f s", dice[1], dice[0], elapsed);
    }
    return o;
}

Outcome schedule_exactness() {
    Outcome o;
    for (std::int64_t T : {1, 2, 10, 100, 1040, 99999}) {
        for (double t_max : {1.0, 0.5, 0.8}) {
            o.require(homotopy_t(0, T, t_max) == 0.0, "t(0) != 0");
            o.require(homotopy_t(T, T, t_max) == t_max, "t(T) != t_max");
            if (T % 2 == 0) o.require(homotopy_t(T / 2, T, 1.0) == 0.5, "t(T/2) != 0.5");
        }
        o.require(linear_lr(1e-3, 1e-5, T, 0) == 1e-3 && linear_lr(1e-3, 1e-5, T, T) == 1e-5, "lr endpoints");
        for (std::int64_t s = 0; s <= T; s += std::max<std::int64_t>(1, T / 50)) {
            o.require(linear_lr(1e-5, 1e-5, T, s) == 1e-5, "constant lr drifted");
        }
    }
    o.require(std::abs(homotopy_t(25, 100, 0.8) - 0.2) < 1e-16, "t(25/100, 0.8) != 0.2");
    if (o.pass) o.detail = "endpoints, midpoints and constant 1e-5 rate exact";
    return o;
}

Outcome morphology_oracle() {
    Outcome o;
    Rng rng(6);
    int compared = 0;
    for (int k = 0; k < 50; ++k) {
        const int w = 16 + static_cast<int>(uniform_index(rng, 49)), h = 16 + static_cast<int>(uniform_index(rng, 49));
        const LabelMask a = random_blob_mask(rng, w, h);
        LabelMask b = a;
        for (auto& v : b.values()) {
            if (uniform01(rng) < 0.05) v = 1;
        }
        for (int d : {1, 3, 8, 16}) {
            const LabelMask ca = brush_annotate(a, BrushSpec{d});
            const LabelMask cb = brush_annotate(b, BrushSpec{d});
            o.require(ca == closing_by_placements(a, d), fmt("oracle mismatch mask %.0f d=%.0f", k, d));
            bool mono = true, extensive = true;
            for (std::size_t i = 0; i < ca.size(); ++i) {
                mono = mono && (!ca[i] || cb[i]);
                extensive = extensive && (!a[i] || ca[i]);
            }
            o.require(mono, "not monotone");
            o.require(extensive, "removed true grass");
            o.require(brush_annotate(ca, BrushSpec{d}) == ca, "not idempotent");
            if (d == 1) o.require(ca == a, "unit brush is not the identity");
            ++compared;
        }
    }
    if (o.pass) o.detail = fmt("%.0f closings match the placement oracle; monotone, idempotent", compared);
    return o;
}

Outcome geometry_facts() {
    Outcome o;
    o.require(gsd_at_elevation(10) == 0.2, "gsd(10) != 0.2");
    const auto a = min_annotatable_area(BrushSpec{64}, 0.2);
    o.require(std::abs(a.extent_cm - 12.8) < 1e-12, fmt("extent %.6f", a.extent_cm));
    o.require(std::abs(a.area_cm2 - 128.68) < 0.005, fmt("area %.6f", a.area_cm2));
    o.require(tile_grid(5280, 3956, 224).count() == 391, "tile count");
    if (o.pass) o.detail = fmt("gsd 0.2 cm/px, extent %.1f cm, area %.2f cm^2, 391 tiles", a.extent_cm, a.area_cm2);
    return o;
}

Outcome determinism(const fs::path& work) {
    Outcome o;
    const auto out = work / "det";
    const std::vector<std::vector<std::string>> pipeline = {
        {"gen-data", "--out", (out / "corpus").string(), "--scenes", "2", "--size", "256x256", "--patch-size", "64",
         "--brush", "32", "--seed", "11"},
        {"train", "--data", (out / "corpus").string(), "--out", (out / "run").string(), "--epochs", "2",
         "--batch-size", "4", "--lr-start", "1e-2", "--seed", "5", "--augment", "--t-max", "0.5"},
        {"eval", "--data", (out / "corpus").string(), "--checkpoint", (out / "run" / "model.ckpt").string(), "--out",
         (out / "eval").string()},
        {"gradcheck", "--instances", "3", "--out", (out / "gradcheck").string()},
        {"compare", "--a", (out / "eval").string(), "--b", (out / "eval").string(), "--out",
         (out / "compare").string()},
        {"report", "--metrics", "run=" + (out / "eval").string(), "--out", (out / "report").string()},
    };
    std::map<std::string, std::string> first;
    std::string first_stdout;
    for (int pass = 0; pass < 2; ++pass) {
        std::string all_stdout;
        for (const auto& args : pipeline) {
            const auto r = run_cli(args);
            o.require(r.code == 0, args.front() + " failed: " + r.err);
            all_stdout += r.out;
        }
        if (!o.pass) return o;
        if (pass == 0) {
            first = snapshot(out);
            first_stdout = all_stdout;
        } else {
            const auto second = snapshot(out);
            o.require(first.size() == second.size(), "file set changed");
            for (const auto& [name, bytes] : first) {
                const auto it = second.find(name);
                o.require(it != second.end() && it->second == bytes, name + " differs between runs");
            }
            o.require(all_stdout == first_stdout, "stdout differs");
        }
    }
    if (o.pass) o.detail = fmt("%.0f files and all stdout byte-identical across two runs of every subcommand", static_cast<double>(first.size()));
    return o;
}

Outcome report_fidelity(const fs::path& work) {
    Outcome o;
    const ReportRow published{"Multi SAM 50", 0.90, 0.67, 0.80, 0.91, 0.17, 0.74};
    o.require(format_row_values(published) == "0.90 / 0.67 / 0.80 / 0.91 / 0.17 / 0.74",
              "formatter gave " + format_row_values(published));
    const auto r = run_cli({"report", "--row", "Multi SAM 50=0.90,0.67,0.80,0.91,0.17,0.74"});
    o.require(r.code == 0, "report failed");
    o.require(r.out.find("Multi SAM 50: 0.90 / 0.67 / 0.80 / 0.91 / 0.17 / 0.74") != std::string::npos,
              "report output lacks the published row");
    auto columns_in_order = [](const std::string& text) {
        const std::string header = text.substr(0, text.find('\n'));
        std::size_t pos = 0;
        for (const char* col : {"Model Name", "Accuracy", "Jaccard", "Dice", "ROC AUC", "EER", "EER Threshold"}) {
            pos = header.find(col, pos);
            if (pos == std::string::npos) return false;
            ++pos;
        }
        return true;
    };
    o.require(columns_in_order(r.out), "report columns out of order");
    const auto single = work / "eval_single", multi = work / "eval_multi";
    if (fs::exists(single) && fs::exists(multi)) {
        const auto c = run_cli({"compare", "--a", single.string(), "--b", multi.string(), "--name-a", "Single",
                                "--name-b", "Multi"});
        o.require(c.code == 0, "compare failed: " + c.err);
        o.require(columns_in_order(c.out), "compare columns out of order");
        o.require(c.out.find("\nSingle ") != std::string::npos && c.out.find("\nMulti ") != std::string::npos,
                  "compare rows missing");
    } else {
        o.require(false, "behavioral experiment outputs missing for compare");
    }
    if (o.pass) o.detail = "\"0.90 / 0.67 / 0.80 / 0.91 / 0.17 / 0.74\"; six columns in order in report and compare";
    return o;
}

}  // namespace

int main() {
    const fs::path work = scratch("acceptance");
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "gradient correctness", gradient_correctness},
        {2, "homotopy endpoint identities", homotopy_endpoints},
        {3, "metric oracle equivalence", metric_oracles},
        {4, "scaled behavioral experiment", [&] { return behavioral_experiment(work); }},
        {5, "schedule exactness", schedule_exactness},
        {6, "morphology oracle", morphology_oracle},
        {7, "geometry facts", geometry_facts},
        {8, "determinism", [&] { return determinism(work); }},
        {9, "report fidelity", [&] { return report_fidelity(work); }},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
