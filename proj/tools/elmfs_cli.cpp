#include "elmfs/config.hpp"
#include "elmfs/elm.hpp"
#include "elmfs/methods.hpp"
#include "elmfs/report.hpp"
#include "elmfs/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace elmfs;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string methods = "all";
    std::string out = "out";
    std::string profile = "desk";
    std::vector<std::string> overrides;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "key=value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
    cmd->add_option("--methods", o.methods, "comma-separated methods: Prop,TD_Corr,TD_ELM,Sup_Corr or all");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--profile", o.profile, "base parameter profile")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--set", o.overrides, "extra key=value override, applied after --config");
    cmd->add_option("--workers", o.workers, "worker threads (0 = hardware concurrency)");
}

SimConfig resolve_config(const CommonOptions& o) {
    SimConfig cfg = profile_by_name(o.profile);
    if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed) cfg.seed = *o.seed;
    validate(cfg);
    return cfg;
}

unsigned worker_count(const CommonOptions& o) {
    return o.workers > 0 ? o.workers : std::max(1u, std::thread::hardware_concurrency());
}

fs::path prepare_out(const CommonOptions& o) {
    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::vector<MethodId> elm_methods(const std::vector<MethodId>& methods) {
    std::vector<MethodId> out;
    std::copy_if(methods.begin(), methods.end(), std::back_inserter(out), [](MethodId m) { return uses_elm(m); });
    return out;
}

fs::path model_path(const fs::path& dir, MethodId m) {
    return dir / ("model_" + std::string(to_string(m)) + ".elmfs");
}

void print_timing(const SweepReport& rep) {
    for (const auto& t : rep.models)
        std::printf("timing: %s training %.2f s (dataset %.2f s, solve %.2f s), rcond %.2e%s\n",
                    std::string(to_string(t.method)).c_str(), t.dataset_seconds + t.train_seconds,
                    t.dataset_seconds, t.train_seconds, t.reciprocal_condition,
                    t.used_pseudo_inverse ? ", pseudo-inverse fallback" : "");
    if (rep.eval_trials > 0)
        std::printf("timing: %lld trials in %.2f s (%.3f ms per trial)\n", static_cast<long long>(rep.eval_trials),
                    rep.eval_seconds, 1e3 * rep.eval_seconds / static_cast<double>(rep.eval_trials));
}

void write_results(const std::vector<ResultRecord>& recs, const fs::path& dir, const std::string& stem) {
    emit_csv(recs, dir / (stem + ".csv"));
    emit_plot(recs, dir / (stem + "_sync.svg"), PlotMetric::SyncErrorProb);
    emit_plot(recs, dir / (stem + "_ber.svg"), PlotMetric::Ber);
    std::printf("wrote %s.csv, %s_sync.svg, %s_ber.svg in %s\n", stem.c_str(), stem.c_str(), stem.c_str(),
                dir.string().c_str());
}

void print_summary(const std::vector<ResultRecord>& recs) {
    std::printf("%-9s %6s %8s %10s %10s\n", "method", "axis", "snr_db", "sync_err", "ber");
    for (const auto& r : recs)
        std::printf("%-9s %6s %8s %10.4f %10.5f\n", std::string(to_string(r.method)).c_str(),
                    r.axis == "none" ? "-" : (r.axis + "=" + format_double(r.axis_value)).c_str(),
                    format_double(r.snr_db).c_str(), r.sync_error_prob(), r.ber());
}

int cmd_calibrate(const CommonOptions& o, const std::vector<double>& targets) {
    const SimConfig base = resolve_config(o);
    const fs::path dir = prepare_out(o);
    std::vector<double> evms = targets.empty() ? std::vector<double>{base.evm_target_percent} : targets;
    std::string text = "family,target_evm,drive_gain,evm_fresh_probe\n";
    for (auto kind : {FrameKind::Superimposed, FrameKind::TimeDivision}) {
        const CVector probe = calibration_probe(base, kind, base.calibration_frames, 0);
        const CVector fresh = calibration_probe(base, kind, base.calibration_frames, 1);
        for (double target : evms) {
            const double g = calibrate_drive(target, base.saleh, probe);
            const double measured = hpa_evm(fresh, base.saleh, g);
            text += std::string(kind == FrameKind::Superimposed ? "superimposed" : "time_division") + "," +
                    format_double(target) + "," + format_double(g) + "," + format_double(measured) + "\n";
        }
    }
    std::fputs(text.c_str(), stdout);
    std::ofstream(dir / "calibration.csv", std::ios::binary) << text;
    return 0;
}

int cmd_gen_dataset(const CommonOptions& o) {
    const SimConfig cfg = resolve_config(o);
    const fs::path dir = prepare_out(o);
    const Scenario sc = make_scenario(cfg);
    for (auto m : elm_methods(parse_method_list(o.methods))) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto set = generate_dataset(m, sc, cfg.snr_grid_db, 0, worker_count(o));
        const fs::path path = dir / ("dataset_" + std::string(to_string(m)) + ".bin");
        save_dataset(set, path);
        std::printf("%s: %lld samples -> %s (%.2f s)\n", std::string(to_string(m)).c_str(),
                    static_cast<long long>(set.inputs.cols()), path.string().c_str(),
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return 0;
}

int cmd_train(const CommonOptions& o) {
    const SimConfig cfg = resolve_config(o);
    const fs::path dir = prepare_out(o);
    const Scenario sc = make_scenario(cfg);
    SweepReport rep;
    for (auto m : elm_methods(parse_method_list(o.methods))) {
        ModelTiming t;
        const ElmModel model = train_model(m, sc, cfg.snr_grid_db, 0, worker_count(o), &t);
        save_model(model, model_path(dir, m));
        rep.models.push_back(t);
        std::printf("%s -> %s\n", std::string(to_string(m)).c_str(), model_path(dir, m).string().c_str());
    }
    print_timing(rep);
    return 0;
}

int run_and_report(const CommonOptions& o, const SimConfig& cfg, RunOptions run, bool save_models) {
    const fs::path dir = prepare_out(o);
    const auto methods = parse_method_list(o.methods);
    SweepReport rep;
    std::map<MethodId, ElmModel> trained;
    run.workers = worker_count(o);
    run.report = &rep;
    run.log = &std::cerr;
    if (save_models) run.trained_out = &trained;
    const auto recs = run_sweep(cfg, methods, run);
    for (const auto& [m, model] : trained) save_model(model, model_path(dir, m));
    print_summary(recs);
    print_timing(rep);
    write_results(recs, dir, "results");
    return 0;
}

int cmd_eval(const CommonOptions& o, const std::string& models_dir) {
    const SimConfig cfg = resolve_config(o);
    const fs::path from = models_dir.empty() ? fs::path(o.out) : fs::path(models_dir);
    RunOptions run;
    for (auto m : elm_methods(parse_method_list(o.methods))) run.models[m] = load_model(model_path(from, m));
    return run_and_report(o, cfg, run, false);
}

int cmd_sweep(const CommonOptions& o) { return run_and_report(o, resolve_config(o), RunOptions{}, true); }

int cmd_study(const CommonOptions& o, const std::string& axis_name, const std::string& values_text) {
    const SimConfig cfg = resolve_config(o);
    const fs::path dir = prepare_out(o);
    const StudyAxis axis = parse_axis(axis_name);
    const auto values = parse_number_list(values_text);
    RunOptions run;
    run.workers = worker_count(o);
    run.log = &std::cerr;
    const auto recs = run_parameter_study(cfg, axis, values, parse_method_list(o.methods), run);
    print_summary(recs);
    write_results(recs, dir, "study_" + std::string(to_string(axis)));
    return 0;
}

int cmd_plot(const CommonOptions& o, const std::string& input) {
    const fs::path dir = prepare_out(o);
    const fs::path in = input.empty() ? fs::path(o.out) / "results.csv" : fs::path(input);
    const auto recs = load_csv(in);
    const std::string stem = in.stem().string();
    emit_plot(recs, dir / (stem + "_sync.svg"), PlotMetric::SyncErrorProb);
    emit_plot(recs, dir / (stem + "_ber.svg"), PlotMetric::Ber);
    std::printf("wrote %s_sync.svg and %s_ber.svg in %s\n", stem.c_str(), stem.c_str(), dir.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superimposed-training frame synchronization with an extreme learning machine"};
    app.require_subcommand(1);

    CommonOptions common;
    std::vector<double> targets;
    std::string models_dir, axis, values, input;

    auto* calibrate = app.add_subcommand("calibrate-evm", "calibrate the amplifier drive for target EVMs");
    add_common(calibrate, common);
    calibrate->add_option("--targets", targets, "EVM targets in percent (default: config value)")->delimiter(',');

    auto* gen = app.add_subcommand("gen-dataset", "generate ELM training sets");
    add_common(gen, common);

    auto* train_cmd = app.add_subcommand("train", "train and save ELM models");
    add_common(train_cmd, common);

    auto* eval = app.add_subcommand("eval", "evaluate with previously trained models");
    add_common(eval, common);
    eval->add_option("--models", models_dir, "directory holding model_<method>.elmfs (default: --out)");

    auto* sweep = app.add_subcommand("sweep", "train and evaluate over the SNR grid");
    add_common(sweep, common);

    auto* study = app.add_subcommand("study", "repeat the sweep while varying one parameter");
    add_common(study, common);
    study->add_option("--axis", axis, "EVM, L, N or rho")->required();
    study->add_option("--values", values, "values as a,b,c or start:step:stop")->required();

    auto* plot = app.add_subcommand("plot", "render SVG charts from a results CSV");
    add_common(plot, common);
    plot->add_option("--input", input, "results CSV (default: <out>/results.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*calibrate) return cmd_calibrate(common, targets);
        if (*gen) return cmd_gen_dataset(common);
        if (*train_cmd) return cmd_train(common);
        if (*eval) return cmd_eval(common, models_dir);
        if (*sweep) return cmd_sweep(common);
        if (*study) return cmd_study(common, axis, values);
        if (*plot) return cmd_plot(common, input);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
