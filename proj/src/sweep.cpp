#include "elmfs/sweep.hpp"

#include "elmfs/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace elmfs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

ElmModel train_model(MethodId method, const Scenario& sc, std::span<const double> snr_choices_db,
                     std::uint64_t key, unsigned workers, ModelTiming* timing) {
    const auto t0 = Clock::now();
    const TrainingSet set = generate_dataset(method, sc, snr_choices_db, key, workers);
    const double dataset_s = seconds_since(t0);

    const auto t1 = Clock::now();
    Rng init = Rng::stream(sc.cfg.seed, StreamTag::ModelInit, {static_cast<std::uint64_t>(method), key});
    TrainReport rep;
    ElmModel model = train(set, sc.cfg.n, sc.cfg.hidden, sc.cfg.ridge, init, &rep);
    if (timing) {
        timing->method = method;
        timing->dataset_seconds = dataset_s;
        timing->train_seconds = seconds_since(t1);
        timing->reciprocal_condition = rep.reciprocal_condition;
        timing->used_pseudo_inverse = rep.used_pseudo_inverse;
    }
    return model;
}

std::vector<ResultRecord> run_sweep(const SimConfig& cfg, std::span<const MethodId> methods,
                                    const RunOptions& options) {
    const Scenario sc = make_scenario(cfg);
    const std::string digest = config_digest(cfg);
    const std::size_t points = cfg.snr_grid_db.size();
    const unsigned workers = std::max(1u, options.workers);

    SweepReport local_report;
    SweepReport& report = options.report ? *options.report : local_report;
    report = SweepReport{};
    report.sup_drive_gain = sc.sup_hpa.enabled ? sc.sup_hpa.drive_gain : 0.0;
    report.td_drive_gain = sc.td_hpa.enabled ? sc.td_hpa.drive_gain : 0.0;

    // models[method index][point]; mixed mode shares one model across points.
    std::vector<std::vector<const ElmModel*>> model_for(methods.size(),
                                                        std::vector<const ElmModel*>(points, nullptr));
    std::vector<std::unique_ptr<ElmModel>> owned;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const MethodId m = methods[mi];
        if (!uses_elm(m)) continue;
        if (auto it = options.models.find(m); it != options.models.end()) {
            if (it->second.input_dim() != cfg.n)
                throw std::invalid_argument("run_sweep: supplied model for " + std::string(to_string(m)) +
                                            " has input dimension " +
                                            std::to_string(it->second.input_dim()) + ", expected N");
            std::fill(model_for[mi].begin(), model_for[mi].end(), &it->second);
            continue;
        }
        if (cfg.train_snr_mode == TrainSnrMode::Mixed) {
            ModelTiming t;
            owned.push_back(std::make_unique<ElmModel>(train_model(m, sc, cfg.snr_grid_db, 0, workers, &t)));
            report.models.push_back(t);
            std::fill(model_for[mi].begin(), model_for[mi].end(), owned.back().get());
            if (options.trained_out) (*options.trained_out)[m] = *owned.back();
            if (options.log)
                *options.log << "trained " << to_string(m) << " in " << t.dataset_seconds << " s (data) + "
                             << t.train_seconds << " s (solve)\n";
        } else {
            for (std::size_t k = 0; k < points; ++k) {
                ModelTiming t;
                const double snr = cfg.snr_grid_db[k];
                owned.push_back(std::make_unique<ElmModel>(
                    train_model(m, sc, std::span<const double>(&snr, 1), 1 + k, workers, &t)));
                t.snr_db = snr;
                report.models.push_back(t);
                model_for[mi][k] = owned.back().get();
            }
        }
    }

    const auto trials = static_cast<std::size_t>(cfg.trials_per_point);
    const std::size_t slots = methods.size() * points;
    std::vector<std::vector<Tally>> partial(workers, std::vector<Tally>(slots));

    const auto t0 = Clock::now();
    parallel_for(points * trials, workers, [&](std::size_t idx, unsigned w) {
        const std::size_t k = idx / trials;
        const std::size_t t = idx % trials;
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            Rng rng = Rng::stream(cfg.seed, StreamTag::Trial, {t});
            partial[w][mi * points + k].add(
                run_trial(methods[mi], sc, cfg.snr_grid_db[k], model_for[mi][k], rng));
        }
    });
    report.eval_seconds = seconds_since(t0);
    report.eval_trials = static_cast<std::int64_t>(points * trials * methods.size());

    std::vector<ResultRecord> records;
    records.reserve(slots);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        for (std::size_t k = 0; k < points; ++k) {
            Tally total;
            for (const auto& p : partial) total += p[mi * points + k];
            ResultRecord r;
            r.method = methods[mi];
            r.snr_db = cfg.snr_grid_db[k];
            r.trials = total.trials;
            r.sync_errors = total.sync_errors;
            r.bits_total = total.bits_total;
            r.bit_errors = total.bit_errors;
            r.seed = cfg.seed;
            r.config_digest = digest;
            records.push_back(std::move(r));
        }
    }
    return records;
}

std::string_view to_string(StudyAxis axis) {
    switch (axis) {
    case StudyAxis::Evm: return "EVM";
    case StudyAxis::L: return "L";
    case StudyAxis::N: return "N";
    case StudyAxis::Rho: return "rho";
    }
    return "?";
}

StudyAxis parse_axis(std::string_view name) {
    if (name == "EVM" || name == "evm") return StudyAxis::Evm;
    if (name == "L" || name == "l") return StudyAxis::L;
    if (name == "N" || name == "n") return StudyAxis::N;
    if (name == "rho") return StudyAxis::Rho;
    throw std::invalid_argument("unknown study axis '" + std::string(name) + "'");
}

SimConfig with_axis_value(const SimConfig& cfg, StudyAxis axis, double value) {
    SimConfig out = cfg;
    auto as_int = [&](const char* field) {
        if (value != std::floor(value)) throw ConfigError(field, "study value must be an integer");
        return static_cast<int>(value);
    };
    switch (axis) {
    case StudyAxis::Evm: out.evm_target_percent = value; break;
    case StudyAxis::L: out.l = as_int("l"); break;
    case StudyAxis::N: {
        out.n = as_int("n");
        out.m = 2 * out.n;
        const double ratio = static_cast<double>(cfg.hidden) / cfg.n;
        out.hidden = std::max(1, static_cast<int>(std::lround(ratio * out.n)));
        break;
    }
    case StudyAxis::Rho: out.rho = value; break;
    }
    validate(out);
    return out;
}

std::vector<ResultRecord> run_parameter_study(const SimConfig& cfg, StudyAxis axis,
                                              std::span<const double> values,
                                              std::span<const MethodId> methods,
                                              const RunOptions& options) {
    // Validate every point before spending time on any of them.
    std::vector<SimConfig> configs;
    for (double v : values) configs.push_back(with_axis_value(cfg, axis, v));

    RunOptions per_point = options;
    per_point.models.clear(); // dimensions or scenario change with the axis
    per_point.trained_out = nullptr;

    std::vector<ResultRecord> out;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (options.log) *options.log << to_string(axis) << " = " << format_double(values[i]) << '\n';
        auto recs = run_sweep(configs[i], methods, per_point);
        for (auto& r : recs) {
            r.axis = std::string(to_string(axis));
            r.axis_value = values[i];
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace elmfs
