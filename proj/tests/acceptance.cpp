// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "elmfs/config.hpp"
#include "elmfs/elm.hpp"
#include "elmfs/linalg.hpp"
#include "elmfs/methods.hpp"
#include "elmfs/report.hpp"
#include "elmfs/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace elmfs;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

RMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    RMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

const ResultRecord& find(const std::vector<ResultRecord>& recs, MethodId m, double snr) {
    for (const auto& r : recs)
        if (r.method == m && r.snr_db == snr) return r;
    throw std::logic_error("missing record");
}

std::string csv_text(const std::vector<ResultRecord>& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

Verdict noiseless_sync() {
    Verdict v;
    SimConfig c = desk_profile();
    c.hpa_enabled = false;
    c.l = 1;
    c.snr_grid_db = {INFINITY};
    c.trials_per_point = 1000;
    const std::vector<MethodId> methods{MethodId::SupCorr, MethodId::Prop};
    const auto recs = run_sweep(c, methods);
    for (const auto& r : recs) {
        v.require(r.trials == 1000, std::string(to_string(r.method)) + " trial count");
        v.require(r.sync_errors == 0, std::string(to_string(r.method)) + " sync errors " +
                                          std::to_string(r.sync_errors) + "/1000");
    }
    if (v.pass) v.detail = "Sup_Corr 0/1000, Prop 0/1000 at N=64, L=1, rho=" + format_double(c.rho);
    return v;
}

Verdict awgn_theory() {
    Verdict v;
    SimConfig c = desk_profile();
    c.hpa_enabled = false;
    c.l = 1;
    c.rho = 0.0;
    const Scenario sc = make_scenario(c);
    const std::int64_t bits_per_frame = 2 * c.n;
    const std::int64_t frames = (1000000 + bits_per_frame - 1) / bits_per_frame;
    std::string summary;
    for (double snr : {0.0, 2.0, 4.0, 6.0, 8.0}) {
        std::int64_t errors = 0, total = 0;
        for (std::int64_t t = 0; t < frames; ++t) {
            Rng rng = Rng::stream(c.seed, StreamTag::Test, {0xA2, static_cast<std::uint64_t>(t)});
            const auto out = run_trial(MethodId::SupCorr, sc, snr, nullptr, rng, {.genie_sync = true});
            errors += out.bit_errors;
            total += out.bits_total;
        }
        const double ber = static_cast<double>(errors) / static_cast<double>(total);
        const double theory = q_function(std::sqrt(1.0 / snr_to_sigma2(snr, c.energy) * c.energy));
        const double rel = std::abs(ber - theory) / theory;
        v.require(total >= 1000000, "too few bits at " + format_double(snr) + " dB");
        v.require(rel <= 0.10, "BER " + fmt("%.5f", ber) + " vs " + fmt("%.5f", theory) + " at " +
                                   format_double(snr) + " dB");
        summary += (summary.empty() ? "" : ", ") + format_double(snr) + " dB " + fmt("%.2f%%", 100 * rel);
    }
    if (v.pass) v.detail = "relative BER error: " + summary;
    return v;
}

Verdict least_squares_suite() {
    Verdict v;
    Rng rng = Rng::stream(20210601, StreamTag::Test, {0xA3});
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const RMatrix a = random_matrix(rng.uniform_int(1, 20), rng.uniform_int(1, 30), rng);
        const RMatrix p = pseudo_inverse(a);
        const RMatrix ap = a * p, pa = p * a;
        worst = std::max({worst, (ap * a - a).norm(), (pa * p - p).norm(), (ap.transpose() - ap).norm(),
                          (pa.transpose() - pa).norm()});
    }
    v.require(worst <= 1e-8, "Penrose residual " + fmt("%.3g", worst));

    // Exact interpolation: square, well-conditioned hidden matrix.
    const RMatrix h = 4.0 * RMatrix::Identity(24, 24) + random_matrix(24, 24, rng);
    const RMatrix t = random_matrix(8, 24, rng);
    const double interp = (solve_output_weights(h, t, 0.0) * h - t).norm();
    v.require(interp <= 1e-6, "interpolation residual " + fmt("%.3g", interp));

    // Same through the full trainer on its own random hidden layer.
    const int n = 6, hidden = 30;
    TrainingSet set{random_matrix(n, hidden, rng), RMatrix()};
    std::vector<int> offsets(hidden);
    for (auto& o : offsets) o = rng.uniform_int(0, n - 1);
    set.labels = one_hot_labels(offsets, n);
    const ElmModel model = train(set, n, hidden, 0.0, rng);
    const double trained = (model.output_weights * hidden_layer(model, set.inputs) - set.labels).norm();
    v.require(trained <= 1e-6, "trained interpolation residual " + fmt("%.3g", trained));

    // Perturbation probe on an overdetermined fit.
    const RMatrix hh = random_matrix(16, 80, rng);
    const RMatrix tt = random_matrix(5, 80, rng);
    const RMatrix u = solve_output_weights(hh, tt, 0.0);
    const double base = (u * hh - tt).norm();
    int beaten = 0;
    for (int i = 0; i < 100; ++i) {
        RMatrix d = random_matrix(5, 16, rng);
        d *= 1e-3 / d.norm();
        beaten += ((u + d) * hh - tt).norm() < base;
    }
    v.require(beaten == 0, std::to_string(beaten) + " perturbations beat the LS residual");
    if (v.pass)
        v.detail = "Penrose max " + fmt("%.2g", worst) + ", interpolation " + fmt("%.2g", std::max(interp, trained)) +
                   ", 0/100 perturbations better";
    return v;
}

Verdict evm_calibration() {
    Verdict v;
    const SimConfig c = desk_profile();
    const CVector probe = calibration_probe(c, FrameKind::Superimposed, c.calibration_frames, 0);
    const CVector fresh = calibration_probe(c, FrameKind::Superimposed, c.calibration_frames, 1);
    double previous = 0.0;
    std::string summary;
    for (double target : {35.0, 40.0, 45.0, 50.0}) {
        const double g = calibrate_drive(target, c.saleh, probe);
        const double measured = hpa_evm(fresh, c.saleh, g);
        v.require(std::abs(measured - target) <= 0.5,
                  "target " + format_double(target) + " re-measured " + fmt("%.3f", measured));
        v.require(g > previous, "drive not increasing at " + format_double(target));
        previous = g;
        summary += (summary.empty() ? "" : ", ") + format_double(target) + "%->" + fmt("%.3f", measured) +
                   " (gain " + fmt("%.4f", g) + ")";
    }
    if (v.pass) v.detail = summary;
    return v;
}

struct DeskRun {
    std::vector<ResultRecord> records;
    double seconds = 0.0;
};

DeskRun desk_sweep() {
    const SimConfig c = desk_profile();
    const auto t0 = std::chrono::steady_clock::now();
    RunOptions o;
    o.workers = std::max(1u, std::thread::hardware_concurrency());
    DeskRun run;
    run.records = run_sweep(c, std::vector<MethodId>(kAllMethods.begin(), kAllMethods.end()), o);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

Verdict sync_trends(const DeskRun& run) {
    Verdict v;
    const SimConfig c = desk_profile();
    for (auto m : kAllMethods) {
        int violations = 0;
        for (std::size_t k = 1; k < c.snr_grid_db.size(); ++k)
            violations += find(run.records, m, c.snr_grid_db[k]).sync_error_prob() >
                          find(run.records, m, c.snr_grid_db[k - 1]).sync_error_prob();
        v.require(violations <= 1, std::string(to_string(m)) + " has " + std::to_string(violations) +
                                       " monotonicity violations");
    }
    for (double snr : c.snr_grid_db) {
        const double prop = find(run.records, MethodId::Prop, snr).sync_error_prob();
        const double sup = find(run.records, MethodId::SupCorr, snr).sync_error_prob();
        const double td = find(run.records, MethodId::TdCorr, snr).sync_error_prob();
        if (snr >= 4.0) v.require(prop <= sup, "Prop > Sup_Corr at " + format_double(snr) + " dB");
        v.require(sup <= td, "Sup_Corr > TD_Corr at " + format_double(snr) + " dB");
    }
    const double top = c.snr_grid_db.back();
    if (v.pass)
        v.detail = "at " + format_double(top) + " dB: Prop " +
                   fmt("%.4f", find(run.records, MethodId::Prop, top).sync_error_prob()) + ", Sup_Corr " +
                   fmt("%.4f", find(run.records, MethodId::SupCorr, top).sync_error_prob()) + ", TD_Corr " +
                   fmt("%.4f", find(run.records, MethodId::TdCorr, top).sync_error_prob()) + "; " +
                   fmt("%.0f s", run.seconds);
    return v;
}

Verdict ber_trends(const DeskRun& run) {
    Verdict v;
    const SimConfig c = desk_profile();
    std::string summary;
    for (double snr : c.snr_grid_db) {
        if (snr < 10.0) continue;
        const double prop = find(run.records, MethodId::Prop, snr).ber();
        const double sup = find(run.records, MethodId::SupCorr, snr).ber();
        const double td = find(run.records, MethodId::TdCorr, snr).ber();
        v.require(prop <= sup, "Prop BER > Sup_Corr at " + format_double(snr) + " dB");
        v.require(prop <= td, "Prop BER > TD_Corr at " + format_double(snr) + " dB");
        summary += (summary.empty() ? "" : ", ") + format_double(snr) + " dB " + fmt("%.4f", prop) + "/" +
                   fmt("%.4f", sup) + "/" + fmt("%.4f", td);
    }
    if (v.pass) v.detail = "Prop/Sup_Corr/TD_Corr BER: " + summary;
    return v;
}

Verdict detection_exactness() {
    Verdict v;
    SimConfig c = desk_profile();
    c.n = 32;
    c.m = 64;
    c.hpa_enabled = false;
    std::vector<Scenario> scenarios;
    for (int l = 1; l <= 4; ++l) {
        c.l = l;
        scenarios.push_back(make_scenario(c));
    }
    std::int64_t errors = 0, total = 0;
    Rng pick = Rng::stream(c.seed, StreamTag::Test, {0xA7});
    for (std::uint64_t t = 0; t < 500; ++t) {
        const Scenario& sc = scenarios[static_cast<std::size_t>(pick.uniform_int(0, 3))];
        Rng rng = Rng::stream(c.seed, StreamTag::Test, {0xA7, t});
        const auto out = run_trial(MethodId::SupCorr, sc, INFINITY, nullptr, rng, {.genie_sync = true});
        errors += out.bit_errors;
        total += out.bits_total;
    }
    v.require(total == 500 * 2 * 32, "unexpected bit count");
    v.require(errors == 0, std::to_string(errors) + " bit errors");
    if (v.pass) v.detail = "0 bit errors in " + std::to_string(total) + " bits";
    return v;
}

Verdict reproducibility() {
    Verdict v;
    SimConfig c = desk_profile();
    c.n_train = 2000;
    c.trials_per_point = 100;
    const std::vector<MethodId> methods(kAllMethods.begin(), kAllMethods.end());
    RunOptions one, eight;
    eight.workers = 8;
    const std::string a = csv_text(run_sweep(c, methods, one));
    const std::string b = csv_text(run_sweep(c, methods, eight));
    v.require(a == b, "CSV differs between 1 and 8 workers");
    if (v.pass) v.detail = std::to_string(a.size()) + " identical bytes";
    return v;
}

Verdict persistence() {
    Verdict v;
    SimConfig c = desk_profile();
    c.n_train = 2000;
    const Scenario sc = make_scenario(c);
    const ElmModel model = train_model(MethodId::Prop, sc, c.snr_grid_db, 0, 1);
    const auto path = std::filesystem::temp_directory_path() / "elmfs_acceptance_model.bin";
    save_model(model, path);
    const ElmModel back = load_model(path);
    Rng rng = Rng::stream(c.seed, StreamTag::Test, {0xA9});
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        RVector q(c.n);
        for (Eigen::Index j = 0; j < c.n; ++j) q[j] = rng.uniform();
        q.normalize();
        mismatches += infer(back, q) != infer(model, q);
    }
    v.require(mismatches == 0, std::to_string(mismatches) + " inference mismatches");

    auto bytes = serialize_model(model);
    auto rejects = [&](std::vector<std::uint8_t> b, const char* what) {
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
        }
        try {
            load_model(path);
            v.require(false, std::string(what) + " accepted");
        } catch (const CorruptModelError&) {
        }
    };
    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    rejects(truncated, "truncated file");
    auto magic = bytes;
    magic[1] = 'X';
    rejects(magic, "wrong magic");
    auto version = bytes;
    version[5] = 0xFF;
    rejects(version, "wrong version");
    std::filesystem::remove(path);
    if (v.pass) v.detail = "100/100 bitwise-equal outputs; truncated, bad magic and bad version rejected";
    return v;
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d: %s (%s) [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), s);
        std::fflush(stdout);
        failures += !v.pass;
    };

    report(1, "noiseless sync exactness", noiseless_sync);
    report(2, "QPSK/AWGN BER matches theory", awgn_theory);
    report(3, "least-squares and pseudo-inverse suite", least_squares_suite);
    report(4, "EVM calibration", evm_calibration);
    DeskRun run;
    bool have_run = true;
    try {
        run = desk_sweep();
    } catch (const std::exception& e) {
        have_run = false;
        std::printf("desk sweep failed: %s\n", e.what());
    }
    report(5, "desk-scale sync error trends", [&] {
        if (!have_run) return Verdict{false, "desk sweep did not complete"};
        return sync_trends(run);
    });
    report(6, "desk-scale BER ordering", [&] {
        if (!have_run) return Verdict{false, "desk sweep did not complete"};
        return ber_trends(run);
    });
    report(7, "end-to-end detection exactness", detection_exactness);
    report(8, "worker-count reproducibility", reproducibility);
    report(9, "model persistence", persistence);

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
