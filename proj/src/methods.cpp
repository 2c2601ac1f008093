#include "elmfs/methods.hpp"

#include "elmfs/detection.hpp"
#include "elmfs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace elmfs {

std::string_view to_string(MethodId m) {
    switch (m) {
    case MethodId::Prop: return "Prop";
    case MethodId::TdCorr: return "TD_Corr";
    case MethodId::TdElm: return "TD_ELM";
    case MethodId::SupCorr: return "Sup_Corr";
    }
    return "?";
}

MethodId parse_method(std::string_view name) {
    for (auto m : kAllMethods)
        if (name == to_string(m)) return m;
    // Accept the enum spellings as well.
    if (name == "TdCorr") return MethodId::TdCorr;
    if (name == "TdElm") return MethodId::TdElm;
    if (name == "SupCorr") return MethodId::SupCorr;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::vector<MethodId> parse_method_list(std::string_view csv) {
    std::vector<MethodId> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto next = csv.find(',', pos);
        const auto item = csv.substr(pos, next == std::string_view::npos ? csv.npos : next - pos);
        if (item == "all") {
            out.assign(kAllMethods.begin(), kAllMethods.end());
        } else if (!item.empty()) {
            const auto m = parse_method(item);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty method list");
    return out;
}

TdFrame build_td_frame(const TrainingSequence& preamble, const DataSymbols& data, int n, double rho,
                       double energy, TdEnergyRule rule) {
    const auto ns = static_cast<int>(preamble.size());
    if (ns < 1 || ns >= n) throw std::invalid_argument("build_td_frame: need 1 <= N_s < N");
    if (data.symbols.size() != n - ns)
        throw std::invalid_argument("build_td_frame: data length must be N - N_s");

    TdFrame f;
    f.preamble = preamble;
    f.data = data;
    if (rule == TdEnergyRule::PerSymbol) {
        f.preamble_amplitude = std::sqrt(energy);
        f.data_amplitude = std::sqrt(energy);
    } else {
        f.preamble_amplitude = std::sqrt(rho * energy * n / ns);
        f.data_amplitude = std::sqrt((1.0 - rho) * energy * n / (n - ns));
    }
    f.x.resize(n);
    f.x.head(ns) = f.preamble_amplitude * preamble.samples;
    f.x.tail(n - ns) = f.data_amplitude * data.symbols;
    return f;
}

CVector calibration_probe(const SimConfig& cfg, FrameKind kind, int frames, std::uint64_t variant) {
    const TrainingSequence training = zadoff_chu(cfg.n, cfg.zc_root);
    const TrainingSequence preamble = zadoff_chu(cfg.n_s, cfg.zc_root);
    Rng rng = Rng::stream(cfg.seed, StreamTag::Probe, {static_cast<std::uint64_t>(kind), variant});
    CVector probe(static_cast<Eigen::Index>(frames) * cfg.n);
    for (int f = 0; f < frames; ++f) {
        if (kind == FrameKind::Superimposed) {
            const auto data = qpsk_modulate(random_bits(2 * static_cast<std::size_t>(cfg.n), rng));
            probe.segment(static_cast<Eigen::Index>(f) * cfg.n, cfg.n) =
                superimpose(training, data, cfg.rho, cfg.energy).x;
        } else {
            const auto data =
                qpsk_modulate(random_bits(2 * static_cast<std::size_t>(cfg.n - cfg.n_s), rng));
            probe.segment(static_cast<Eigen::Index>(f) * cfg.n, cfg.n) =
                build_td_frame(preamble, data, cfg.n, cfg.rho, cfg.energy, cfg.td_energy_rule).x;
        }
    }
    return probe;
}

Scenario make_scenario(const SimConfig& cfg) {
    validate(cfg);
    Scenario sc;
    sc.cfg = cfg;
    sc.training = zadoff_chu(cfg.n, cfg.zc_root);
    sc.preamble = zadoff_chu(cfg.n_s, cfg.zc_root);
    for (auto kind : {FrameKind::Superimposed, FrameKind::TimeDivision}) {
        HpaStage& stage = kind == FrameKind::Superimposed ? sc.sup_hpa : sc.td_hpa;
        stage.enabled = cfg.hpa_enabled;
        stage.params = cfg.saleh;
        if (cfg.hpa_enabled)
            stage.drive_gain = calibrate_drive(cfg.evm_target_percent, cfg.saleh,
                                               calibration_probe(cfg, kind, cfg.calibration_frames, 0));
    }
    return sc;
}

TrialFrame draw_frame(FrameKind kind, const Scenario& sc, double snr_db, Rng& rng) {
    const SimConfig& cfg = sc.cfg;
    TrialFrame fr;
    fr.kind = kind;
    fr.tau = rng.uniform_int(0, max_offset(cfg));
    fr.channel = draw_channel(cfg.l, cfg.eta, rng);
    Bits bits = random_bits(2 * static_cast<std::size_t>(cfg.n), rng);

    if (kind == FrameKind::Superimposed) {
        fr.clean = superimpose(sc.training, qpsk_modulate(bits), cfg.rho, cfg.energy).x;
        fr.data_bits = std::move(bits);
    } else {
        bits.resize(2 * static_cast<std::size_t>(cfg.n - cfg.n_s));
        fr.clean = build_td_frame(sc.preamble, qpsk_modulate(bits), cfg.n, cfg.rho, cfg.energy,
                                  cfg.td_energy_rule)
                       .x;
        fr.data_bits = std::move(bits);
    }
    fr.distorted = distort(fr.clean, sc.hpa(kind), cfg.energy);
    fr.received = transmit(fr.distorted, fr.tau, fr.channel,
                           NoiseModel{snr_to_sigma2(snr_db, cfg.energy)}, rng);
    return fr;
}

MetricVector frame_metric(FrameKind kind, const Scenario& sc, const CVector& y) {
    return kind == FrameKind::Superimposed ? correlation_metric(y, sc.training)
                                           : td_correlation_metric(y, sc.preamble, sc.cfg.n);
}

TrialOutcome run_trial(MethodId method, const Scenario& sc, double snr_db, const ElmModel* model,
                       Rng& rng, TrialOptions options) {
    const SimConfig& cfg = sc.cfg;
    if (uses_elm(method) && (model == nullptr || model->input_dim() != cfg.n))
        throw std::invalid_argument("run_trial: " + std::string(to_string(method)) +
                                    " needs a trained model with input dimension N");

    const FrameKind kind = frame_kind(method);
    const TrialFrame fr = draw_frame(kind, sc, snr_db, rng);
    const MetricVector metric = frame_metric(kind, sc, fr.received);

    TrialOutcome out;
    out.tau = fr.tau;
    bool degenerate = false;
    if (!(metric.values.maxCoeff() > 0.0)) {
        degenerate = true;
        out.tau_hat = 0;
    } else if (uses_elm(method)) {
        out.tau_hat = decide_offset(infer(*model, normalize_metric(metric).values));
    } else {
        out.tau_hat = peak_index(metric.values);
    }
    out.sync_error = degenerate || out.tau_hat != out.tau;

    // Estimates past the last admissible start are clamped for extraction.
    const int tau_det = options.genie_sync ? fr.tau : std::clamp(out.tau_hat, 0, max_offset(cfg));

    if (kind == FrameKind::Superimposed) {
        if (cfg.rho >= 1.0) return out; // no data symbols to detect
        const CVector x_est = invert_channel(fr.received, fr.channel, tau_det, cfg.n);
        const auto det = demap_and_count(cancel_training(x_est, sc.training, cfg.rho, cfg.energy),
                                         fr.data_bits);
        out.bit_errors = det.bit_errors;
        out.bits_total = det.bits_total;
    } else {
        const CVector x_est = invert_channel(fr.received, fr.channel, tau_det, cfg.n);
        const double amp = cfg.td_energy_rule == TdEnergyRule::PerSymbol
                               ? std::sqrt(cfg.energy)
                               : std::sqrt((1.0 - cfg.rho) * cfg.energy * cfg.n / (cfg.n - cfg.n_s));
        const auto det = demap_and_count(x_est.tail(cfg.n - cfg.n_s) / amp, fr.data_bits);
        out.bit_errors = det.bit_errors;
        out.bits_total = det.bits_total;
    }
    return out;
}

TrainingSet generate_dataset(MethodId method, const Scenario& sc, std::span<const double> snr_choices_db,
                             std::uint64_t key, unsigned workers) {
    if (!uses_elm(method)) throw std::invalid_argument("generate_dataset: method does not use an ELM");
    if (snr_choices_db.empty()) throw std::invalid_argument("generate_dataset: no SNR choices");
    const SimConfig& cfg = sc.cfg;
    const FrameKind kind = frame_kind(method);

    TrainingSet set;
    set.inputs.resize(cfg.n, cfg.n_train);
    std::vector<int> offsets(static_cast<std::size_t>(cfg.n_train));
    const int last_choice = static_cast<int>(snr_choices_db.size()) - 1;

    parallel_for(static_cast<std::size_t>(cfg.n_train), workers, [&](std::size_t i, unsigned) {
        Rng rng = Rng::stream(cfg.seed, StreamTag::Dataset, {key, i});
        for (;;) {
            const double snr = snr_choices_db[static_cast<std::size_t>(rng.uniform_int(0, last_choice))];
            const TrialFrame fr = draw_frame(kind, sc, snr, rng);
            const MetricVector g = frame_metric(kind, sc, fr.received);
            if (!(g.values.maxCoeff() > 0.0)) continue; // all-noise pathological draw
            set.inputs.col(static_cast<Eigen::Index>(i)) = normalize_metric(g).values;
            offsets[i] = fr.tau;
            break;
        }
    });
    set.labels = one_hot_labels(offsets, cfg.n);
    return set;
}

} // namespace elmfs
