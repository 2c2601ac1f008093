#pragma once

#include "elmfs/config.hpp"
#include "elmfs/elm.hpp"
#include "elmfs/impairments.hpp"
#include "elmfs/sync_metric.hpp"
#include "elmfs/waveform.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace elmfs {

// The four compared pipelines.
enum class MethodId : std::uint8_t { Prop = 0, TdCorr = 1, TdElm = 2, SupCorr = 3 };

inline constexpr std::array<MethodId, 4> kAllMethods{MethodId::Prop, MethodId::TdCorr,
                                                     MethodId::TdElm, MethodId::SupCorr};

std::string_view to_string(MethodId m);
MethodId parse_method(std::string_view name);
std::vector<MethodId> parse_method_list(std::string_view csv);

constexpr bool is_superimposed(MethodId m) { return m == MethodId::Prop || m == MethodId::SupCorr; }
constexpr bool uses_elm(MethodId m) { return m == MethodId::Prop || m == MethodId::TdElm; }

enum class FrameKind : std::uint8_t { Superimposed = 0, TimeDivision = 1 };

constexpr FrameKind frame_kind(MethodId m) {
    return is_superimposed(m) ? FrameKind::Superimposed : FrameKind::TimeDivision;
}

// Largest drawn offset: N - L + 1, capped at N - 1 so the frame start stays
// inside the N-point search window when L = 1.
constexpr int max_offset(const SimConfig& cfg) { return std::min(cfg.n - cfg.l + 1, cfg.n - 1); }

struct TdFrame {
    TrainingSequence preamble;
    DataSymbols data;
    CVector x;
    double preamble_amplitude = 1.0;
    double data_amplitude = 1.0;
};

/// [preamble | data] frame of length N. PerSymbol puts every symbol at
/// power E; PreambleBoost gives the preamble total energy rho E N and the
/// data the remaining (1 - rho) E N.
TdFrame build_td_frame(const TrainingSequence& preamble, const DataSymbols& data, int n, double rho,
                       double energy, TdEnergyRule rule);

/// Per-configuration state shared by every trial: training sequences and the
/// calibrated HPA drive for each frame family.
struct Scenario {
    SimConfig cfg;
    TrainingSequence training; // length N, superimposed
    TrainingSequence preamble; // length N_s, time-division
    HpaStage sup_hpa;
    HpaStage td_hpa;

    const HpaStage& hpa(FrameKind kind) const {
        return kind == FrameKind::Superimposed ? sup_hpa : td_hpa;
    }
};

// Concatenation of `frames` undistorted frames of the given family.
CVector calibration_probe(const SimConfig& cfg, FrameKind kind, int frames, std::uint64_t variant);

// Validates cfg, builds sequences and calibrates each family's drive on its own frames.
Scenario make_scenario(const SimConfig& cfg);

/// One transmitted-and-received frame. Every trial draws, in order: offset,
/// channel, 2N data bits, M noise samples, so both frame families consume
/// the same stream and see the same offset, channel and noise.
struct TrialFrame {
    FrameKind kind = FrameKind::Superimposed;
    int tau = 0;
    ChannelRealization channel;
    Bits data_bits;     // bits actually carried by the frame
    CVector clean;      // x before the HPA
    CVector distorted;  // x~ after HPA and power rescale
    CVector received;   // y, length M
};

TrialFrame draw_frame(FrameKind kind, const Scenario& sc, double snr_db, Rng& rng);

// Unnormalized synchronization metric of the given family.
MetricVector frame_metric(FrameKind kind, const Scenario& sc, const CVector& y);

struct TrialOutcome {
    bool sync_error = false;
    int tau = 0;
    int tau_hat = 0;
    std::int64_t bit_errors = 0;
    std::int64_t bits_total = 0;
};

struct TrialOptions {
    bool genie_sync = false; // detect with the true offset (sync still scored)
};

/// One end-to-end trial. ELM methods require a model whose input dimension
/// is N; a missing or mismatched model throws std::invalid_argument.
TrialOutcome run_trial(MethodId method, const Scenario& sc, double snr_db, const ElmModel* model,
                       Rng& rng, TrialOptions options = {});

/// Training set for an ELM method: one independently drawn frame per column,
/// SNR picked uniformly from `snr_choices_db`. Column i uses the stream
/// (seed, Dataset, key, i), so the set is identical for any worker count.
TrainingSet generate_dataset(MethodId method, const Scenario& sc, std::span<const double> snr_choices_db,
                             std::uint64_t key, unsigned workers = 1);

} // namespace elmfs
