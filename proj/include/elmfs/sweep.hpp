#pragma once

#include "elmfs/config.hpp"
#include "elmfs/elm.hpp"
#include "elmfs/methods.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace elmfs {

struct Tally {
    std::int64_t trials = 0;
    std::int64_t sync_errors = 0;
    std::int64_t bits_total = 0;
    std::int64_t bit_errors = 0;

    void add(const TrialOutcome& o) {
        ++trials;
        sync_errors += o.sync_error ? 1 : 0;
        bits_total += o.bits_total;
        bit_errors += o.bit_errors;
    }
    Tally& operator+=(const Tally& o) {
        trials += o.trials;
        sync_errors += o.sync_errors;
        bits_total += o.bits_total;
        bit_errors += o.bit_errors;
        return *this;
    }
    friend bool operator==(const Tally&, const Tally&) = default;
};

struct ResultRecord {
    MethodId method = MethodId::Prop;
    std::string axis = "none";
    double axis_value = 0.0;
    double snr_db = 0.0;
    std::int64_t trials = 0;
    std::int64_t sync_errors = 0;
    std::int64_t bits_total = 0;
    std::int64_t bit_errors = 0;
    std::uint64_t seed = 0;
    std::string config_digest;

    double sync_error_prob() const {
        return trials > 0 ? static_cast<double>(sync_errors) / static_cast<double>(trials) : 0.0;
    }
    double ber() const {
        return bits_total > 0 ? static_cast<double>(bit_errors) / static_cast<double>(bits_total) : 0.0;
    }
    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

struct ModelTiming {
    MethodId method = MethodId::Prop;
    double snr_db = 0.0; // meaningful in per-point mode only
    double dataset_seconds = 0.0;
    double train_seconds = 0.0;
    double reciprocal_condition = 0.0;
    bool used_pseudo_inverse = false;
};

struct SweepReport {
    double sup_drive_gain = 0.0;
    double td_drive_gain = 0.0;
    std::vector<ModelTiming> models;
    double eval_seconds = 0.0;
    std::int64_t eval_trials = 0;
};

struct RunOptions {
    unsigned workers = 1;
    // Pre-trained models keyed by method; used instead of training.
    std::map<MethodId, ElmModel> models;
    // Receives the trained models when non-null (mixed mode only).
    std::map<MethodId, ElmModel>* trained_out = nullptr;
    SweepReport* report = nullptr;
    std::ostream* log = nullptr;
};

/// Trains (or takes) a model per ELM method, then runs trials_per_point
/// trials per SNR grid point. Trial t uses the stream (seed, Trial, t) for
/// every method and every SNR point, so curves differ only through the
/// method and the noise scale.
std::vector<ResultRecord> run_sweep(const SimConfig& cfg, std::span<const MethodId> methods,
                                    const RunOptions& options = {});

// Trains one model for `method` on a fresh dataset drawn at the given SNRs.
ElmModel train_model(MethodId method, const Scenario& sc, std::span<const double> snr_choices_db,
                     std::uint64_t key, unsigned workers, ModelTiming* timing = nullptr);

enum class StudyAxis { Evm, L, N, Rho };

std::string_view to_string(StudyAxis axis);
StudyAxis parse_axis(std::string_view name);

// cfg with one axis replaced. N also sets M = 2N and keeps hidden/N fixed.
SimConfig with_axis_value(const SimConfig& cfg, StudyAxis axis, double value);

std::vector<ResultRecord> run_parameter_study(const SimConfig& cfg, StudyAxis axis,
                                              std::span<const double> values,
                                              std::span<const MethodId> methods,
                                              const RunOptions& options = {});

} // namespace elmfs
