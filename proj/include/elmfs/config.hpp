#pragma once

#include "elmfs/errors.hpp"
#include "elmfs/impairments.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace elmfs {

enum class TrainSnrMode { Mixed, PerPoint };
enum class TdEnergyRule { PerSymbol, PreambleBoost };

/// Scenario parameters. Defaults are the desk-scale profile.
struct SimConfig {
    int n = 64;            // search window / frame length
    int m = 128;           // received vector length, always 2N
    int l = 8;             // channel taps
    int hidden = 640;      // ELM hidden neurons
    int n_train = 20000;   // training samples per ELM model
    int n_s = 16;          // time-division preamble length
    int zc_root = 1;
    double rho = 0.3;
    double energy = 1.0;
    double eta = 0.2;
    double evm_target_percent = 35.0;
    double ridge = 1e-8;
    std::vector<double> snr_grid_db{0, 2, 4, 6, 8, 10, 12, 14, 16};
    int trials_per_point = 2000;
    int calibration_frames = 64;
    std::uint64_t seed = 20210601;
    TrainSnrMode train_snr_mode = TrainSnrMode::Mixed;
    TdEnergyRule td_energy_rule = TdEnergyRule::PerSymbol;
    bool hpa_enabled = true;
    SalehParams saleh;
};

SimConfig desk_profile();
SimConfig paper_profile();
SimConfig profile_by_name(std::string_view name);

// Throws ConfigError naming the offending field.
void validate(const SimConfig& cfg);

// Applies one key=value assignment. Unknown keys and bad values throw ConfigError.
void apply_setting(SimConfig& cfg, std::string_view key, std::string_view value);

// Flat key=value text, '#' comments, blank lines ignored.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});

// Canonical key=value serialization; parse_config(to_config_text(c)) == c.
std::string to_config_text(const SimConfig& cfg);

// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_digest(const SimConfig& cfg);

std::vector<double> parse_number_list(std::string_view text);

std::string format_double(double v);

} // namespace elmfs
