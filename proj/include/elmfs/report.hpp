#pragma once

#include "elmfs/elm.hpp"
#include "elmfs/errors.hpp"
#include "elmfs/sweep.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace elmfs {

inline constexpr std::string_view kCsvHeader =
    "method,axis,axis_value,snr_db,trials,sync_errors,sync_error_prob,bits_total,bit_errors,ber,seed,"
    "config_digest";

void write_csv(const std::vector<ResultRecord>& records, std::ostream& out);
void emit_csv(const std::vector<ResultRecord>& records, const std::filesystem::path& path);

// Throws std::invalid_argument on a malformed header or row.
std::vector<ResultRecord> read_csv(std::istream& in);
std::vector<ResultRecord> load_csv(const std::filesystem::path& path);

enum class PlotMetric { SyncErrorProb, Ber };

// Static SVG line chart with log-scale y, one series per method (and axis
// value, for parameter studies). Throws std::invalid_argument on empty input.
std::string render_plot(const std::vector<ResultRecord>& records, PlotMetric metric);
void emit_plot(const std::vector<ResultRecord>& records, const std::filesystem::path& path,
               PlotMetric metric = PlotMetric::SyncErrorProb);

/// Training-set file: "ELMDS", version byte, N and N_t as u32 LE, inputs as
/// column-major f64 LE, then offsets as u32 LE.
void save_dataset(const TrainingSet& set, const std::filesystem::path& path);
TrainingSet load_dataset(const std::filesystem::path& path);

} // namespace elmfs
