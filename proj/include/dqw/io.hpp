#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dqw/experiments.hpp"

namespace dqw {

inline constexpr std::string_view kCodeVersion = "1.0.0";

// Config text error carrying the offending line and key.
class ParseError : public ConfigError {
  public:
    ParseError(int line, std::string key, const std::string& message);
    int line() const { return line_; }
    const std::string& key() const { return key_; }

  private:
    int line_;
    std::string key_;
};

// Runtime I/O failure (unreadable or unwritable file). Exit code 3 in the CLI.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Parses `key: value` lines ('#' starts a comment). Keys: grid_size, steps,
// charge_q, charge_e, mass_mu, noise_kind, noise_ratio, realizations, seed,
// output_dir, snapshots. grid_size is required, everything else has a default.
ExperimentPlan parse_config(std::string_view text);
ExperimentPlan load_config(const std::filesystem::path& path);

// Canonical text with every default written out; parse_config(emit_config(p)) == p.
std::string emit_config(const ExperimentPlan& plan);

nlohmann::json plan_to_json(const ExperimentPlan& plan);

// Writes `<stem>.meta.json` next to `data_file`: code version, the command,
// the resolved config (structured and as text) plus caller-specific fields.
void write_sidecar(const std::filesystem::path& data_file, std::string_view command,
                   const ExperimentPlan& plan, const nlohmann::json& extra = {});
std::filesystem::path sidecar_path(const std::filesystem::path& data_file);

// `j,P` CSV, 17 significant digits.
void write_series(const TimeSeries& series, const std::filesystem::path& path);
std::vector<double> read_series(const std::filesystem::path& path);

enum class GridFormat { text, binary };

// text: `p,q,d` rows in row-major order.
// binary: 16-byte header then M*M little-endian float64, row-major:
//   bytes 0-7  magic "DQWDIST1"
//   bytes 8-11 M as uint32 little-endian
//   bytes 12-15 j as uint32 little-endian
void write_distribution(const DistributionSnapshot& snapshot, const std::filesystem::path& path,
                        GridFormat format = GridFormat::text);
DistributionSnapshot read_distribution(const std::filesystem::path& path);

// 17 significant digits ("%.17g"), used for data columns.
std::string format_double(double value);
// Shortest decimal that parses back to the same double.
std::string format_shortest(double value);

void write_text(const std::filesystem::path& path, std::string_view contents);
std::string read_text(const std::filesystem::path& path);

nlohmann::json peaks_to_json(const PeakRecord& peaks);

}  // namespace dqw
