#pragma once

#include "satsim/engine.hpp"
#include "satsim/traffic.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace satsim::stats {

struct Summary {
    double p5 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double mean = 0.0;
};

/// Linear interpolation between order statistics at rank p/100 (n - 1).
double percentile(std::span<const double> samples, double p);
Summary summarize(std::span<const double> samples);

/// Empirical CDF as (value, fraction) at `points` evenly spaced quantiles,
/// fractions running from 0 to 1.
std::vector<std::pair<double, double>> cdf_points(std::span<const double> samples, int points);

/// S / (t_rx_finish - t_tx_start) in bit/s.
double file_throughput(const traffic::FileTransferRecord& record);

double beam_spectral_efficiency(double phy_bits, double measurement_s, double bandwidth_hz);

/// 100 (a - b) / b.
double gain_pct(double a, double b);

struct UserSample {
    int drop_index = 0;
    int terminal_id = 0;
    double mean_sinr_db = 0.0;
    std::vector<double> sinr_samples;
    std::int64_t delivered_bits = 0;
    double active_time_s = 0.0;
};

/// Central-beam users of every drop with at least one block, ordered by (drop, terminal).
std::vector<UserSample> user_samples(std::span<const engine::DropResult> drops);

struct StatReport {
    Stack stack = Stack::dvb;
    Direction direction = Direction::dl;
    std::string sub_scenario;
    std::string technology;
    std::size_t users = 0;
    std::size_t files = 0;
    Summary sinr_db;
    Summary user_tput_kbps;   // per user (full buffer) or per file (FTP3)
    double beam_phy_se_200mhz = 0.0;
    double beam_phy_se_400mhz = 0.0;
    double beam_tput_mbps = 0.0;
    std::optional<double> avg_tput_gain_pct;
    std::optional<double> beam_tput_gain_pct;
    std::vector<std::pair<double, double>> sinr_cdf;
    std::vector<std::pair<double, double>> tput_cdf;
};

struct ReportOptions {
    bool per_file_throughput = false;
    double beam_bandwidth_hz = 200e6;
    int cdf_points = 200;
    std::string sub_scenario;
};

/// Throws DataError when there is no central-beam sample (or no file in per-file mode).
StatReport build_report(std::span<const UserSample> users, std::span<const traffic::FileTransferRecord> files,
                        std::span<const engine::BeamCounters> beams, Stack stack, Direction direction,
                        const ReportOptions& options);

/// Pools all drops of one campaign.
StatReport build_report(const ScenarioConfig& cfg, std::span<const engine::DropResult> drops);

/// Cross-technology gains of a over b and of b over a.
void fill_gains(StatReport& a, StatReport& b);

/// Column order of the report table.
const std::vector<std::string>& report_columns();
void write_report_csv(std::ostream& out, std::span<const StatReport> rows);
void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf, const std::string& value_name);
/// One line per block: time, beam, terminal, direction, scheme, SINR, bits, success.
void write_event_log(std::ostream& out, std::span<const engine::BlockLogEntry> log);

} // namespace satsim::stats
