#include "satsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace satsim::stats {

double percentile(std::span<const double> samples, double p)
{
    if (samples.empty()) {
        throw DataError("percentile: empty sample set");
    }
    if (!(p >= 0.0 && p <= 100.0)) {
        throw DomainError("percentile: p must lie in [0, 100]");
    }
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const double rank = p / 100.0 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return frac == 0.0 ? v[lo] : v[lo] + frac * (v[hi] - v[lo]);
}

Summary summarize(std::span<const double> samples)
{
    if (samples.empty()) {
        throw DataError("summarize: empty sample set");
    }
    Summary s;
    s.p5 = percentile(samples, 5.0);
    s.p50 = percentile(samples, 50.0);
    s.p95 = percentile(samples, 95.0);
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    return s;
}

std::vector<std::pair<double, double>> cdf_points(std::span<const double> samples, int points)
{
    if (samples.empty()) {
        throw DataError("cdf_points: empty sample set");
    }
    if (points < 2) {
        throw DomainError("cdf_points: at least two points are required");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        out.emplace_back(percentile(samples, 100.0 * f), f);
    }
    return out;
}

double file_throughput(const traffic::FileTransferRecord& r)
{
    const double dt = r.t_rx_finish_s - r.t_tx_start_s;
    if (!(dt > 0.0)) {
        throw DataError("file_throughput: non-positive transfer interval");
    }
    return static_cast<double>(r.s_bits) / dt;
}

double beam_spectral_efficiency(double phy_bits, double measurement_s, double bandwidth_hz)
{
    if (!(measurement_s > 0.0) || !(bandwidth_hz > 0.0)) {
        throw DomainError("beam_spectral_efficiency: duration and bandwidth must be positive");
    }
    return phy_bits / (measurement_s * bandwidth_hz);
}

double gain_pct(double a, double b)
{
    if (!(b > 0.0)) {
        throw DomainError("gain_pct: reference metric must be positive");
    }
    return 100.0 * (a - b) / b;
}

std::vector<UserSample> user_samples(std::span<const engine::DropResult> drops)
{
    std::vector<UserSample> out;
    for (const auto& d : drops) {
        for (const auto& u : d.users) {
            if (u.sinr_samples_db.empty()) {
                continue;
            }
            UserSample s;
            s.drop_index = d.drop_index;
            s.terminal_id = u.terminal_id;
            s.sinr_samples = u.sinr_samples_db;
            s.mean_sinr_db = std::accumulate(s.sinr_samples.begin(), s.sinr_samples.end(), 0.0) /
                             static_cast<double>(s.sinr_samples.size());
            s.delivered_bits = u.delivered_bits;
            s.active_time_s = d.beam.measurement_s;
            out.push_back(std::move(s));
        }
    }
    std::sort(out.begin(), out.end(), [](const UserSample& a, const UserSample& b) {
        return a.drop_index != b.drop_index ? a.drop_index < b.drop_index : a.terminal_id < b.terminal_id;
    });
    return out;
}

StatReport build_report(std::span<const UserSample> users, std::span<const traffic::FileTransferRecord> files,
                        std::span<const engine::BeamCounters> beams, Stack stack, Direction direction,
                        const ReportOptions& options)
{
    if (users.empty()) {
        throw DataError("build_report: no central-beam user samples");
    }
    StatReport r;
    r.stack = stack;
    r.direction = direction;
    r.sub_scenario = options.sub_scenario;
    r.technology = std::string(technology_name(stack, direction));
    r.users = users.size();
    r.files = files.size();

    std::vector<double> sinr;
    std::vector<double> tput_kbps;
    for (const auto& u : users) {
        sinr.push_back(u.mean_sinr_db);
        if (!options.per_file_throughput) {
            tput_kbps.push_back(static_cast<double>(u.delivered_bits) / u.active_time_s / 1e3);
        }
    }
    if (options.per_file_throughput) {
        for (const auto& f : files) {
            tput_kbps.push_back(file_throughput(f) / 1e3);
        }
        if (tput_kbps.empty()) {
            throw DataError("build_report: no completed file transfer in the measurement window");
        }
    }
    r.sinr_db = summarize(sinr);
    r.user_tput_kbps = summarize(tput_kbps);
    r.sinr_cdf = cdf_points(sinr, options.cdf_points);
    r.tput_cdf = cdf_points(tput_kbps, options.cdf_points);

    double phy = 0.0;
    double payload = 0.0;
    double time = 0.0;
    for (const auto& b : beams) {
        phy += static_cast<double>(b.phy_bits);
        payload += static_cast<double>(b.payload_bits);
        time += b.measurement_s;
    }
    if (time > 0.0) {
        r.beam_phy_se_200mhz = beam_spectral_efficiency(phy, time, options.beam_bandwidth_hz);
        r.beam_phy_se_400mhz = r.beam_phy_se_200mhz / 2.0;
        r.beam_tput_mbps = payload / time / 1e6;
    }
    return r;
}

StatReport build_report(const ScenarioConfig& cfg, std::span<const engine::DropResult> drops)
{
    if (drops.empty()) {
        throw DataError("build_report: no drops");
    }
    const auto users = user_samples(drops);
    std::vector<traffic::FileTransferRecord> files;
    std::vector<engine::BeamCounters> beams;
    for (const auto& d : drops) {
        files.insert(files.end(), d.files.begin(), d.files.end());
        beams.push_back(d.beam);
    }
    ReportOptions o;
    o.per_file_throughput = cfg.traffic.kind == traffic::TrafficKind::ftp3;
    o.beam_bandwidth_hz = cfg.carriers.beam_bandwidth_hz();
    o.cdf_points = cfg.output.cdf_points;
    o.sub_scenario = std::string(to_string(cfg.sub_scenario));
    return build_report(users, files, beams, drops.front().stack, drops.front().direction, o);
}

void fill_gains(StatReport& a, StatReport& b)
{
    if (a.user_tput_kbps.mean > 0.0 && b.user_tput_kbps.mean > 0.0) {
        a.avg_tput_gain_pct = gain_pct(a.user_tput_kbps.mean, b.user_tput_kbps.mean);
        b.avg_tput_gain_pct = gain_pct(b.user_tput_kbps.mean, a.user_tput_kbps.mean);
    }
    if (a.beam_tput_mbps > 0.0 && b.beam_tput_mbps > 0.0) {
        a.beam_tput_gain_pct = gain_pct(a.beam_tput_mbps, b.beam_tput_mbps);
        b.beam_tput_gain_pct = gain_pct(b.beam_tput_mbps, a.beam_tput_mbps);
    }
}

const std::vector<std::string>& report_columns()
{
    static const std::vector<std::string> cols = {
        "link_direction",     "sub_scenario",       "technology",         "sinr_p5_dB",
        "sinr_p50_dB",        "sinr_p95_dB",        "sinr_avg_dB",        "user_tput_p5_kbps",
        "user_tput_p50_kbps", "user_tput_p95_kbps", "user_tput_avg_kbps", "avg_tput_gain_pct",
        "beam_phy_se_400MHz_bps_per_Hz", "beam_phy_se_200MHz_bps_per_Hz", "beam_tput_Mbps", "beam_tput_gain_pct"};
    return cols;
}

namespace {

std::string fmt(double v, int decimals)
{
    if (!std::isfinite(v)) {
        return "";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v, 1) : std::string(); }

} // namespace

void write_report_csv(std::ostream& out, std::span<const StatReport> rows)
{
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
    for (const auto& r : rows) {
        out << (r.direction == Direction::dl ? "DL" : "UL") << ',' << r.sub_scenario << ',' << r.technology << ','
            << fmt(r.sinr_db.p5, 2) << ',' << fmt(r.sinr_db.p50, 2) << ',' << fmt(r.sinr_db.p95, 2) << ','
            << fmt(r.sinr_db.mean, 2) << ',' << fmt(r.user_tput_kbps.p5, 1) << ',' << fmt(r.user_tput_kbps.p50, 1)
            << ',' << fmt(r.user_tput_kbps.p95, 1) << ',' << fmt(r.user_tput_kbps.mean, 1) << ','
            << fmt(r.avg_tput_gain_pct) << ',' << fmt(r.beam_phy_se_400mhz, 4) << ',' << fmt(r.beam_phy_se_200mhz, 4)
            << ',' << fmt(r.beam_tput_mbps, 2) << ',' << fmt(r.beam_tput_gain_pct) << '\n';
    }
}

void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf, const std::string& value_name)
{
    out << value_name << ",fraction\n";
    for (const auto& [v, f] : cdf) {
        out << fmt(v, 6) << ',' << fmt(f, 6) << '\n';
    }
}

void write_event_log(std::ostream& out, std::span<const engine::BlockLogEntry> log)
{
    out << "time_s,beam,terminal,direction,scheme,sinr_dB,bits,success\n";
    for (const auto& e : log) {
        out << fmt(e.time_s, 9) << ',' << e.beam << ',' << e.terminal << ',' << to_string(e.direction) << ','
            << e.scheme_id << ',' << fmt(e.sinr_db, 4) << ',' << e.bits << ',' << (e.success ? 1 : 0) << '\n';
    }
}

} // namespace satsim::stats
