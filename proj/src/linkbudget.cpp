#include "satsim/linkbudget.hpp"

#include <algorithm>
#include <cmath>

namespace satsim::link {

double fspl_db(double distance_km, double freq_ghz)
{
    if (!(distance_km > 0.0) || !(freq_ghz > 0.0)) {
        throw DomainError("fspl_db requires positive distance and frequency");
    }
    return 92.45 + 20.0 * std::log10(distance_km) + 20.0 * std::log10(freq_ghz);
}

double AntennaPattern::ka() const
{
    const double wavelength_m = kSpeedOfLight / (freq_ghz * 1e9);
    return kPi * aperture_diameter_m / wavelength_m;
}

double AntennaPattern::relative_gain_db(double off_axis_deg) const
{
    if (off_axis_deg < 0.0) {
        throw DomainError("off-axis angle must be non-negative");
    }
    const double x = ka() * std::sin(deg_to_rad(off_axis_deg));
    double rel = 1.0;
    if (std::abs(x) > 1e-12) {
        const double j = std::cyl_bessel_j(1.0, std::abs(x)) / std::abs(x);
        rel = 4.0 * j * j;
    }
    return std::max(linear_to_db(rel), floor_db);
}

double AntennaPattern::half_power_beamwidth_deg() const
{
    // relative gain in (0, first null) is strictly decreasing in x
    double lo = 1e-9;
    double hi = kBesselJ1FirstZero;
    auto rel = [](double x) {
        const double j = std::cyl_bessel_j(1.0, x) / x;
        return 4.0 * j * j;
    };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (rel(mid) > 0.5 ? lo : hi) = mid;
    }
    return 2.0 * rad_to_deg(std::asin(0.5 * (lo + hi) / ka()));
}

double antenna_gain_dbi(const AntennaPattern& pattern, double off_axis_deg)
{
    return pattern.gain_dbi(off_axis_deg);
}

double system_noise_temperature_k(double antenna_temp_k, double noise_figure_db)
{
    if (antenna_temp_k < 0.0 || noise_figure_db < 0.0) {
        throw DomainError("noise temperature inputs must be non-negative");
    }
    return antenna_temp_k + kReferenceTemperature * (db_to_linear(noise_figure_db) - 1.0);
}

double noise_power_dbw(double temp_k, double bandwidth_hz)
{
    if (!(temp_k > 0.0) || !(bandwidth_hz > 0.0)) {
        throw DomainError("noise_power_dbw requires positive temperature and bandwidth");
    }
    return 10.0 * std::log10(kBoltzmann * temp_k * bandwidth_hz);
}

SinrBreakdown combine_sinr(double c_over_n_db, double c_over_i_db, double c_over_im_db)
{
    auto inverse = [](double db) { return std::isinf(db) && db > 0.0 ? 0.0 : 1.0 / db_to_linear(db); };
    const double inv = inverse(c_over_n_db) + inverse(c_over_i_db) + inverse(c_over_im_db);
    SinrBreakdown out;
    out.c_over_n_db = c_over_n_db;
    out.c_over_i_db = c_over_i_db;
    out.c_over_im_db = c_over_im_db;
    out.sinr_db = inv == 0.0 ? kInf : -10.0 * std::log10(inv);
    return out;
}

double Band::overlap_hz(const Band& other) const
{
    return std::max(0.0, std::min(high(), other.high()) - std::max(low(), other.low()));
}

void CarrierPlan::validate() const
{
    const double half = beam_bandwidth_mhz / 2.0;
    constexpr double tol = 1e-9;
    std::vector<std::pair<double, double>> spans;
    for (const auto& [offset, bw] : sub_carriers) {
        if (!(bw > 0.0)) {
            throw ConfigError("carrier plan: sub-carrier bandwidth must be positive");
        }
        const double lo = offset - bw / 2.0;
        const double hi = offset + bw / 2.0;
        if (lo < -half - tol || hi > half + tol) {
            throw ConfigError("carrier plan: sub-carrier exceeds the beam bandwidth");
        }
        spans.emplace_back(lo, hi);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second - tol) {
            throw ConfigError("carrier plan: sub-carriers overlap");
        }
    }
}

Band CarrierPlan::sub_carrier_band(std::size_t index) const
{
    const auto& [offset, bw] = sub_carriers.at(index);
    return {center_freq_ghz * 1e9 + offset * 1e6, bw * 1e6};
}

CarrierPlan uniform_carrier_plan(Direction direction, double center_freq_ghz, double beam_bandwidth_mhz,
                                 int count)
{
    if (count < 1) {
        throw ConfigError("carrier plan needs at least one carrier");
    }
    CarrierPlan plan{direction, center_freq_ghz, beam_bandwidth_mhz, {}};
    const double bw = beam_bandwidth_mhz / count;
    for (int c = 0; c < count; ++c) {
        plan.sub_carriers.emplace_back(-beam_bandwidth_mhz / 2.0 + (c + 0.5) * bw, bw);
    }
    return plan;
}

double cochannel_interference_dbw(int victim_color, const Band& victim,
                                  std::span<const ActiveTransmission> interferers)
{
    double total_w = 0.0;
    for (const auto& tx : interferers) {
        if (tx.color != victim_color || !(tx.band.width_hz > 0.0)) {
            continue;
        }
        const double fraction = victim.overlap_hz(tx.band) / tx.band.width_hz;
        total_w += fraction * db_to_linear(tx.rx_power_dbw);
    }
    return linear_to_db(total_w);
}

void PaModel::validate() const
{
    if (!(c_over_im_db > 0.0)) {
        throw ConfigError("pa: c_over_im_dB must be positive");
    }
    for (std::size_t i = 0; i < ul_obo_cim_table.size(); ++i) {
        if (!(ul_obo_cim_table[i].second > 0.0)) {
            throw ConfigError("pa: ul_obo_cim_table C/Im values must be positive");
        }
        if (i > 0 && !(ul_obo_cim_table[i].first > ul_obo_cim_table[i - 1].first)) {
            throw ConfigError("pa: ul_obo_cim_table must be sorted by OBO");
        }
    }
}

double PaModel::c_over_im_at_obo(double obo) const
{
    const auto& t = ul_obo_cim_table;
    if (t.empty()) {
        return c_over_im_db;
    }
    if (obo <= t.front().first) {
        return t.front().second;
    }
    if (obo >= t.back().first) {
        return t.back().second;
    }
    const auto hi = std::upper_bound(t.begin(), t.end(), obo,
                                     [](double v, const std::pair<double, double>& e) { return v < e.first; });
    const auto lo = hi - 1;
    const double w = (obo - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

LinkBudgetResult evaluate_link(const LinkBudgetInputs& in)
{
    LinkBudgetResult out;
    out.rx_power_dbw = in.eirp_dbw - fspl_db(in.distance_km, in.freq_ghz) - in.attenuation_db + in.rx_gain_dbi;
    out.noise_dbw = noise_power_dbw(in.noise_temp_k, in.bandwidth_hz);
    out.sinr = combine_sinr(out.rx_power_dbw - out.noise_dbw, in.c_over_i_db, in.c_over_im_db);
    return out;
}

void AttenuationConfig::validate() const
{
    if (!(std_db >= 0.0)) {
        throw ConfigError("attenuation.std_dB must be non-negative");
    }
    if (kind == AttenuationKind::correlated_lognormal) {
        if (!(decorrelation_time_s > 0.0) || !(spatial_correlation_km > 0.0) || !(time_step_s > 0.0)) {
            throw ConfigError("attenuation: correlation scales and time step must be positive");
        }
        if (components < 1) {
            throw ConfigError("attenuation.components must be at least 1");
        }
    }
}

AttenuationProcess::AttenuationProcess(const AttenuationConfig& config, std::uint64_t seed)
    : config_(config), innovations_(stream_seed(seed, "attenuation-innovations"))
{
    config_.validate();
    if (config_.kind == AttenuationKind::none || config_.std_db == 0.0) {
        return;
    }
    RngStream spectral(stream_seed(seed, "attenuation-spectrum"));
    wave_vectors_.reserve(static_cast<std::size_t>(config_.components));
    for (int m = 0; m < config_.components; ++m) {
        const geometry::Vec3 z{spectral.normal(), spectral.normal(), spectral.normal()};
        double w = std::abs(spectral.normal());
        w = std::max(w, 1e-12);
        wave_vectors_.push_back((1.0 / (config_.spatial_correlation_km * w)) * z);
    }
    std::vector<double> first(2 * wave_vectors_.size());
    for (double& a : first) {
        a = innovations_.normal();
    }
    amplitudes_.push_back(std::move(first));
}

std::int64_t AttenuationProcess::time_index(double t) const
{
    if (t <= 0.0) {
        return 0;
    }
    return static_cast<std::int64_t>(std::floor(t / config_.time_step_s));
}

void AttenuationProcess::extend_to(std::int64_t index) const
{
    const double rho = std::exp(-config_.time_step_s / config_.decorrelation_time_s);
    const double innovation_scale = std::sqrt(1.0 - rho * rho);
    while (static_cast<std::int64_t>(amplitudes_.size()) <= index) {
        const auto& prev = amplitudes_.back();
        std::vector<double> next(prev.size());
        for (std::size_t i = 0; i < prev.size(); ++i) {
            next[i] = rho * prev[i] + innovation_scale * innovations_.normal();
        }
        amplitudes_.push_back(std::move(next));
    }
}

double AttenuationProcess::sample_db(geometry::Vec3 position_km, double t) const
{
    if (wave_vectors_.empty()) {
        return 0.0;
    }
    const std::int64_t k = time_index(t);
    extend_to(k);
    const auto& amp = amplitudes_[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (std::size_t m = 0; m < wave_vectors_.size(); ++m) {
        const double phase = geometry::dot(wave_vectors_[m], position_km);
        sum += amp[2 * m] * std::cos(phase) + amp[2 * m + 1] * std::sin(phase);
    }
    return config_.std_db * sum / std::sqrt(static_cast<double>(wave_vectors_.size()));
}

} // namespace satsim::link
