#pragma once

#include "satsim/common.hpp"
#include "satsim/geometry.hpp"
#include "satsim/rng.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace satsim::link {

/// Free-space path loss: 92.45 + 20 log10(d[km]) + 20 log10(f[GHz]).
double fspl_db(double distance_km, double freq_ghz);

/// Circular-aperture (Bessel) pattern: relative gain 4 |J1(ka sin t) / (ka sin t)|^2,
/// clamped at `floor_db` below the peak.
struct AntennaPattern {
    double max_gain_dbi = 0.0;
    double aperture_diameter_m = 0.0;
    double freq_ghz = 0.0;
    double floor_db = -30.0;

    double ka() const;
    double relative_gain_db(double off_axis_deg) const;
    double gain_dbi(double off_axis_deg) const { return max_gain_dbi + relative_gain_db(off_axis_deg); }
    /// Full -3 dB beamwidth from a bisection on the pattern.
    double half_power_beamwidth_deg() const;
};

double antenna_gain_dbi(const AntennaPattern& pattern, double off_axis_deg);

/// First positive zero of J1, i.e. the first null of the aperture pattern.
inline constexpr double kBesselJ1FirstZero = 3.8317059702075125;

/// T = T_ant + 290 (10^(NF/10) - 1).
double system_noise_temperature_k(double antenna_temp_k, double noise_figure_db);

/// 10 log10(k T B).
double noise_power_dbw(double temp_k, double bandwidth_hz);

struct SinrBreakdown {
    double c_over_n_db = kInf;
    double c_over_i_db = kInf;
    double c_over_im_db = kInf;
    double sinr_db = kInf;
};

/// Harmonic combination in the linear domain; +inf marks an absent term.
SinrBreakdown combine_sinr(double c_over_n_db, double c_over_i_db, double c_over_im_db);

/// Linear-domain counterpart of combine_sinr used on the hot path.
inline double combine_sinr_linear(double cn, double ci, double cim)
{
    const double inv = 1.0 / cn + 1.0 / ci + 1.0 / cim;
    return inv > 0.0 ? 1.0 / inv : kInf;
}

struct Band {
    double center_hz = 0.0;
    double width_hz = 0.0;

    double low() const { return center_hz - width_hz / 2.0; }
    double high() const { return center_hz + width_hz / 2.0; }
    double overlap_hz(const Band& other) const;
};

struct CarrierPlan {
    Direction direction = Direction::dl;
    double center_freq_ghz = 20.0;
    double beam_bandwidth_mhz = 200.0;
    /// (center offset from the beam centre, bandwidth), both MHz.
    std::vector<std::pair<double, double>> sub_carriers;

    /// Sub-carriers must fit inside the beam band without overlapping.
    void validate() const;
    Band sub_carrier_band(std::size_t index) const;
};

/// Uniform split of the beam band into `count` adjacent sub-carriers.
CarrierPlan uniform_carrier_plan(Direction direction, double center_freq_ghz, double beam_bandwidth_mhz,
                                 int count);

struct ActiveTransmission {
    int color = 0;
    double rx_power_dbw = -kInf;  // total power of the transmission at the victim receiver
    Band band;
};

/// Sum of interferer powers weighted by the fraction of each interferer's band
/// falling inside the victim band. Other colours contribute nothing.
double cochannel_interference_dbw(int victim_color, const Band& victim,
                                  std::span<const ActiveTransmission> interferers);

struct PaModel {
    double ibo_db = 0.0;
    double obo_db = 0.0;
    double c_over_im_db = kInf;
    /// (OBO, C/Im) pairs, sorted by OBO, linearly interpolated and clamped at the ends.
    std::vector<std::pair<double, double>> ul_obo_cim_table;

    void validate() const;
    double c_over_im_at_obo(double obo_db) const;
    friend bool operator==(const PaModel&, const PaModel&) = default;
};

/// Closed-form received-power chain for one isolated link.
struct LinkBudgetInputs {
    double eirp_dbw = 0.0;
    double distance_km = 0.0;
    double freq_ghz = 0.0;
    double attenuation_db = 0.0;
    double rx_gain_dbi = 0.0;
    double noise_temp_k = 0.0;
    double bandwidth_hz = 0.0;
    double c_over_i_db = kInf;
    double c_over_im_db = kInf;
};

struct LinkBudgetResult {
    double rx_power_dbw = 0.0;
    double noise_dbw = 0.0;
    SinrBreakdown sinr;
};

LinkBudgetResult evaluate_link(const LinkBudgetInputs& in);

enum class AttenuationKind { none, correlated_lognormal };

struct AttenuationConfig {
    AttenuationKind kind = AttenuationKind::none;
    double std_db = 0.5;
    double decorrelation_time_s = 60.0;
    double spatial_correlation_km = 50.0;
    int components = 64;
    double time_step_s = 0.1;

    void validate() const;
    friend bool operator==(const AttenuationConfig&, const AttenuationConfig&) = default;
};

/// Gaussian-in-dB attenuation field A(x, t) with exponential temporal
/// correlation exp(-dt / T) and exponential spatial correlation exp(-d / L).
///
/// The field is a sum of random Fourier components whose wave vectors follow
/// a multivariate Cauchy law (whose characteristic function is exp(-|r| / L));
/// each component amplitude is an AR(1) process on a fixed time grid. The
/// marginal at any point is exactly N(0, std^2). Samples depend only on
/// (seed, position, time step), never on query order. Not thread-safe.
class AttenuationProcess {
public:
    AttenuationProcess() = default;
    AttenuationProcess(const AttenuationConfig& config, std::uint64_t seed);

    double sample_db(geometry::Vec3 position_km, double t) const;
    double sample_db(const geometry::Terminal& terminal, double t) const
    {
        return sample_db(terminal.position_ecef, t);
    }
    std::int64_t time_index(double t) const;
    const AttenuationConfig& config() const { return config_; }

private:
    void extend_to(std::int64_t index) const;

    AttenuationConfig config_;
    std::vector<geometry::Vec3> wave_vectors_;
    mutable std::vector<std::vector<double>> amplitudes_;  // [step][2 * components]
    mutable RngStream innovations_;
};

} // namespace satsim::link
