#pragma once

#include "satsim/common.hpp"
#include "satsim/geometry.hpp"
#include "satsim/linkbudget.hpp"
#include "satsim/mac.hpp"
#include "satsim/phy.hpp"
#include "satsim/traffic.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace satsim {

enum class LinkBudgetSet { set1, set2 };
enum class SubScenario { full_load, full_load_diversity, limited_load, custom };
enum class DirectionSelection { dl, ul, both };

std::string_view to_string(LinkBudgetSet s);
std::string_view to_string(SubScenario s);
std::string_view to_string(DirectionSelection d);
LinkBudgetSet parse_link_budget_set(std::string_view text);
SubScenario parse_sub_scenario(std::string_view text);
DirectionSelection parse_direction_selection(std::string_view text);
Stack parse_stack(std::string_view text);

inline constexpr double kRequired = std::numeric_limits<double>::quiet_NaN();

/// Satellite RF characteristics of one link-budget set. No built-in values:
/// every field must come from the scenario file.
struct SatelliteRf {
    double tx_eirp_density_dbw_per_mhz = kRequired;
    double g_over_t_db_per_k = kRequired;
    double tx_max_gain_dbi = kRequired;
    double rx_max_gain_dbi = kRequired;
    double half_power_beamwidth_deg = kRequired;
    double aperture_diameter_m = kRequired;
    double pattern_floor_db = -30.0;

    /// Receiver noise temperature implied by G/T.
    double rx_noise_temp_k() const { return db_to_linear(rx_max_gain_dbi - g_over_t_db_per_k); }
    bool operator==(const SatelliteRf& o) const;
};

struct GeometryConfig {
    geometry::OrbitConfig orbit;
    int tiers = 2;
    /// Co-colour boresight spacing; defaults to the single-colour spacing derived from the HPBW.
    std::optional<double> beam_spacing_deg;
    /// Placement cone radius; defaults to HPBW / 2 (the -3 dB footprint).
    std::optional<double> placement_radius_deg;
    int terminals_per_beam = 50;
    /// Terminal count of every non-central beam; -1 means terminals_per_beam.
    int interfering_terminals_per_beam = -1;
    std::vector<geometry::ProfileCount> terminal_mix;

    friend bool operator==(const GeometryConfig&, const GeometryConfig&) = default;
};

struct CarrierConfig {
    double dl_center_ghz = 20.0;
    double ul_center_ghz = 30.0;
    double beam_bandwidth_mhz = 200.0;

    double beam_bandwidth_hz() const { return beam_bandwidth_mhz * 1e6; }
    friend bool operator==(const CarrierConfig&, const CarrierConfig&) = default;
};

struct PaConfig {
    link::PaModel dl_dvb{5.0, 0.8, 18.6, {}};
    link::PaModel dl_nr{5.0, 0.8, 18.4, {}};
    /// Shared by both return-link stacks; OBO is max power minus transmit power.
    link::PaModel ul{0.0, 0.0, 30.0, {{0.0, 16.0}, {1.0, 18.0}, {2.0, 20.0}, {3.0, 22.0}, {5.0, 26.0}, {8.0, 32.0}, {12.0, 40.0}}};

    friend bool operator==(const PaConfig&, const PaConfig&) = default;
};

struct DvbConfig {
    phy::S2xFrameConfig s2x;
    phy::Rcs2FrameConfig rcs2;
    std::filesystem::path modcod_table;
    std::filesystem::path waveform_table;
    std::vector<phy::ModcodEntry> modcods;
    std::vector<phy::WaveformEntry> waveforms;

    friend bool operator==(const DvbConfig&, const DvbConfig&) = default;
};

struct NrConfig {
    phy::NrGridConfig grid;
    std::filesystem::path pdsch_table;
    std::filesystem::path pusch_table;
    std::vector<phy::ModcodEntry> pdsch;
    std::vector<phy::ModcodEntry> pusch;
    int ul_max_ues_per_slot = 8;

    friend bool operator==(const NrConfig&, const NrConfig&) = default;
};

struct MacConfig {
    mac::PfParams pf;
    mac::CqiConfig cqi;
    double dl_cqi_sample_interval_s = 0.01;
    double dl_error_target = 1e-5;
    double ul_error_target = 1e-3;
    double rcs2_esn0_target_db = 12.5;
    double nr_snr_target_db = 15.0;
    double nr_pc_percentile = 10.0;

    friend bool operator==(const MacConfig&, const MacConfig&) = default;
};

struct DropsConfig {
    int count = 5;
    double measurement_s = 5.0;
    double warmup_s = 1.0;
    std::uint64_t master_seed = 1;
    int threads = 1;

    friend bool operator==(const DropsConfig&, const DropsConfig&) = default;
};

struct OutputConfig {
    bool event_log = false;
    int cdf_points = 200;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
    int schema_version = 1;
    std::string name;
    LinkBudgetSet link_budget_set = LinkBudgetSet::set1;
    SubScenario sub_scenario = SubScenario::custom;
    Stack stack = Stack::dvb;
    DirectionSelection direction = DirectionSelection::dl;
    GeometryConfig geometry;
    SatelliteRf satellite;
    CarrierConfig carriers;
    link::AttenuationConfig attenuation;
    PaConfig pa;
    DvbConfig dvb;
    NrConfig nr;
    MacConfig mac;
    traffic::TrafficConfig traffic;
    DropsConfig drops;
    OutputConfig output;

    double beam_spacing_deg() const;
    double placement_radius_deg() const;
    /// Checks every invariant, including the sub-scenario preset rules.
    /// Tables must already be loaded.
    void validate() const;
    /// Reads the four scheme tables from their paths.
    void load_tables();

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Co-colour spacing for a four-colour reuse plan: twice the adjacent-beam
/// spacing HPBW * sqrt(3) / 2.
double default_cochannel_spacing_deg(double half_power_beamwidth_deg);

/// Satellite antenna pattern for one link direction.
link::AntennaPattern satellite_pattern(const ScenarioConfig& cfg, Direction d);

} // namespace satsim
