#pragma once

#include "satsim/config.hpp"
#include "satsim/scenario.hpp"

#include <filesystem>
#include <string>

namespace satsim::testing {

inline std::filesystem::path config_path(const std::string& name)
{
    return std::filesystem::path(SATSIM_CONFIG_DIR) / name;
}

inline std::filesystem::path data_path(const std::string& name)
{
    return std::filesystem::path(SATSIM_DATA_DIR) / name;
}

inline ScenarioConfig preset(const std::string& name) { return config::load_config(config_path(name)); }

/// Shortens a preset to a desk-scale single drop.
inline ScenarioConfig short_run(ScenarioConfig cfg, double warmup_s, double measurement_s)
{
    cfg.drops.count = 1;
    cfg.drops.warmup_s = warmup_s;
    cfg.drops.measurement_s = measurement_s;
    return cfg;
}

/// One default terminal on the central boresight, one tier of empty,
/// silent beams, no weather: the isolated-link scene.
inline ScenarioConfig isolated_link()
{
    ScenarioConfig cfg = preset("set1_full_load_dl.json");
    cfg.sub_scenario = SubScenario::custom;
    cfg.geometry.tiers = 1;
    cfg.geometry.terminals_per_beam = 1;
    cfg.geometry.interfering_terminals_per_beam = 0;
    cfg.geometry.terminal_mix = {{geometry::builtin_profile(geometry::ProfileName::vsat_default), 1}};
    cfg.geometry.placement_radius_deg = 0.0;
    cfg.attenuation.kind = link::AttenuationKind::none;
    cfg.dvb.s2x.dummy_frames_enabled = false;
    cfg.drops.count = 1;
    return cfg;
}

} // namespace satsim::testing
