#include "satsim/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace satsim::config {

namespace {

using Json = nlohmann::ordered_json;

std::string_view to_string(link::AttenuationKind k)
{
    return k == link::AttenuationKind::none ? "none" : "correlated_lognormal";
}

link::AttenuationKind parse_attenuation_kind(std::string_view text)
{
    if (text == "none") {
        return link::AttenuationKind::none;
    }
    if (text == "correlated_lognormal") {
        return link::AttenuationKind::correlated_lognormal;
    }
    throw ConfigError("unknown attenuation kind '" + std::string(text) + "' (expected none or correlated_lognormal)");
}

/// One JSON object being read. Tracks consumed keys so leftovers can be
/// reported as unknown with their full path.
class Obj {
public:
    Obj(const Json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError(where() + ": expected an object");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    Obj sub(const char* key)
    {
        used_.insert(key);
        return Obj(j_.at(key), join(key));
    }

    const Json* raw(const char* key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void num(const char* key, double& v)
    {
        if (const Json* x = raw(key)) {
            if (x->is_null() || (x->is_string() && x->get<std::string>() == "REQUIRED")) {
                v = kRequired;
            } else if (x->is_number()) {
                v = x->get<double>();
            } else {
                throw ConfigError(join(key) + ": expected a number");
            }
        }
    }

    template <class Int>
    void integer(const char* key, Int& v)
    {
        if (const Json* x = raw(key)) {
            if (!x->is_number_integer()) {
                throw ConfigError(join(key) + ": expected an integer");
            }
            v = x->get<Int>();
        }
    }

    void boolean(const char* key, bool& v)
    {
        if (const Json* x = raw(key)) {
            if (!x->is_boolean()) {
                throw ConfigError(join(key) + ": expected true or false");
            }
            v = x->get<bool>();
        }
    }

    void text(const char* key, std::string& v)
    {
        if (const Json* x = raw(key)) {
            if (!x->is_string()) {
                throw ConfigError(join(key) + ": expected a string");
            }
            v = x->get<std::string>();
        }
    }

    template <class E, class Parse>
    void enumeration(const char* key, E& v, Parse parse)
    {
        std::string s;
        if (has(key)) {
            text(key, s);
            try {
                v = parse(s);
            } catch (const ConfigError& e) {
                throw ConfigError(join(key) + ": " + e.what());
            }
        } else {
            used_.insert(key);
        }
    }

    void optional_num(const char* key, std::optional<double>& v)
    {
        if (const Json* x = raw(key)) {
            if (x->is_null()) {
                v.reset();
            } else if (x->is_number()) {
                v = x->get<double>();
            } else {
                throw ConfigError(join(key) + ": expected a number or null");
            }
        }
    }

    void path(const char* key, std::filesystem::path& v, const std::filesystem::path& base)
    {
        std::string s;
        if (!has(key)) {
            used_.insert(key);
            return;
        }
        text(key, s);
        std::filesystem::path p(s);
        if (p.is_relative() && !base.empty()) {
            p = base / p;
        }
        v = p.lexically_normal();
    }

    std::string join(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }
    std::string where() const { return path_.empty() ? std::string("<root>") : path_; }

    void done() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError(join(it.key().c_str()) + ": unknown key");
            }
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void read_pa(Obj o, link::PaModel& pa)
{
    o.num("ibo_db", pa.ibo_db);
    o.num("obo_db", pa.obo_db);
    o.num("c_over_im_db", pa.c_over_im_db);
    if (const Json* t = o.raw("obo_cim_table")) {
        if (!t->is_array()) {
            throw ConfigError(o.join("obo_cim_table") + ": expected an array of [obo_dB, c_over_im_dB] pairs");
        }
        pa.ul_obo_cim_table.clear();
        for (const auto& row : *t) {
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
                throw ConfigError(o.join("obo_cim_table") + ": expected [obo_dB, c_over_im_dB] pairs");
            }
            pa.ul_obo_cim_table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    }
    o.done();
}

void read_profile(Obj o, geometry::ProfileCount& pc)
{
    geometry::ProfileName name = geometry::ProfileName::vsat_default;
    o.enumeration("profile", name, geometry::parse_profile_name);
    pc.profile = geometry::builtin_profile(name);
    o.integer("count", pc.count);
    o.num("rx_gain_dbi", pc.profile.rx_gain_dbi);
    o.num("tx_gain_dbi", pc.profile.tx_gain_dbi);
    o.num("tx_power_dbm", pc.profile.tx_power_dbm);
    o.num("antenna_temp_k", pc.profile.antenna_temp_k);
    o.num("noise_figure_db", pc.profile.noise_figure_db);
    o.num("aperture_diameter_m", pc.profile.aperture_diameter_m);
    o.done();
}

void read_geometry(Obj o, GeometryConfig& g)
{
    if (o.has("orbit")) {
        Obj orbit = o.sub("orbit");
        orbit.num("altitude_km", g.orbit.altitude_km);
        orbit.num("earth_radius_km", g.orbit.earth_radius_km);
        orbit.num("central_beam_elevation_deg", g.orbit.central_beam_elevation_deg);
        orbit.num("satellite_lon_deg", g.orbit.satellite_lon_deg);
        orbit.done();
    }
    o.integer("tiers", g.tiers);
    o.optional_num("beam_spacing_deg", g.beam_spacing_deg);
    o.optional_num("placement_radius_deg", g.placement_radius_deg);
    o.integer("terminals_per_beam", g.terminals_per_beam);
    o.integer("interfering_terminals_per_beam", g.interfering_terminals_per_beam);
    if (const Json* mix = o.raw("terminal_mix")) {
        if (!mix->is_array()) {
            throw ConfigError(o.join("terminal_mix") + ": expected an array");
        }
        g.terminal_mix.clear();
        for (std::size_t i = 0; i < mix->size(); ++i) {
            geometry::ProfileCount pc;
            read_profile(Obj((*mix)[i], o.join("terminal_mix") + "[" + std::to_string(i) + "]"), pc);
            g.terminal_mix.push_back(pc);
        }
    }
    o.done();
}

void read_root(Obj o, ScenarioConfig& c, const std::filesystem::path& base)
{
    o.integer("schema_version", c.schema_version);
    if (c.schema_version != 1) {
        throw ConfigError("schema_version: unsupported version " + std::to_string(c.schema_version));
    }
    o.text("name", c.name);
    o.enumeration("link_budget_set", c.link_budget_set, parse_link_budget_set);
    o.enumeration("sub_scenario", c.sub_scenario, parse_sub_scenario);
    o.enumeration("stack", c.stack, parse_stack);
    o.enumeration("direction", c.direction, parse_direction_selection);

    if (o.has("geometry")) {
        read_geometry(o.sub("geometry"), c.geometry);
    }
    if (o.has("satellite")) {
        Obj s = o.sub("satellite");
        s.num("tx_eirp_density_dbw_per_mhz", c.satellite.tx_eirp_density_dbw_per_mhz);
        s.num("g_over_t_db_per_k", c.satellite.g_over_t_db_per_k);
        s.num("tx_max_gain_dbi", c.satellite.tx_max_gain_dbi);
        s.num("rx_max_gain_dbi", c.satellite.rx_max_gain_dbi);
        s.num("half_power_beamwidth_deg", c.satellite.half_power_beamwidth_deg);
        s.num("aperture_diameter_m", c.satellite.aperture_diameter_m);
        s.num("pattern_floor_db", c.satellite.pattern_floor_db);
        s.done();
    }
    if (o.has("carriers")) {
        Obj s = o.sub("carriers");
        s.num("dl_center_ghz", c.carriers.dl_center_ghz);
        s.num("ul_center_ghz", c.carriers.ul_center_ghz);
        s.num("beam_bandwidth_mhz", c.carriers.beam_bandwidth_mhz);
        s.done();
    }
    if (o.has("attenuation")) {
        Obj s = o.sub("attenuation");
        s.enumeration("kind", c.attenuation.kind, parse_attenuation_kind);
        s.num("std_db", c.attenuation.std_db);
        s.num("decorrelation_time_s", c.attenuation.decorrelation_time_s);
        s.num("spatial_correlation_km", c.attenuation.spatial_correlation_km);
        s.integer("components", c.attenuation.components);
        s.num("time_step_s", c.attenuation.time_step_s);
        s.done();
    }
    if (o.has("pa")) {
        Obj s = o.sub("pa");
        if (s.has("dl_dvb")) {
            read_pa(s.sub("dl_dvb"), c.pa.dl_dvb);
        }
        if (s.has("dl_nr")) {
            read_pa(s.sub("dl_nr"), c.pa.dl_nr);
        }
        if (s.has("ul")) {
            read_pa(s.sub("ul"), c.pa.ul);
        }
        s.done();
    }
    if (o.has("dvb")) {
        Obj s = o.sub("dvb");
        if (s.has("s2x")) {
            Obj x = s.sub("s2x");
            auto& f = c.dvb.s2x;
            x.integer("fecframe_bits", f.fecframe_bits);
            x.num("rolloff", f.rolloff);
            x.num("carrier_spacing_factor", f.carrier_spacing_factor);
            x.integer("pl_header_symbols", f.pl_header_symbols);
            x.boolean("pilots_enabled", f.pilots_enabled);
            x.integer("slot_symbols", f.slot_symbols);
            x.integer("pilot_block_symbols", f.pilot_block_symbols);
            x.integer("pilot_period_slots", f.pilot_period_slots);
            x.integer("bbframe_header_bits", f.bbframe_header_bits);
            x.boolean("dummy_frames_enabled", f.dummy_frames_enabled);
            x.integer("dummy_frame_symbols", f.dummy_frame_symbols);
            x.done();
        }
        if (s.has("rcs2")) {
            Obj x = s.sub("rcs2");
            auto& f = c.dvb.rcs2;
            x.enumeration("carriers", f.carriers, phy::parse_rcs2_carrier_set);
            x.num("superframe_duration_ms", f.superframe_duration_ms);
            x.num("rolloff", f.rolloff);
            x.num("carrier_spacing_factor", f.carrier_spacing_factor);
            x.num("beam_bandwidth_mhz", f.beam_bandwidth_mhz);
            x.done();
        }
        s.path("modcod_table", c.dvb.modcod_table, base);
        s.path("waveform_table", c.dvb.waveform_table, base);
        s.done();
    }
    if (o.has("nr")) {
        Obj s = o.sub("nr");
        if (s.has("grid")) {
            Obj x = s.sub("grid");
            auto& g = c.nr.grid;
            x.integer("numerology", g.numerology);
            x.integer("prb_count", g.prb_count);
            x.integer("symbols_per_slot", g.symbols_per_slot);
            x.integer("dmrs_symbols_per_slot", g.dmrs_symbols_per_slot);
            x.num("ptrs_fraction", g.ptrs_fraction);
            x.integer("tb_crc_bits", g.tb_crc_bits);
            x.integer("rbg_size_prbs", g.rbg_size_prbs);
            x.done();
        }
        s.path("pdsch_table", c.nr.pdsch_table, base);
        s.path("pusch_table", c.nr.pusch_table, base);
        s.integer("ul_max_ues_per_slot", c.nr.ul_max_ues_per_slot);
        s.done();
    }
    if (o.has("mac")) {
        Obj s = o.sub("mac");
        if (s.has("pf")) {
            Obj x = s.sub("pf");
            x.num("alpha", c.mac.pf.alpha);
            x.num("beta", c.mac.pf.beta);
            x.num("time_constant_s", c.mac.pf.time_constant_s);
            x.done();
        }
        if (s.has("cqi")) {
            Obj x = s.sub("cqi");
            x.num("report_interval_s", c.mac.cqi.report_interval_s);
            x.num("window_s", c.mac.cqi.window_s);
            x.done();
        }
        s.num("dl_cqi_sample_interval_s", c.mac.dl_cqi_sample_interval_s);
        s.num("dl_error_target", c.mac.dl_error_target);
        s.num("ul_error_target", c.mac.ul_error_target);
        s.num("rcs2_esn0_target_db", c.mac.rcs2_esn0_target_db);
        s.num("nr_snr_target_db", c.mac.nr_snr_target_db);
        s.num("nr_pc_percentile", c.mac.nr_pc_percentile);
        s.done();
    }
    if (o.has("traffic")) {
        Obj s = o.sub("traffic");
        s.enumeration("kind", c.traffic.kind, traffic::parse_traffic_kind);
        if (s.has("ftp3")) {
            Obj x = s.sub("ftp3");
            x.num("mean_iat_s", c.traffic.ftp3.mean_iat_s);
            x.num("iat_upper_bound_s", c.traffic.ftp3.iat_upper_bound_s);
            x.integer("dl_file_bytes", c.traffic.ftp3.dl_file_bytes);
            x.integer("ul_file_bytes", c.traffic.ftp3.ul_file_bytes);
            x.done();
        }
        s.done();
    }
    if (o.has("drops")) {
        Obj s = o.sub("drops");
        s.integer("count", c.drops.count);
        s.num("measurement_s", c.drops.measurement_s);
        s.num("warmup_s", c.drops.warmup_s);
        s.integer("master_seed", c.drops.master_seed);
        s.integer("threads", c.drops.threads);
        s.done();
    }
    if (o.has("output")) {
        Obj s = o.sub("output");
        s.boolean("event_log", c.output.event_log);
        s.integer("cdf_points", c.output.cdf_points);
        s.done();
    }
    o.done();
}

Json num_or_required(double v) { return std::isnan(v) ? Json("REQUIRED") : Json(v); }

Json write_pa(const link::PaModel& pa)
{
    Json t = Json::array();
    for (const auto& [obo, cim] : pa.ul_obo_cim_table) {
        t.push_back(Json::array({obo, cim}));
    }
    return {{"ibo_db", pa.ibo_db}, {"obo_db", pa.obo_db}, {"c_over_im_db", pa.c_over_im_db}, {"obo_cim_table", t}};
}

Json to_json(const ScenarioConfig& c)
{
    const auto& g = c.geometry;
    Json mix = Json::array();
    for (const auto& pc : g.terminal_mix) {
        const auto& p = pc.profile;
        mix.push_back({{"profile", geometry::to_string(p.name)},
                       {"count", pc.count},
                       {"rx_gain_dbi", p.rx_gain_dbi},
                       {"tx_gain_dbi", p.tx_gain_dbi},
                       {"tx_power_dbm", p.tx_power_dbm},
                       {"antenna_temp_k", p.antenna_temp_k},
                       {"noise_figure_db", p.noise_figure_db},
                       {"aperture_diameter_m", p.aperture_diameter_m}});
    }
    const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    const auto& s2x = c.dvb.s2x;
    const auto& rcs2 = c.dvb.rcs2;
    const auto& grid = c.nr.grid;
    Json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["link_budget_set"] = to_string(c.link_budget_set);
    j["sub_scenario"] = to_string(c.sub_scenario);
    j["stack"] = satsim::to_string(c.stack);
    j["direction"] = to_string(c.direction);
    j["geometry"] = {{"orbit",
                      {{"altitude_km", g.orbit.altitude_km},
                       {"earth_radius_km", g.orbit.earth_radius_km},
                       {"central_beam_elevation_deg", g.orbit.central_beam_elevation_deg},
                       {"satellite_lon_deg", g.orbit.satellite_lon_deg}}},
                     {"tiers", g.tiers},
                     {"beam_spacing_deg", opt(g.beam_spacing_deg)},
                     {"placement_radius_deg", opt(g.placement_radius_deg)},
                     {"terminals_per_beam", g.terminals_per_beam},
                     {"interfering_terminals_per_beam", g.interfering_terminals_per_beam},
                     {"terminal_mix", mix}};
    j["satellite"] = {{"tx_eirp_density_dbw_per_mhz", num_or_required(c.satellite.tx_eirp_density_dbw_per_mhz)},
                      {"g_over_t_db_per_k", num_or_required(c.satellite.g_over_t_db_per_k)},
                      {"tx_max_gain_dbi", num_or_required(c.satellite.tx_max_gain_dbi)},
                      {"rx_max_gain_dbi", num_or_required(c.satellite.rx_max_gain_dbi)},
                      {"half_power_beamwidth_deg", num_or_required(c.satellite.half_power_beamwidth_deg)},
                      {"aperture_diameter_m", num_or_required(c.satellite.aperture_diameter_m)},
                      {"pattern_floor_db", c.satellite.pattern_floor_db}};
    j["carriers"] = {{"dl_center_ghz", c.carriers.dl_center_ghz},
                     {"ul_center_ghz", c.carriers.ul_center_ghz},
                     {"beam_bandwidth_mhz", c.carriers.beam_bandwidth_mhz}};
    j["attenuation"] = {{"kind", to_string(c.attenuation.kind)},
                        {"std_db", c.attenuation.std_db},
                        {"decorrelation_time_s", c.attenuation.decorrelation_time_s},
                        {"spatial_correlation_km", c.attenuation.spatial_correlation_km},
                        {"components", c.attenuation.components},
                        {"time_step_s", c.attenuation.time_step_s}};
    j["pa"] = {{"dl_dvb", write_pa(c.pa.dl_dvb)}, {"dl_nr", write_pa(c.pa.dl_nr)}, {"ul", write_pa(c.pa.ul)}};
    j["dvb"] = {{"s2x",
                 {{"fecframe_bits", s2x.fecframe_bits},
                  {"rolloff", s2x.rolloff},
                  {"carrier_spacing_factor", s2x.carrier_spacing_factor},
                  {"pl_header_symbols", s2x.pl_header_symbols},
                  {"pilots_enabled", s2x.pilots_enabled},
                  {"slot_symbols", s2x.slot_symbols},
                  {"pilot_block_symbols", s2x.pilot_block_symbols},
                  {"pilot_period_slots", s2x.pilot_period_slots},
                  {"bbframe_header_bits", s2x.bbframe_header_bits},
                  {"dummy_frames_enabled", s2x.dummy_frames_enabled},
                  {"dummy_frame_symbols", s2x.dummy_frame_symbols}}},
                {"rcs2",
                 {{"carriers", phy::to_string(rcs2.carriers)},
                  {"superframe_duration_ms", rcs2.superframe_duration_ms},
                  {"rolloff", rcs2.rolloff},
                  {"carrier_spacing_factor", rcs2.carrier_spacing_factor},
                  {"beam_bandwidth_mhz", rcs2.beam_bandwidth_mhz}}},
                {"modcod_table", c.dvb.modcod_table.string()},
                {"waveform_table", c.dvb.waveform_table.string()}};
    j["nr"] = {{"grid",
                {{"numerology", grid.numerology},
                 {"prb_count", grid.prb_count},
                 {"symbols_per_slot", grid.symbols_per_slot},
                 {"dmrs_symbols_per_slot", grid.dmrs_symbols_per_slot},
                 {"ptrs_fraction", grid.ptrs_fraction},
                 {"tb_crc_bits", grid.tb_crc_bits},
                 {"rbg_size_prbs", grid.rbg_size_prbs}}},
               {"pdsch_table", c.nr.pdsch_table.string()},
               {"pusch_table", c.nr.pusch_table.string()},
               {"ul_max_ues_per_slot", c.nr.ul_max_ues_per_slot}};
    j["mac"] = {{"pf", {{"alpha", c.mac.pf.alpha}, {"beta", c.mac.pf.beta}, {"time_constant_s", c.mac.pf.time_constant_s}}},
                {"cqi", {{"report_interval_s", c.mac.cqi.report_interval_s}, {"window_s", c.mac.cqi.window_s}}},
                {"dl_cqi_sample_interval_s", c.mac.dl_cqi_sample_interval_s},
                {"dl_error_target", c.mac.dl_error_target},
                {"ul_error_target", c.mac.ul_error_target},
                {"rcs2_esn0_target_db", c.mac.rcs2_esn0_target_db},
                {"nr_snr_target_db", c.mac.nr_snr_target_db},
                {"nr_pc_percentile", c.mac.nr_pc_percentile}};
    j["traffic"] = {{"kind", traffic::to_string(c.traffic.kind)},
                    {"ftp3",
                     {{"mean_iat_s", c.traffic.ftp3.mean_iat_s},
                      {"iat_upper_bound_s", c.traffic.ftp3.iat_upper_bound_s},
                      {"dl_file_bytes", c.traffic.ftp3.dl_file_bytes},
                      {"ul_file_bytes", c.traffic.ftp3.ul_file_bytes}}}};
    j["drops"] = {{"count", c.drops.count},
                  {"measurement_s", c.drops.measurement_s},
                  {"warmup_s", c.drops.warmup_s},
                  {"master_seed", c.drops.master_seed},
                  {"threads", c.drops.threads}};
    j["output"] = {{"event_log", c.output.event_log}, {"cdf_points", c.output.cdf_points}};
    return j;
}

} // namespace

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    Json j;
    try {
        j = Json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("malformed scenario document: ") + e.what());
    }
    ScenarioConfig c;
    try {
        read_root(Obj(j, ""), c, base_dir);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid scenario document: ") + e.what());
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    ScenarioConfig c;
    try {
        c = parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
        c.load_tables();
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return c;
}

std::string serialize_config(const ScenarioConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string required_template()
{
    ScenarioConfig c;
    c.name = "template";
    c.geometry.terminal_mix = {{geometry::builtin_profile(geometry::ProfileName::vsat_default), 50}};
    c.dvb.modcod_table = "../data/dvbs2x_modcods.tsv";
    c.dvb.waveform_table = "../data/rcs2_waveforms.tsv";
    c.nr.pdsch_table = "../data/nr_pdsch_mcs.tsv";
    c.nr.pusch_table = "../data/nr_pusch_mcs.tsv";
    return serialize_config(c);
}

} // namespace satsim::config
