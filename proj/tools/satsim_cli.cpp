#include "satsim/config.hpp"
#include "satsim/engine.hpp"
#include "satsim/stats.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace satsim;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> drops;
    std::optional<int> tiers;
    std::optional<std::string> stack;
    std::optional<std::string> direction;
    std::string out_dir = "results";
};

ScenarioConfig prepare(const Options& o)
{
    ScenarioConfig cfg = config::load_config(o.config);
    if (o.seed) {
        cfg.drops.master_seed = *o.seed;
    }
    if (o.drops) {
        cfg.drops.count = *o.drops;
    }
    if (o.tiers) {
        cfg.geometry.tiers = *o.tiers;
    }
    if (o.stack) {
        cfg.stack = parse_stack(*o.stack);
    }
    if (o.direction) {
        cfg.direction = parse_direction_selection(*o.direction);
    }
    cfg.validate();
    return cfg;
}

std::vector<Direction> directions(const ScenarioConfig& cfg)
{
    switch (cfg.direction) {
    case DirectionSelection::dl: return {Direction::dl};
    case DirectionSelection::ul: return {Direction::ul};
    case DirectionSelection::both: return {Direction::dl, Direction::ul};
    }
    return {};
}

std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream f(p);
    if (!f) {
        throw Error("cannot write '" + p.string() + "'");
    }
    return f;
}

stats::StatReport run_one(const ScenarioConfig& cfg, Stack stack, Direction dir, const std::filesystem::path& out)
{
    engine::RunHooks hooks;
    hooks.event_log = cfg.output.event_log;
    const auto drops = engine::run_campaign(cfg, stack, dir, hooks);
    auto report = stats::build_report(cfg, drops);

    const std::string tag = std::string(to_string(dir)) + "_" + std::string(to_string(stack));
    auto sinr = open_out(out / ("cdf_" + tag + "_sinr.csv"));
    stats::write_cdf_csv(sinr, report.sinr_cdf, "sinr_dB");
    auto tput = open_out(out / ("cdf_" + tag + "_tput.csv"));
    stats::write_cdf_csv(tput, report.tput_cdf, "tput_kbps");
    if (cfg.output.event_log) {
        auto log = open_out(out / ("events_" + tag + ".csv"));
        for (const auto& d : drops) {
            stats::write_event_log(log, d.log);
        }
    }
    return report;
}

void emit(const std::vector<stats::StatReport>& rows, const std::filesystem::path& out)
{
    auto f = open_out(out / "report.csv");
    stats::write_report_csv(f, rows);
    stats::write_report_csv(std::cout, rows);
}

int do_run(const Options& o, bool compare)
{
    const ScenarioConfig cfg = prepare(o);
    const std::filesystem::path out(o.out_dir);
    std::filesystem::create_directories(out);
    std::vector<stats::StatReport> rows;
    for (Direction dir : directions(cfg)) {
        if (compare) {
            auto dvb = run_one(cfg, Stack::dvb, dir, out);
            auto nr = run_one(cfg, Stack::nr, dir, out);
            stats::fill_gains(dvb, nr);
            rows.push_back(std::move(dvb));
            rows.push_back(std::move(nr));
        } else {
            rows.push_back(run_one(cfg, cfg.stack, dir, out));
        }
    }
    emit(rows, out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-beam GEO satellite system-level simulator"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* cmd) {
        cmd->add_option("--config", o.config, "Scenario file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", o.seed, "Master seed override");
        cmd->add_option("--drops", o.drops, "Number of drops")->check(CLI::PositiveNumber);
        cmd->add_option("--tiers", o.tiers, "Interfering beam tiers")->check(CLI::Range(1, 2));
        cmd->add_option("--stack", o.stack, "dvb or nr");
        cmd->add_option("--direction", o.direction, "dl, ul or both");
        cmd->add_option("--out-dir", o.out_dir, "Output directory");
    };
    auto* run = app.add_subcommand("run", "Run one stack and write its report");
    auto* compare = app.add_subcommand("compare", "Run both stacks on identical drops and emit gains");
    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    auto* tmpl = app.add_subcommand("template", "Print a scenario template with REQUIRED placeholders");
    add_common(run);
    add_common(compare);
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (tmpl->parsed()) {
            std::cout << config::required_template();
            return 0;
        }
        if (validate->parsed()) {
            prepare(o);
            return 0;
        }
        return do_run(o, compare->parsed());
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
