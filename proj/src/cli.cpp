#include "platoon/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "platoon/config_io.hpp"
#include "platoon/errors.hpp"
#include "platoon/output.hpp"
#include "platoon/plot.hpp"
#include "platoon/scenario.hpp"
#include "platoon/sweep.hpp"

namespace platoon::cli {

namespace fs = std::filesystem;

namespace {

struct Invocation {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<cosim::ChannelKind> channel;
};

scenario::ScenarioConfig load(const Invocation& inv)
{
    if (!fs::is_regular_file(inv.config_path)) {
        throw ConfigError("config file not found: " + inv.config_path);
    }
    auto cfg = config_io::load_config(inv.config_path);
    if (inv.seed) {
        cfg.seed = *inv.seed;
    }
    if (inv.channel) {
        cfg.channel = *inv.channel;
    }
    cfg.validate();
    return cfg;
}

int cmd_run(const Invocation& inv, std::ostream& out)
{
    const auto cfg = load(inv);
    const auto result = scenario::run_scenario(cfg);
    fs::create_directories(inv.out_dir);
    output::write_run_outputs(inv.out_dir, result);
    out << "run: " << result.steps << " steps, " << result.stats.generated << " CAMs generated, outputs in "
        << inv.out_dir << "\n";
    return kExitOk;
}

int cmd_compare(const Invocation& inv, std::ostream& out)
{
    const auto cfg = load(inv);
    const auto cmp = scenario::compare_channels(cfg, sweep::thread_budget());
    const fs::path dir(inv.out_dir);
    fs::create_directories(dir / "ideal");
    fs::create_directories(dir / "itsg5");
    output::write_run_outputs(dir / "ideal", cmp.ideal);
    output::write_run_outputs(dir / "itsg5", cmp.itsg5);
    output::write_received_signal_csv(dir / "received_signal.csv", cmp.received_signal);
    out << "compare: outputs in " << dir.string() << "/ideal and " << dir.string() << "/itsg5\n";
    return kExitOk;
}

int cmd_plot(const Invocation& inv, std::ostream& out)
{
    const auto written = plot::plot_directory(inv.out_dir);
    for (const auto& p : written) {
        out << "wrote " << p.string() << "\n";
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Platoon co-simulator: CACC vehicles over an ideal or ITS-G5 channel", "platoon_sim"};
    app.require_subcommand(1);

    Invocation inv;
    std::uint64_t seed = 0;
    cosim::ChannelKind channel = cosim::ChannelKind::Ideal;
    const std::map<std::string, cosim::ChannelKind> channels{{"ideal", cosim::ChannelKind::Ideal},
                                                             {"itsg5", cosim::ChannelKind::Itsg5}};

    auto* run = app.add_subcommand("run", "Run one scenario and write trace.csv, cam_log.csv, metrics.json");
    auto* compare = app.add_subcommand("compare", "Run the scenario over both channels");
    auto* plot = app.add_subcommand("plot", "Render SVG charts from the CSVs in --out");

    for (auto* sub : {run, compare}) {
        sub->add_option("--config", inv.config_path, "Scenario JSON file")->required();
        sub->add_option("--out", inv.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override the scenario seed");
    }
    run->add_option("--channel", channel, "Override the channel (ideal|itsg5)")
        ->transform(CLI::CheckedTransformer(channels, CLI::ignore_case));
    plot->add_option("--out", inv.out_dir, "Directory holding trace.csv / received_signal.csv")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    for (auto* sub : {run, compare}) {
        if (sub->parsed() && sub->count("--seed") > 0) {
            inv.seed = seed;
        }
    }
    if (run->count("--channel") > 0) {
        inv.channel = channel;
    }

    try {
        if (run->parsed()) {
            return cmd_run(inv, out);
        }
        if (compare->parsed()) {
            return cmd_compare(inv, out);
        }
        return cmd_plot(inv, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const plot::PlotInputError& e) {
        err << "plot error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace platoon::cli
