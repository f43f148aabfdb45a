// Command-line driver: coopnet <command> [--config file.json] [flags]
//
// Exit status: 0 success, 1 invalid configuration, 2 runtime failure,
// 3 I/O failure.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <coopnet/commands.hpp>
#include <coopnet/config.hpp>
#include <coopnet/error.hpp>
#include <coopnet/report.hpp>

namespace {

using nlohmann::json;

enum Exit
{
    kOk = 0,
    kValidation = 1,
    kRuntime = 2,
    kIo = 3,
};

json read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw coopnet::IoError("cannot read config file '" + path + "'");
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw coopnet::ParameterError("config", std::string("malformed JSON: ") + e.what());
    }
}

std::uint64_t parse_antennas(const std::string& s)
{
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw coopnet::ParameterError("m_antennas", "expected a count or 'unlimited', got '" + s + "'");
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Clustered multi-cell cooperation: outage simulation and exponent checks"};
    app.require_subcommand(1, 1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (default: $COOPNET_CONFIG)");

    // Every option is forwarded as a JSON override, keyed by its long name.
    std::map<std::string, double> numbers;
    std::map<std::string, std::uint64_t> counts;
    std::map<std::string, std::string> strings;
    std::map<std::string, std::vector<double>> lists;
    std::vector<std::pair<std::string, CLI::Option*>> given;

    auto number = [&](const std::string& key, const std::string& help) {
        given.emplace_back(key, app.add_option("--" + key, numbers[key], help));
    };
    auto count = [&](const std::string& key, const std::string& help) {
        given.emplace_back(key, app.add_option("--" + key, counts[key], help));
    };
    auto text = [&](const std::string& key, const std::string& help) {
        given.emplace_back(key, app.add_option("--" + key, strings[key], help));
    };
    auto list = [&](const std::string& key, const std::string& help) {
        given.emplace_back(key, app.add_option("--" + key, lists[key], help)->delimiter(','));
    };

    number("lambda", "BS density");
    number("eta", "cluster density");
    number("nu", "interior fraction in (0, 1]");
    number("alpha", "path-loss exponent (> 2)");
    number("delta1", "main-lobe lower bound");
    number("delta2", "main-lobe upper bound");
    number("delta", "side-lobe cap");
    number("theta", "SIR threshold");
    text("m_antennas", "antenna count or 'unlimited'");
    count("rings", "lattice rings around the central cluster");
    text("link_mode", "rayleigh | exact_cell");
    text("sidelobe_mode", "constant | uniform");
    count("seed", "root seed");
    count("exact_cell_budget", "candidate budget for exact_cell placement");
    text("mode", "center | typical");
    list("k_values", "cluster sizes K, comma separated");
    count("n_trials", "trials per estimate (tail: samples)");
    text("tail", "link_power | shot_noise");
    list("x_grid", "tail thresholds, comma separated");
    number("r", "shot-noise truncation radius");
    number("outer_factor", "shot-noise window radius / r");
    list("rings_sweep", "ring counts for convergence, comma separated");
    count("geom_samples", "samples per distance law");
    list("geom_nu", "interior fractions for the boundary-distance law");
    text("output", "output path (default: stdout)");
    text("format", "csv | json");
    count("threads", "worker threads (0 = all cores)");

    std::map<CLI::App*, coopnet::Command> commands;
    for (const char* name : {"theory", "outage", "sweep", "tail", "geomcheck", "convergence"})
    {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
        sub->fallthrough();
        commands[sub] = *coopnet::parse_command(name);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return kValidation;
    }

    const coopnet::Command command = commands.at(app.get_subcommands().front());
    try
    {
        if (config_path.empty())
        {
            if (const char* env = std::getenv(coopnet::kConfigEnvVar))
                config_path = env;
        }
        const json file_config = config_path.empty() ? json::object() : read_config_file(config_path);

        json overrides = json::object();
        for (const auto& [key, opt] : given)
        {
            if (opt->count() == 0)
                continue;
            if (numbers.contains(key))
                overrides[key] = numbers[key];
            else if (counts.contains(key))
                overrides[key] = counts[key];
            else if (lists.contains(key))
                overrides[key] = lists[key];
            else if (key == "m_antennas" && strings[key] != "unlimited")
                overrides[key] = parse_antennas(strings[key]);
            else
                overrides[key] = strings[key];
        }
        if (overrides.contains("rings_sweep"))
        {
            std::vector<int> rs;
            for (double v : overrides["rings_sweep"].get<std::vector<double>>())
                rs.push_back(static_cast<int>(v));
            overrides["rings_sweep"] = rs;
        }

        const coopnet::RunConfig cfg = coopnet::parse_and_validate(command, file_config, overrides);
        const coopnet::Report report = coopnet::dispatch(cfg);
        coopnet::emit(report, cfg.format, cfg.output);
        return kOk;
    }
    catch (const coopnet::ParameterError& e)
    {
        std::cerr << "coopnet: invalid configuration: " << e.what() << '\n';
        return kValidation;
    }
    catch (const coopnet::IoError& e)
    {
        std::cerr << "coopnet: I/O error: " << e.what() << '\n';
        return kIo;
    }
    catch (const coopnet::StageError& e)
    {
        std::cerr << "coopnet: " << coopnet::to_string(command) << " failed in stage " << e.what() << '\n';
        return kRuntime;
    }
    catch (const std::exception& e)
    {
        std::cerr << "coopnet: " << coopnet::to_string(command) << " failed: " << e.what() << '\n';
        return kRuntime;
    }
}
