#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "geometry.hpp"
#include "netmodel.hpp"
#include "params.hpp"

namespace coopnet {

enum class Command
{
    theory,
    outage,
    sweep,
    tail,
    geomcheck,
    convergence,
};

enum class TailKind
{
    link_power,
    shot_noise,
};

enum class OutputFormat
{
    csv,
    json,
};

/// Environment variable naming a default JSON config file.
inline constexpr const char* kConfigEnvVar = "COOPNET_CONFIG";

/// A fully resolved run: model parameters plus the options of one command.
struct RunConfig
{
    Command command = Command::theory;
    SimParams params;
    MobileMode mode = MobileMode::center;
    std::vector<double> k_values{4.0, 6.0, 8.0, 10.0, 12.0};
    std::uint64_t n_trials = 100000;
    TailKind tail = TailKind::link_power;
    std::vector<double> x_grid;
    /// Shot-noise truncation radius.
    double r = 0.0;
    /// Shot-noise window radius as a multiple of r.
    double outer_factor = 32.0;
    std::vector<int> rings_sweep{3, 4};
    std::uint64_t geom_samples = 100000;
    std::vector<double> geom_nu{0.25, 0.5, 1.0};
    std::string output;
    OutputFormat format = OutputFormat::csv;
    /// Worker count hint (0 = hardware concurrency); never changes results.
    unsigned threads = 0;
};

constexpr std::string_view to_string(Command c) noexcept
{
    switch (c)
    {
    case Command::theory: return "theory";
    case Command::outage: return "outage";
    case Command::sweep: return "sweep";
    case Command::tail: return "tail";
    case Command::geomcheck: return "geomcheck";
    case Command::convergence: return "convergence";
    }
    return "unknown";
}

constexpr std::string_view to_string(TailKind t) noexcept
{
    return t == TailKind::link_power ? "link_power" : "shot_noise";
}

constexpr std::string_view to_string(OutputFormat f) noexcept
{
    return f == OutputFormat::csv ? "csv" : "json";
}

inline std::optional<Command> parse_command(std::string_view s)
{
    for (Command c : {Command::theory, Command::outage, Command::sweep, Command::tail,
                      Command::geomcheck, Command::convergence})
    {
        if (to_string(c) == s)
            return c;
    }
    return std::nullopt;
}

namespace detail {

using json = nlohmann::json;

template <class T>
T get_as(const json& v, const std::string& key)
{
    try
    {
        return v.get<T>();
    }
    catch (const json::exception&)
    {
        throw ParameterError(key, "value has the wrong type: " + v.dump());
    }
}

inline double get_number(const json& v, const std::string& key)
{
    if (!v.is_number())
        throw ParameterError(key, "expected a number, got " + v.dump());
    return v.get<double>();
}

inline std::uint64_t get_count(const json& v, const std::string& key)
{
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ParameterError(key, "expected a non-negative integer, got " + v.dump());
    return v.get<std::uint64_t>();
}

template <class Enum, class Parse>
Enum get_enum(const json& v, const std::string& key, Parse parse)
{
    if (!v.is_string())
        throw ParameterError(key, "expected a string, got " + v.dump());
    const auto e = parse(v.get<std::string>());
    if (!e)
        throw ParameterError(key, "unrecognized value '" + v.get<std::string>() + "'");
    return *e;
}

inline std::optional<LinkMode> parse_link_mode(std::string_view s)
{
    if (s == "rayleigh")
        return LinkMode::rayleigh;
    if (s == "exact_cell")
        return LinkMode::exact_cell;
    return std::nullopt;
}

inline std::optional<SidelobeMode> parse_sidelobe_mode(std::string_view s)
{
    if (s == "constant")
        return SidelobeMode::constant;
    if (s == "uniform")
        return SidelobeMode::uniform;
    return std::nullopt;
}

inline std::optional<MobileMode> parse_mobile_mode(std::string_view s)
{
    if (s == "center")
        return MobileMode::center;
    if (s == "typical")
        return MobileMode::typical;
    return std::nullopt;
}

inline std::optional<TailKind> parse_tail_kind(std::string_view s)
{
    if (s == "link_power")
        return TailKind::link_power;
    if (s == "shot_noise")
        return TailKind::shot_noise;
    return std::nullopt;
}

inline std::optional<OutputFormat> parse_format(std::string_view s)
{
    if (s == "csv")
        return OutputFormat::csv;
    if (s == "json")
        return OutputFormat::json;
    return std::nullopt;
}

// Apply every key of `obj` onto `cfg`. Grid and radius entries are recorded
// as explicit so that later defaults do not overwrite them.
struct Explicit
{
    bool x_grid = false;
    bool r = false;
};

inline void apply(RunConfig& cfg, Explicit& ex, const json& obj)
{
    if (obj.is_null())
        return;
    if (!obj.is_object())
        throw ParameterError("config", "configuration must be a JSON object");
    SimParams& p = cfg.params;
    for (const auto& [key, v] : obj.items())
    {
        if (key == "lambda") p.lambda = get_number(v, key);
        else if (key == "eta") p.eta = get_number(v, key);
        else if (key == "nu") p.nu = get_number(v, key);
        else if (key == "alpha") p.alpha = get_number(v, key);
        else if (key == "delta1") p.delta1 = get_number(v, key);
        else if (key == "delta2") p.delta2 = get_number(v, key);
        else if (key == "delta") p.delta = get_number(v, key);
        else if (key == "theta") p.theta = get_number(v, key);
        else if (key == "m_antennas")
        {
            if (v.is_null() || (v.is_string() && v.get<std::string>() == "unlimited"))
                p.m_antennas.reset();
            else
                p.m_antennas = static_cast<unsigned>(get_count(v, key));
        }
        else if (key == "rings") p.rings = static_cast<int>(get_count(v, key));
        else if (key == "link_mode") p.link_mode = get_enum<LinkMode>(v, key, parse_link_mode);
        else if (key == "sidelobe_mode")
            p.sidelobe_mode = get_enum<SidelobeMode>(v, key, parse_sidelobe_mode);
        else if (key == "seed") p.seed = get_count(v, key);
        else if (key == "exact_cell_budget") p.exact_cell_budget = get_count(v, key);
        else if (key == "mode") cfg.mode = get_enum<MobileMode>(v, key, parse_mobile_mode);
        else if (key == "k_values") cfg.k_values = get_as<std::vector<double>>(v, key);
        else if (key == "n_trials") cfg.n_trials = get_count(v, key);
        else if (key == "tail") cfg.tail = get_enum<TailKind>(v, key, parse_tail_kind);
        else if (key == "x_grid")
        {
            cfg.x_grid = get_as<std::vector<double>>(v, key);
            ex.x_grid = !cfg.x_grid.empty();
        }
        else if (key == "r")
        {
            cfg.r = get_number(v, key);
            ex.r = true;
        }
        else if (key == "outer_factor") cfg.outer_factor = get_number(v, key);
        else if (key == "rings_sweep") cfg.rings_sweep = get_as<std::vector<int>>(v, key);
        else if (key == "geom_samples") cfg.geom_samples = get_count(v, key);
        else if (key == "geom_nu") cfg.geom_nu = get_as<std::vector<double>>(v, key);
        else if (key == "output") cfg.output = get_as<std::string>(v, key);
        else if (key == "format") cfg.format = get_enum<OutputFormat>(v, key, parse_format);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(get_count(v, key));
        else if (key == "command") continue;
        else throw ParameterError(key, "unknown configuration key");
    }
}

} // namespace detail

/// Default link-power grid: thresholds whose asymptotic exponent is
/// 0.25 ... 8.
inline std::vector<double> default_link_grid(const SimParams& p)
{
    const double unit = std::pow(1.0 / (std::numbers::pi * p.lambda), 0.5 * p.alpha) * p.delta / p.delta1;
    std::vector<double> grid;
    for (double t : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0})
        grid.push_back(unit * std::pow(t, 0.5 * p.alpha));
    return grid;
}

/// Default shot-noise grid: thresholds whose lower band exponent is 1 ... 12.
inline std::vector<double> default_shot_grid(const SimParams& p, double r)
{
    const double gamma = 2.0 / p.alpha;
    const double c = std::numbers::pi * p.lambda * std::pow(p.delta1 / p.delta, gamma) * r * r;
    std::vector<double> grid;
    for (int t = 1; t <= 12; ++t)
        grid.push_back(std::pow(t / c, 1.0 / gamma));
    return grid;
}

/*!
 * Build a validated RunConfig: defaults, then the file config, then flag
 * overrides (flags win). Throws ParameterError naming the offending key.
 */
inline RunConfig parse_and_validate(Command command, const nlohmann::json& file_config,
                                    const nlohmann::json& overrides = nlohmann::json::object())
{
    RunConfig cfg;
    cfg.command = command;
    detail::Explicit ex;
    detail::apply(cfg, ex, file_config);
    detail::apply(cfg, ex, overrides);

    validate(cfg.params);
    if (cfg.n_trials < 1)
        throw ParameterError("n_trials", "need at least one trial");
    if (cfg.geom_samples < 1)
        throw ParameterError("geom_samples", "need at least one sample");
    for (double k : cfg.k_values)
    {
        if (!(k > 0.0) || !std::isfinite(k))
            throw ParameterError("k_values", "cluster size K must be positive");
    }
    for (int r : cfg.rings_sweep)
    {
        if (r < 0)
            throw ParameterError("rings_sweep", "ring count must be non-negative");
    }
    for (double nu : cfg.geom_nu)
    {
        if (!(nu > 0.0 && nu <= 1.0))
            throw ParameterError("geom_nu", "interior fraction must lie in (0, 1]");
    }
    if (!(cfg.outer_factor > 1.0) || !std::isfinite(cfg.outer_factor))
        throw ParameterError("outer_factor", "window factor must exceed 1");

    if (!ex.r)
        cfg.r = 2.0 * HexLattice(cfg.params.eta, 0).rho();
    if (!(cfg.r > 0.0) || !std::isfinite(cfg.r))
        throw ParameterError("r", "truncation radius must be positive");
    if (!ex.x_grid)
    {
        cfg.x_grid = cfg.tail == TailKind::link_power ? default_link_grid(cfg.params)
                                                      : default_shot_grid(cfg.params, cfg.r);
    }
    for (std::size_t i = 0; i < cfg.x_grid.size(); ++i)
    {
        if (!(cfg.x_grid[i] >= 0.0) || (i > 0 && !(cfg.x_grid[i] > cfg.x_grid[i - 1])))
            throw ParameterError("x_grid", "thresholds must be non-negative and increasing");
    }
    return cfg;
}

/// Every engine-relevant value of a resolved config.
inline nlohmann::json config_to_json(const RunConfig& cfg)
{
    const SimParams& p = cfg.params;
    nlohmann::json j;
    j["command"] = std::string(to_string(cfg.command));
    j["lambda"] = p.lambda;
    j["eta"] = p.eta;
    j["nu"] = p.nu;
    j["alpha"] = p.alpha;
    j["delta1"] = p.delta1;
    j["delta2"] = p.delta2;
    j["delta"] = p.delta;
    j["theta"] = p.theta;
    j["m_antennas"] = p.m_antennas ? nlohmann::json(*p.m_antennas) : nlohmann::json("unlimited");
    j["rings"] = p.rings;
    j["link_mode"] = std::string(to_string(p.link_mode));
    j["sidelobe_mode"] = std::string(to_string(p.sidelobe_mode));
    j["seed"] = p.seed;
    j["exact_cell_budget"] = p.exact_cell_budget;
    j["mode"] = std::string(to_string(cfg.mode));
    j["k_values"] = cfg.k_values;
    j["n_trials"] = cfg.n_trials;
    j["tail"] = std::string(to_string(cfg.tail));
    j["x_grid"] = cfg.x_grid;
    j["r"] = cfg.r;
    j["outer_factor"] = cfg.outer_factor;
    j["rings_sweep"] = cfg.rings_sweep;
    j["geom_samples"] = cfg.geom_samples;
    j["geom_nu"] = cfg.geom_nu;
    j["output"] = cfg.output;
    j["format"] = std::string(to_string(cfg.format));
    j["threads"] = cfg.threads;
    return j;
}

} // namespace coopnet
