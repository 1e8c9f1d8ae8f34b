#include "kpzlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>
#include <fmt/format.h>

namespace kpzlab {

namespace {

std::string join_violations(const std::vector<std::string>& v)
{
    std::string s = "invalid configuration:";
    for (const auto& e : v) s += "\n  - " + e;
    return s;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// Collects values and violations while walking the key table.
class Reader {
public:
    Reader(std::map<std::string, std::string> kv, std::vector<std::string>& errors)
        : kv_(std::move(kv)), errors_(errors)
    {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    template <class F>
    void take(const std::string& key, F&& assign)
    {
        auto it = kv_.find(key);
        if (it == kv_.end()) return;
        const std::string value = it->second;
        kv_.erase(it);
        try {
            assign(value);
        } catch (const std::exception& e) {
            errors_.push_back(fmt::format("{}: {}", key, e.what()));
        }
    }

    void real(const std::string& key, double& out)
    {
        take(key, [&](const std::string& v) { out = parse_real(v); });
    }
    void count(const std::string& key, std::size_t& out)
    {
        take(key, [&](const std::string& v) { out = parse_count(v); });
    }
    void flag(const std::string& key, bool& out)
    {
        take(key, [&](const std::string& v) {
            if (v == "true" || v == "1" || v == "yes") {
                out = true;
            } else if (v == "false" || v == "0" || v == "no") {
                out = false;
            } else {
                throw InputError(fmt::format("expected true/false, got '{}'", v));
            }
        });
    }
    void reals(const std::string& key, std::vector<double>& out)
    {
        take(key, [&](const std::string& v) {
            out.clear();
            for (const auto& item : split_list(v)) out.push_back(parse_real(item));
        });
    }
    void ints(const std::string& key, std::vector<int>& out)
    {
        take(key, [&](const std::string& v) {
            out.clear();
            for (const auto& item : split_list(v)) out.push_back(static_cast<int>(parse_count(item)));
        });
    }
    void text(const std::string& key, std::string& out)
    {
        take(key, [&](const std::string& v) { out = v; });
    }

    void report_unknown()
    {
        for (const auto& [k, v] : kv_) errors_.push_back(fmt::format("unknown key '{}'", k));
    }

    static double parse_real(const std::string& s)
    {
        const std::string t = trim(s);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) {
            throw InputError(fmt::format("'{}' is not a number", s));
        }
        return v;
    }
    static std::size_t parse_count(const std::string& s)
    {
        const std::string t = trim(s);
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) {
            throw InputError(fmt::format("'{}' is not a nonnegative integer", s));
        }
        return static_cast<std::size_t>(v);
    }

private:
    std::map<std::string, std::string> kv_;
    std::vector<std::string>& errors_;
};

std::map<std::string, std::string> flatten_ini(std::string_view text)
{
    boost::property_tree::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError({fmt::format("malformed document: {}", e.message())});
    }
    std::map<std::string, std::string> kv;
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            kv[key] = trim(node.data());
        } else {
            for (const auto& [sub, leaf] : node) kv[key + "." + sub] = trim(leaf.data());
        }
    }
    return kv;
}

std::string ic_kind_name(InitialKind k)
{
    switch (k) {
    case InitialKind::NarrowWedge: return "narrow_wedge";
    case InitialKind::BrownianIC: return "brownian";
    case InitialKind::FunctionIC: return "function";
    }
    return {};
}

std::string method_name(FbmMethod m)
{
    switch (m) {
    case FbmMethod::Automatic: return "auto";
    case FbmMethod::Cholesky: return "cholesky";
    case FbmMethod::Circulant: return "circulant";
    }
    return {};
}

std::string list_text(const std::vector<double>& v)
{
    return fmt::format("{}", fmt::join(v, ", "));
}

std::string list_text(const std::vector<int>& v) { return fmt::format("{}", fmt::join(v, ", ")); }

}  // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::SimulateShe: return "simulate-she";
    case ExperimentKind::SimulateFbm: return "simulate-fbm";
    case ExperimentKind::Stats: return "stats";
    case ExperimentKind::Verify: return "verify";
    }
    return {};
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : InputError(join_violations(violations)), violations_(std::move(violations))
{}

GridSpec GridParams::build() const
{
    GridOptions opt;
    opt.override_boundary_guard = override_boundary_guard;
    return make_grid(x_min, x_max, nx, t_start, t_end, nt, opt);
}

GridSpec GridParams::build_time_axis() const
{
    return make_grid(x_min, x_max, nx, t_start, t_end, nt, {.override_boundary_guard = true});
}

std::string ExperimentConfig::echo() const
{
    std::string s;
    auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    line("experiment.kind", to_string(kind));
    line("grid.x_min", fmt::format("{}", grid.x_min));
    line("grid.x_max", fmt::format("{}", grid.x_max));
    line("grid.nx", fmt::format("{}", grid.nx));
    line("grid.t_start", fmt::format("{}", grid.t_start));
    line("grid.t_end", fmt::format("{}", grid.t_end));
    line("grid.nt", fmt::format("{}", grid.nt));
    line("grid.override_boundary_guard", grid.override_boundary_guard ? "true" : "false");
    line("ic.kind", ic_kind_name(ic.kind));
    if (ic.t0) line("ic.t0", fmt::format("{}", *ic.t0));
    if (!ic.expr.empty()) line("ic.expr", ic.expr);
    if (!ic.table.empty()) line("ic.table", ic.table);
    line("ic.seed", fmt::format("{}", ic.seed));
    if (hyp) {
        line("hyp.theta", fmt::format("{}", hyp->theta));
        line("hyp.delta", fmt::format("{}", hyp->delta));
        line("hyp.lambda", fmt::format("{}", hyp->lambda));
        line("hyp.kappa", fmt::format("{}", hyp->kappa));
        line("hyp.M", fmt::format("{}", hyp->M));
    }
    line("solver.mode", mode == SolveMode::Multiplicative ? "multiplicative" : "additive");
    line("fbm.hurst", fmt::format("{}", hurst));
    line("fbm.method", method_name(fbm_method));
    line("fbm.rescale", fbm_rescale ? "true" : "false");
    if (!stats.alpha.empty()) line("stats.alpha", list_text(stats.alpha));
    if (!stats.epsilon.empty()) line("stats.epsilon", list_text(stats.epsilon));
    line("stats.interval", fmt::format("{}, {}", stats.interval_start, stats.interval_end));
    if (!stats.depths.empty()) line("stats.depths", list_text(stats.depths));
    if (!stats.exceptional_alphas.empty()) {
        line("stats.exceptional_alphas", list_text(stats.exceptional_alphas));
    }
    line("stats.base_time", fmt::format("{}", stats.base_time));
    line("stats.resolution", fmt::format("{}", stats.resolution));
    if (!stats.input.empty()) line("stats.input", stats.input);
    if (stats.min_steps) line("stats.min_steps", fmt::format("{}", *stats.min_steps));
    if (!criteria.empty()) line("verify.criteria", list_text(criteria));
    line("run.replicas", fmt::format("{}", replicas));
    line("run.seed", fmt::format("{}", seed));
    line("run.threads", fmt::format("{}", threads));
    line("run.output", out_dir);
    line("run.save_trajectories", save_trajectories ? "true" : "false");
    return s;
}

void validate_config(const ExperimentConfig& c)
{
    std::vector<std::string> errors;
    if (c.replicas < 1) errors.push_back("run.replicas must be >= 1");
    if (c.threads < 1) errors.push_back("run.threads must be >= 1");

    const bool uses_grid = c.kind != ExperimentKind::Verify;
    if (uses_grid) {
        try {
            if (c.kind == ExperimentKind::SimulateShe) {
                c.grid.build();
            } else {
                c.grid.build_time_axis();
            }
        } catch (const InputError& e) {
            errors.push_back(fmt::format("grid: {}", e.what()));
        }
        const double dt = c.grid.dt();
        if (dt > 0.0) {
            for (double eps : c.stats.epsilon) {
                const double ratio = eps / dt;
                if (!(eps > 0.0) || std::fabs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) ||
                    std::round(ratio) < 1.0) {
                    errors.push_back(fmt::format(
                        "stats.epsilon {} is not a whole multiple of dt = {} (ratio {})", eps, dt, ratio));
                }
            }
        }
    }
    for (double a : c.stats.alpha) {
        if (!(a > 0.0)) errors.push_back(fmt::format("stats.alpha {} must be positive", a));
    }
    for (double a : c.stats.exceptional_alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            errors.push_back(fmt::format("stats.exceptional_alphas {} must lie in (0, 1)", a));
        }
    }
    if (!(c.stats.interval_start < c.stats.interval_end)) {
        errors.push_back("stats.interval must be increasing");
    }
    if (c.kind == ExperimentKind::SimulateFbm && !(c.hurst > 0.0 && c.hurst < 1.0)) {
        errors.push_back("fbm.hurst must lie in (0, 1)");
    }
    if (c.kind == ExperimentKind::SimulateShe && c.ic.kind == InitialKind::FunctionIC &&
        c.ic.expr.empty() == c.ic.table.empty()) {
        errors.push_back("function initial data need exactly one of ic.expr and ic.table");
    }
    const bool simulates = c.kind == ExperimentKind::SimulateShe || c.kind == ExperimentKind::SimulateFbm;
    if (simulates && !c.stats.alpha.empty() &&
        (c.stats.interval_start < c.grid.t_start || c.stats.interval_end > c.grid.t_end)) {
        errors.push_back(fmt::format("stats.interval [{}, {}] is not inside the grid time range [{}, {}]",
                                     c.stats.interval_start, c.stats.interval_end, c.grid.t_start,
                                     c.grid.t_end));
    }
    if (c.kind == ExperimentKind::SimulateShe && c.ic.kind == InitialKind::NarrowWedge) {
        const double t0 = c.ic.t0.value_or(c.grid.t_start);
        if (!(t0 > 0.0)) {
            errors.push_back("narrow wedge initial data need grid.t_start (or ic.t0) > 0, the smoothing time");
        } else if (std::fabs(c.grid.t_start - t0) > 1e-12 * std::max(1.0, t0)) {
            errors.push_back(fmt::format("narrow wedge: grid.t_start {} must equal ic.t0 {}", c.grid.t_start, t0));
        }
    }
    if (c.kind == ExperimentKind::Stats && c.stats.input.empty()) {
        errors.push_back("stats experiments need stats.input (a paths CSV)");
    }
    if (c.hyp) {
        try {
            c.hyp->validate();
        } catch (const InputError& e) {
            errors.push_back(fmt::format("hyp: {}", e.what()));
        }
    }
    for (int id : c.criteria) {
        if (id < 1 || id > 11) errors.push_back(fmt::format("verify.criteria: no criterion {}", id));
    }
    if (!errors.empty()) throw ConfigError(errors);
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> kind_override,
                              const std::map<std::string, std::string>& overrides)
{
    std::vector<std::string> errors;
    auto kv = flatten_ini(text);
    for (const auto& [k, v] : overrides) kv[k] = v;
    Reader r(std::move(kv), errors);
    ExperimentConfig c;

    r.take("experiment.kind", [&](const std::string& v) {
        if (v == "simulate-she") {
            c.kind = ExperimentKind::SimulateShe;
        } else if (v == "simulate-fbm") {
            c.kind = ExperimentKind::SimulateFbm;
        } else if (v == "stats") {
            c.kind = ExperimentKind::Stats;
        } else if (v == "verify") {
            c.kind = ExperimentKind::Verify;
        } else {
            throw InputError(fmt::format("unknown experiment kind '{}'", v));
        }
    });
    if (kind_override) c.kind = *kind_override;

    r.real("grid.x_min", c.grid.x_min);
    r.real("grid.x_max", c.grid.x_max);
    r.count("grid.nx", c.grid.nx);
    r.real("grid.t_start", c.grid.t_start);
    r.real("grid.t_end", c.grid.t_end);
    r.count("grid.nt", c.grid.nt);
    r.flag("grid.override_boundary_guard", c.grid.override_boundary_guard);

    r.take("ic.kind", [&](const std::string& v) {
        if (v == "narrow_wedge" || v == "nw") {
            c.ic.kind = InitialKind::NarrowWedge;
        } else if (v == "brownian") {
            c.ic.kind = InitialKind::BrownianIC;
        } else if (v == "function") {
            c.ic.kind = InitialKind::FunctionIC;
        } else {
            throw InputError(fmt::format("unknown initial datum kind '{}'", v));
        }
    });
    r.take("ic.t0", [&](const std::string& v) { c.ic.t0 = Reader::parse_real(v); });
    r.text("ic.expr", c.ic.expr);
    r.text("ic.table", c.ic.table);
    r.take("ic.seed", [&](const std::string& v) { c.ic.seed = Reader::parse_count(v); });

    const bool any_hyp = r.has("hyp.theta") || r.has("hyp.delta") || r.has("hyp.lambda") ||
                         r.has("hyp.kappa") || r.has("hyp.M");
    if (any_hyp) {
        HypParams h;
        r.real("hyp.theta", h.theta);
        r.real("hyp.delta", h.delta);
        r.real("hyp.lambda", h.lambda);
        r.real("hyp.kappa", h.kappa);
        r.real("hyp.M", h.M);
        c.hyp = h;
    }

    r.take("solver.mode", [&](const std::string& v) {
        if (v == "multiplicative") {
            c.mode = SolveMode::Multiplicative;
        } else if (v == "additive") {
            c.mode = SolveMode::Additive;
        } else {
            throw InputError(fmt::format("unknown solver mode '{}'", v));
        }
    });
    r.real("fbm.hurst", c.hurst);
    r.take("fbm.method", [&](const std::string& v) {
        if (v == "auto") {
            c.fbm_method = FbmMethod::Automatic;
        } else if (v == "cholesky") {
            c.fbm_method = FbmMethod::Cholesky;
        } else if (v == "circulant") {
            c.fbm_method = FbmMethod::Circulant;
        } else {
            throw InputError(fmt::format("unknown fbm method '{}'", v));
        }
    });
    r.flag("fbm.rescale", c.fbm_rescale);

    r.reals("stats.alpha", c.stats.alpha);
    r.reals("stats.epsilon", c.stats.epsilon);
    r.take("stats.interval", [&](const std::string& v) {
        const auto items = split_list(v);
        if (items.size() != 2) throw InputError("expected two numbers 's, t'");
        c.stats.interval_start = Reader::parse_real(items[0]);
        c.stats.interval_end = Reader::parse_real(items[1]);
    });
    r.ints("stats.depths", c.stats.depths);
    r.reals("stats.exceptional_alphas", c.stats.exceptional_alphas);
    r.real("stats.base_time", c.stats.base_time);
    r.take("stats.resolution", [&](const std::string& v) {
        c.stats.resolution = static_cast<int>(Reader::parse_count(v));
    });
    r.text("stats.input", c.stats.input);
    r.take("stats.min_steps", [&](const std::string& v) {
        c.stats.min_steps = Reader::parse_count(v);
        if (*c.stats.min_steps < 1) throw InputError("must be >= 1");
    });
    r.ints("verify.criteria", c.criteria);

    r.count("run.replicas", c.replicas);
    bool seeded = false;
    r.take("run.seed", [&](const std::string& v) {
        c.seed = Reader::parse_count(v);
        seeded = true;
    });
    r.count("run.threads", c.threads);
    r.text("run.output", c.out_dir);
    r.flag("run.save_trajectories", c.save_trajectories);

    r.report_unknown();
    if (!seeded) errors.push_back("run.seed is required (there is no implicit seed)");

    try {
        validate_config(c);
    } catch (const ConfigError& e) {
        errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }
    if (!errors.empty()) throw ConfigError(errors);
    return c;
}

ExperimentConfig load_config(const std::string& file, std::optional<ExperimentKind> kind_override,
                             const std::map<std::string, std::string>& overrides)
{
    std::ifstream in(file);
    if (!in) throw ConfigError({fmt::format("cannot open config file {}", file)});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), kind_override, overrides);
}

}  // namespace kpzlab
