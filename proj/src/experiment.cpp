#include "kpzlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

#include <fmt/core.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "kpzlab/acceptance.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/pathstats.hpp"
#include "kpzlab/trajectory_io.hpp"
#include "kpzlab/verify.hpp"

#ifndef KPZLAB_VERSION
#define KPZLAB_VERSION "0.0.0"
#endif

namespace kpzlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string kpzlab_version() { return "kpzlab " KPZLAB_VERSION; }

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read {}", path));
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

namespace {

std::string utc_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Keeps the output list in write order with sizes and checksums.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name)
    {
        std::ofstream out(dir_ / name);
        if (!out) throw InputError(fmt::format("cannot write {}", (dir_ / name).string()));
        out.precision(17);
        return out;
    }
    void record(const std::string& name)
    {
        const fs::path p = dir_ / name;
        files_.push_back({name, fs::file_size(p), sha256_file(p.string())});
    }
    const fs::path& dir() const { return dir_; }
    std::vector<OutputFile>& files() { return files_; }

private:
    fs::path dir_;
    std::vector<OutputFile> files_;
};

std::pair<double, double> mean_se(const std::vector<double>& x)
{
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    if (x.size() < 2) return {m, std::nan("")};
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

std::string num(double v) { return fmt::format("{}", v); }

int default_resolution(double dt)
{
    const double j = std::log2(1.0 / dt);
    if (std::fabs(j - std::round(j)) > 1e-9) {
        throw InputError("stats.resolution must be set when dt is not a power of two");
    }
    return static_cast<int>(std::round(j));
}

void compute_statistics(const std::vector<Path>& paths, const StatsConfig& st, std::size_t min_steps,
                        OutputSet& out, std::vector<StatRow>& rows)
{
    if (paths.empty()) return;
    const double s = st.interval_start;
    const double t = st.interval_end;

    if (!st.alpha.empty() && !st.epsilon.empty()) {
        auto f = out.open("variation.csv");
        f << "alpha,epsilon,s,t,mean,se,target\n";
        for (double a : st.alpha) {
            for (double eps : st.epsilon) {
                std::vector<double> v;
                for (const auto& p : paths) v.push_back(alpha_variation(p, a, eps, s, t).value);
                const auto [m, se] = mean_se(v);
                std::optional<double> target;
                if (a == 4.0) target = kQuarticVariationConstant * (t - s);
                f << fmt::format("{},{},{},{},{},{},{}\n", a, eps, s, t, m, se, target ? num(*target) : "");
                rows.push_back({fmt::format("V_{} eps={} [{},{}]", a, eps, s, t), target, m, se, {}, {}});
            }
        }
        f.close();
        out.record("variation.csv");
    }

    if (!st.epsilon.empty() && paths.size() >= 2) {
        auto f = out.open("standardized.csv");
        f << "epsilon,t,variance,se,ks,ks_threshold\n";
        for (double eps : st.epsilon) {
            const auto z = standardized_increments(paths, st.base_time, eps);
            const auto mom = sample_moments(z);
            const double var = mom.variance;
            const double se = mom.se_variance;
            std::string ks_cells = ",";
            std::optional<bool> pass;
            if (z.size() >= 50) {
                const auto ks = ks_normality(z);
                ks_cells = fmt::format("{},{}", ks.statistic, ks.threshold);
                pass = ks.passed();
            }
            f << fmt::format("{},{},{},{},{}\n", eps, st.base_time, var, se, ks_cells);
            rows.push_back({fmt::format("standardized variance eps={} t={} (factor (pi/2)^1/4 = {:.6f})",
                                        eps, st.base_time, kStandardizeFactor),
                            1.0, var, se, {}, pass});
        }
        f.close();
        out.record("standardized.csv");
    }

    if (!st.depths.empty()) {
        ProfileOptions opt;
        opt.min_resolved_steps = min_steps;
        const int lo = *std::min_element(st.depths.begin(), st.depths.end());
        const int hi = *std::max_element(st.depths.begin(), st.depths.end());

        auto write_profile = [&](const std::string& name, const std::string& label,
                                 const std::vector<ScalingProfile>& profs) {
            auto f = out.open(name);
            f << "level,epsilon,statistic,target\n";
            const auto& first = profs.front();
            for (std::size_t l = 0; l < first.depths.size(); ++l) {
                std::vector<double> v;
                for (const auto& p : profs) v.push_back(p.statistic[l]);
                const auto [m, se] = mean_se(v);
                f << fmt::format("{},{},{},{}\n", first.depths[l], first.epsilons[l], m, first.target);
                rows.push_back({fmt::format("{} level {}", label, first.depths[l]), first.target, m, se, {}, {}});
            }
            f.close();
            out.record(name);
        };

        std::vector<ScalingProfile> lil;
        for (const auto& p : paths) lil.push_back(lil_profile(p, st.base_time, hi, std::max(lo, 2), opt));
        write_profile("lil_profile.csv", "LIL", lil);

        std::vector<int> depths = st.depths;
        std::sort(depths.begin(), depths.end());
        depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
        std::vector<ScalingProfile> moc;
        for (const auto& p : paths) moc.push_back(moc_profile(p, depths, s, t, opt));
        write_profile("moc_profile.csv", "MOC", moc);
    }

    if (!st.exceptional_alphas.empty()) {
        const int j = st.resolution > 0 ? st.resolution : default_resolution(paths.front().dt);
        std::vector<int> levels;
        for (int k = (j + 1) / 2; k <= j; ++k) levels.push_back(k);
        std::vector<double> scales;
        for (int k : levels) scales.push_back(std::ldexp(1.0, -k));

        auto dim = out.open("dimension.csv");
        dim << "alpha,slope,residual,target\n";
        for (double a : st.exceptional_alphas) {
            std::vector<double> mean(levels.size(), 0.0);
            for (const auto& p : paths) {
                const auto counts = matched_box_counts(exceptional_set(p, a, j, s, t), levels);
                for (std::size_t l = 0; l < levels.size(); ++l) {
                    mean[l] += counts[l] / static_cast<double>(paths.size());
                }
            }
            const std::string name = fmt::format("boxes_alpha{}.csv", a);
            auto f = out.open(name);
            f << "scale,count\n";
            for (std::size_t l = 0; l < levels.size(); ++l) f << fmt::format("{},{}\n", scales[l], mean[l]);
            f.close();
            out.record(name);
            const auto fit = fit_box_dimension(scales, mean);
            const double target = 1.0 - a * a;
            dim << fmt::format("{},{},{},{}\n", a, fit.slope, fit.residual, target);
            rows.push_back({fmt::format("box dimension alpha={}", a), target, fit.slope, fit.residual, {}, {}});
        }
        dim.close();
        out.record("dimension.csv");
    }
}

InitialDatum build_ic(const ExperimentConfig& c, const GridSpec& grid)
{
    switch (c.ic.kind) {
    case InitialKind::NarrowWedge: return InitialDatum::narrow_wedge(c.ic.t0.value_or(grid.t_start()));
    case InitialKind::BrownianIC: return InitialDatum::brownian(c.ic.seed);
    case InitialKind::FunctionIC:
        if (!c.ic.expr.empty()) return InitialDatum::from_expression(c.ic.expr);
        return InitialDatum::from_function(SampleTable::from_csv_file(c.ic.table));
    }
    throw InputError("unknown initial datum");
}

struct SheOutcome {
    std::optional<Path> primary;
    std::optional<Path> heights;
    std::string error;
};

void write_paths(OutputSet& out, const std::string& name, const std::vector<Path>& paths,
                 const std::vector<std::size_t>& ids)
{
    auto f = out.open(name);
    write_paths_csv(f, paths, ids);
    f.close();
    out.record(name);
}

void run_she(const ExperimentConfig& c, OutputSet& out, RunManifest& m, std::vector<Path>& stats_paths)
{
    const GridSpec grid = c.grid.build();
    const InitialDatum ic = build_ic(c, grid);
    if (c.hyp && ic.kind == InitialKind::FunctionIC) {
        const double extent = std::max(std::fabs(grid.x_min()), std::fabs(grid.x_max()));
        const auto rep = validate_hyp(ic, *c.hyp, extent);
        if (!rep.pass()) {
            throw InputError(fmt::format(
                "initial datum is outside the Hyp class (growth bound {}, floor window {})",
                rep.growth_ok ? "ok" : fmt::format("fails at x = {}", rep.growth_violation_x.value_or(0.0)),
                rep.floor_ok ? "ok" : "missing"));
        }
    }
    if (c.mode == SolveMode::Additive && ic.kind != InitialKind::FunctionIC) {
        throw InputError("additive mode starts from zero; use ic.kind = function with ic.expr = -inf");
    }
    for (std::size_t r = 0; r < c.replicas; ++r) m.seeds.push_back({r, c.seed, r});

    auto outcomes = parallel_map(c.replicas, c.threads, [&](std::size_t r) {
        SheOutcome o;
        try {
            const NoiseRealization noise(grid, c.seed, r);
            Trajectory tr = c.mode == SolveMode::Additive ? solve(grid, ic, noise, SolveMode::Additive)
                                                          : solve_field(make_initial_field(grid, ic, r),
                                                                        noise, SolveMode::Multiplicative);
            tr.ic = ic;
            tr.seed = c.seed;
            tr.stream_id = r;
            if (c.save_trajectories) save_trajectory((out.dir() / fmt::format("replica_{}.kpzt", r)).string(), tr);
            o.primary = std::move(tr.origin_path);
            if (c.mode == SolveMode::Multiplicative) o.heights = std::move(tr.origin_log_path);
        } catch (const NumericalError& e) {
            o.error = e.what();
        }
        return o;
    });

    std::vector<Path> primary;
    std::vector<Path> heights;
    std::vector<std::size_t> ids;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (!outcomes[r].error.empty()) {
            m.failures.push_back({r, outcomes[r].error});
            continue;
        }
        ids.push_back(r);
        primary.push_back(std::move(*outcomes[r].primary));
        if (outcomes[r].heights) heights.push_back(std::move(*outcomes[r].heights));
    }
    if (c.save_trajectories) {
        for (std::size_t r : ids) out.record(fmt::format("replica_{}.kpzt", r));
    }
    write_paths(out, "paths.csv", primary, ids);
    if (c.mode == SolveMode::Multiplicative) {
        write_paths(out, "heights.csv", heights, ids);
        stats_paths = std::move(heights);
    } else {
        stats_paths = std::move(primary);
    }
}

void run_fbm(const ExperimentConfig& c, OutputSet& out, RunManifest& m, std::vector<Path>& stats_paths)
{
    const GridSpec grid = c.grid.build_time_axis();
    FbmSpec base;
    base.hurst = c.hurst;
    base.method = c.fbm_method;
    base.seed = c.seed;
    for (std::size_t n = 0; n <= grid.nt(); ++n) base.times.push_back(grid.t(n));
    for (std::size_t r = 0; r < c.replicas; ++r) m.seeds.push_back({r, c.seed, r});
    stats_paths = parallel_map(c.replicas, c.threads, [&](std::size_t r) {
        FbmSpec spec = base;
        spec.stream_id = r;
        Path p = sample_fbm(spec);
        p.t0 = grid.t_start();
        p.dt = grid.dt();
        return c.fbm_rescale ? rescale_to_kpz_scale(p) : p;
    });
    std::vector<std::size_t> ids(stats_paths.size());
    for (std::size_t r = 0; r < ids.size(); ++r) ids[r] = r;
    write_paths(out, "paths.csv", stats_paths, ids);
}

void run_verify(const ExperimentConfig& c, OutputSet& out, RunManifest& m)
{
    AcceptanceOptions opt;
    opt.seed = c.seed;
    opt.threads = c.threads;
    AcceptanceSuite suite(opt);
    std::vector<int> ids = c.criteria;
    if (ids.empty()) {
        for (int id = 1; id <= AcceptanceSuite::kCriteria; ++id) ids.push_back(id);
    }
    auto f = out.open("acceptance.txt");
    for (int id : ids) {
        const auto res = suite.run(id);
        f << res.summary_line() << "\n";
        for (const auto& n : res.notes) f << "    " << n << "\n";
        const CheckReport& lead = res.checks.front();
        StatRow row{fmt::format("C{} {}", id, res.title), lead.target, lead.measured, lead.se,
                    lead.tolerance, res.pass()};
        if (lead.tolerance_rule == "exact") {
            row.target = 1.0;
            row.tolerance = 0.0;
        }
        m.rows.push_back(row);
    }
    f.close();
    // Runtimes make acceptance.txt vary between runs, so it is listed
    // without being part of the reproducible output set.
    out.record("acceptance.txt");
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config)
{
    validate_config(config);
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(config.out_dir);
    OutputSet out{fs::path(config.out_dir)};

    RunManifest m;
    m.config_echo = config.echo();
    m.version = kpzlab_version();
    m.kind = to_string(config.kind);
    m.out_dir = config.out_dir;
    m.started_utc = utc_now();

    std::vector<Path> stats_paths;
    std::size_t min_steps = 16;
    switch (config.kind) {
    case ExperimentKind::SimulateShe: run_she(config, out, m, stats_paths); break;
    case ExperimentKind::SimulateFbm:
        run_fbm(config, out, m, stats_paths);
        min_steps = 1;
        break;
    case ExperimentKind::Stats: {
        std::ifstream in(config.stats.input);
        if (!in) throw InputError(fmt::format("cannot open stats input {}", config.stats.input));
        stats_paths = read_paths_csv(in);
        break;
    }
    case ExperimentKind::Verify: run_verify(config, out, m); break;
    }
    if (config.stats.min_steps) min_steps = *config.stats.min_steps;
    compute_statistics(stats_paths, config.stats, min_steps, out, m.rows);

    m.outputs = out.files();
    m.complete = m.failures.empty();
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream mf(fs::path(config.out_dir) / "manifest.json");
    mf << m.to_json();
    if (!mf) throw InputError("cannot write manifest.json");
    return m;
}

std::string RunManifest::to_json() const
{
    json j;
    j["version"] = version;
    j["kind"] = kind;
    j["config"] = config_echo;
    j["out_dir"] = out_dir;
    j["started_utc"] = started_utc;
    j["wall_seconds"] = wall_seconds;
    j["complete"] = complete;
    j["seeds"] = json::array();
    for (const auto& s : seeds) j["seeds"].push_back({{"replica", s.replica}, {"seed", s.seed}, {"stream", s.stream_id}});
    j["outputs"] = json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"file", o.name}, {"bytes", o.bytes}, {"sha256", o.sha256}});
    j["statistics"] = json::array();
    for (const auto& r : rows) {
        j["statistics"].push_back({{"check", r.check},
                                   {"target", optional_json(r.target)},
                                   {"measured", r.measured},
                                   {"se", optional_json(r.se)},
                                   {"tolerance", optional_json(r.tolerance)},
                                   {"pass", r.pass ? json(*r.pass) : json(nullptr)}});
    }
    j["failures"] = json::array();
    for (const auto& f : failures) j["failures"].push_back({{"replica", f.replica}, {"message", f.message}});
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text)
{
    RunManifest m;
    try {
        const json j = json::parse(text);
        auto opt = [](const json& v) -> std::optional<double> {
            if (v.is_null()) return std::nullopt;
            return v.get<double>();
        };
        m.version = j.at("version").get<std::string>();
        m.kind = j.at("kind").get<std::string>();
        m.config_echo = j.at("config").get<std::string>();
        m.out_dir = j.at("out_dir").get<std::string>();
        m.started_utc = j.value("started_utc", "");
        m.wall_seconds = j.value("wall_seconds", 0.0);
        m.complete = j.at("complete").get<bool>();
        for (const auto& s : j.at("seeds")) {
            m.seeds.push_back({s.at("replica").get<std::size_t>(), s.at("seed").get<std::uint64_t>(),
                               s.at("stream").get<std::uint64_t>()});
        }
        for (const auto& o : j.at("outputs")) {
            m.outputs.push_back({o.at("file").get<std::string>(), o.at("bytes").get<std::uintmax_t>(),
                                 o.at("sha256").get<std::string>()});
        }
        for (const auto& r : j.at("statistics")) {
            StatRow row;
            row.check = r.at("check").get<std::string>();
            row.target = opt(r.at("target"));
            row.measured = r.at("measured").get<double>();
            row.se = opt(r.at("se"));
            row.tolerance = opt(r.at("tolerance"));
            if (!r.at("pass").is_null()) row.pass = r.at("pass").get<bool>();
            m.rows.push_back(row);
        }
        for (const auto& f : j.value("failures", json::array())) {
            m.failures.push_back({f.at("replica").get<std::size_t>(), f.at("message").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed manifest: {}", e.what()));
    }
    return m;
}

RunManifest load_manifest(const std::string& file)
{
    std::ifstream in(file);
    if (!in) throw InputError(fmt::format("cannot open manifest {}", file));
    std::stringstream buf;
    buf << in.rdbuf();
    RunManifest m = RunManifest::from_json(buf.str());
    // Outputs are resolved next to the manifest, wherever it now lives.
    m.out_dir = fs::path(file).parent_path().string();
    if (m.out_dir.empty()) m.out_dir = ".";
    return m;
}

ExperimentConfig config_from_manifest(const RunManifest& manifest, std::optional<std::string> out_dir)
{
    ExperimentConfig c = parse_config(manifest.config_echo);
    if (out_dir) c.out_dir = *out_dir;
    return c;
}

}  // namespace kpzlab
