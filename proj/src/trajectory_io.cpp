#include "kpzlab/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/format.h>

namespace kpzlab {

namespace {

constexpr std::array<char, 4> kMagic{'K', 'P', 'Z', 'T'};
constexpr std::uint64_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void str(const std::string& s)
    {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void reals(const std::vector<double>& v)
    {
        u64(v.size());
        out_.write(reinterpret_cast<const char*>(v.data()),
                   static_cast<std::streamsize>(v.size() * sizeof(double)));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}
    std::uint64_t u64()
    {
        std::uint64_t v = 0;
        raw(&v, sizeof v);
        return v;
    }
    double f64()
    {
        double v = 0;
        raw(&v, sizeof v);
        return v;
    }
    std::string str()
    {
        std::string s(bounded(u64(), 1), '\0');
        raw(s.data(), s.size());
        return s;
    }
    std::vector<double> reals()
    {
        std::vector<double> v(bounded(u64(), sizeof(double)));
        raw(v.data(), v.size() * sizeof(double));
        return v;
    }

private:
    static std::size_t bounded(std::uint64_t n, std::size_t width)
    {
        if (n > (std::uint64_t{1} << 40) / width) {
            throw InputError("trajectory file: implausible length field");
        }
        return static_cast<std::size_t>(n);
    }
    void raw(void* dst, std::size_t bytes)
    {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (static_cast<std::size_t>(in_.gcount()) != bytes) {
            throw InputError("trajectory file: truncated");
        }
    }
    std::istream& in_;
};

void write_grid(Writer& w, const GridSpec& g)
{
    w.f64(g.x_min());
    w.f64(g.x_max());
    w.u64(g.nx());
    w.f64(g.t_start());
    w.f64(g.t_end());
    w.u64(g.nt());
    w.u64(g.guard_overridden() ? 1 : 0);
}

GridSpec read_grid(Reader& r)
{
    const double x0 = r.f64();
    const double x1 = r.f64();
    const auto nx = r.u64();
    const double t0 = r.f64();
    const double t1 = r.f64();
    const auto nt = r.u64();
    GridOptions opt;
    opt.override_boundary_guard = r.u64() != 0;
    return make_grid(x0, x1, nx, t0, t1, nt, opt);
}

void write_ic(Writer& w, const InitialDatum& ic)
{
    w.u64(static_cast<std::uint64_t>(ic.kind));
    w.f64(ic.t0);
    w.u64(ic.brownian_seed);
    if (ic.kind != InitialKind::FunctionIC || !ic.function) {
        w.u64(0);
        return;
    }
    if (const auto* e = std::get_if<Expression>(&*ic.function)) {
        w.u64(1);
        w.str(e->text());
    } else {
        const auto& table = std::get<SampleTable>(*ic.function);
        w.u64(2);
        w.reals(table.xs());
        w.reals(table.fs());
    }
}

InitialDatum read_ic(Reader& r)
{
    const auto kind = r.u64();
    const double t0 = r.f64();
    const auto bseed = r.u64();
    const auto tag = r.u64();
    switch (kind) {
    case static_cast<std::uint64_t>(InitialKind::NarrowWedge):
        return InitialDatum::narrow_wedge(t0);
    case static_cast<std::uint64_t>(InitialKind::BrownianIC):
        return InitialDatum::brownian(bseed);
    case static_cast<std::uint64_t>(InitialKind::FunctionIC):
        if (tag == 1) return InitialDatum::from_expression(r.str());
        if (tag == 2) {
            auto xs = r.reals();
            auto fs = r.reals();
            return InitialDatum::from_function(SampleTable(std::move(xs), std::move(fs)));
        }
        break;
    default:
        break;
    }
    throw InputError("trajectory file: unknown initial datum encoding");
}

void write_path(Writer& w, const Path& p)
{
    w.f64(p.t0);
    w.f64(p.dt);
    w.reals(p.values);
}

Path read_path(Reader& r)
{
    Path p;
    p.t0 = r.f64();
    p.dt = r.f64();
    p.values = r.reals();
    return p;
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    out.write(kMagic.data(), kMagic.size());
    Writer w(out);
    w.u64(kVersion);
    write_grid(w, traj.grid);
    write_ic(w, traj.ic);
    w.u64(traj.seed);
    w.u64(traj.stream_id);
    w.u64(traj.mode == SolveMode::Multiplicative ? 0 : 1);
    write_path(w, traj.origin_path);
    write_path(w, traj.origin_log_path);
    w.u64(traj.snapshots.size());
    for (const auto& s : traj.snapshots) {
        w.f64(s.t_abs);
        w.f64(s.log_scale);
        w.reals(s.values);
    }
    if (!out) throw InputError("trajectory: write failed");
}

Trajectory read_trajectory(std::istream& in)
{
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kMagic) throw InputError("trajectory file: bad magic");
    Reader r(in);
    if (const auto v = r.u64(); v != kVersion) {
        throw InputError(fmt::format("trajectory file: unsupported version {}", v));
    }
    Trajectory t;
    t.grid = read_grid(r);
    t.ic = read_ic(r);
    t.seed = r.u64();
    t.stream_id = r.u64();
    t.mode = r.u64() == 0 ? SolveMode::Multiplicative : SolveMode::Additive;
    t.origin_path = read_path(r);
    t.origin_log_path = read_path(r);
    const auto n = r.u64();
    for (std::uint64_t k = 0; k < n; ++k) {
        FieldState s;
        s.grid = t.grid;
        s.mode = t.mode;
        s.t_abs = r.f64();
        s.log_scale = r.f64();
        s.values = r.reals();
        if (s.values.size() != t.grid.nx()) throw InputError("trajectory file: bad snapshot length");
        t.snapshots.push_back(std::move(s));
    }
    return t;
}

void save_trajectory(const std::string& file, const Trajectory& traj)
{
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot open {} for writing", file));
    write_trajectory(out, traj);
}

Trajectory load_trajectory(const std::string& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot open {}", file));
    return read_trajectory(in);
}

void write_paths_csv(std::ostream& out, const std::vector<Path>& paths,
                     const std::vector<std::size_t>& ids)
{
    if (ids.size() != paths.size()) throw InputError("write_paths_csv: one id per path required");
    out << "replica,t,value\n";
    std::string line;
    for (std::size_t r = 0; r < paths.size(); ++r) {
        const Path& p = paths[r];
        for (std::size_t k = 0; k < p.size(); ++k) {
            line.clear();
            fmt::format_to(std::back_inserter(line), "{},{},{}\n", ids[r], p.time(k), p.values[k]);
            out << line;
        }
    }
}

void write_paths_csv(std::ostream& out, const std::vector<Path>& paths)
{
    std::vector<std::size_t> ids(paths.size());
    for (std::size_t r = 0; r < ids.size(); ++r) ids[r] = r;
    write_paths_csv(out, paths, ids);
}

void save_paths_csv(const std::string& file, const std::vector<Path>& paths)
{
    std::ofstream out(file);
    if (!out) throw InputError(fmt::format("cannot open {} for writing", file));
    write_paths_csv(out, paths);
}

std::vector<Path> read_paths_csv(std::istream& in)
{
    std::map<std::size_t, std::vector<std::pair<double, double>>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("replica", 0) == 0) continue;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string a, b, c;
        if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') ||
            !std::getline(fields, c)) {
            throw InputError(fmt::format("paths csv line {}: expected 3 columns", lineno));
        }
        try {
            rows[std::stoull(a)].emplace_back(std::stod(b), std::stod(c));
        } catch (const std::exception&) {
            throw InputError(fmt::format("paths csv line {}: malformed number", lineno));
        }
    }
    std::vector<Path> out;
    for (auto& [replica, pts] : rows) {
        (void)replica;
        Path p;
        p.t0 = pts.front().first;
        p.dt = pts.size() > 1 ? pts[1].first - pts[0].first : 1.0;
        for (const auto& pt : pts) p.values.push_back(pt.second);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace kpzlab
