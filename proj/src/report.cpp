#include "kpzlab/report.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>

#include <fmt/core.h>

namespace kpzlab {

namespace {

namespace fs = std::filesystem;

std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string opt_text(const std::optional<double>& v, const char* spec = "{}")
{
    return v ? fmt::format(fmt::runtime(spec), *v) : std::string();
}

std::string pass_text(const std::optional<bool>& p)
{
    if (!p) return {};
    return *p ? "true" : "false";
}

void check_inputs(const RunManifest& m)
{
    std::vector<std::string> missing;
    for (const auto& o : m.outputs) {
        if (!fs::exists(fs::path(m.out_dir) / o.name)) missing.push_back(o.name);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& n : missing) list += " " + n;
        throw InputError(fmt::format("report inputs missing from {}:{}", m.out_dir, list));
    }
}

}  // namespace

std::string render_report(const RunManifest& manifest, ReportFormat format)
{
    check_inputs(manifest);
    const std::array<std::string, 6> header{"check", "target", "measured", "se", "tolerance", "pass"};
    std::vector<std::array<std::string, 6>> rows;
    for (const auto& r : manifest.rows) {
        rows.push_back({r.check, opt_text(r.target), fmt::format("{}", r.measured), opt_text(r.se),
                        opt_text(r.tolerance), pass_text(r.pass)});
    }

    std::string out;
    if (format == ReportFormat::Csv) {
        out = "check,target,measured,se,tolerance,pass\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out += (c ? "," : "") + csv_cell(row[c]);
            }
            out += "\n";
        }
        return out;
    }

    // Text table: shorter number formatting, columns padded to width.
    std::vector<std::array<std::string, 6>> cells{header};
    for (const auto& r : manifest.rows) {
        cells.push_back({r.check, opt_text(r.target, "{:.6f}"), fmt::format("{:.6f}", r.measured),
                         opt_text(r.se, "{:.2g}"), opt_text(r.tolerance, "{:.3g}"), pass_text(r.pass)});
    }
    std::array<std::size_t, 6> width{};
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::string line;
        for (std::size_t c = 0; c < 6; ++c) {
            line += fmt::format("{:<{}}", cells[i][c], width[c]);
            if (c + 1 < 6) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
        if (i == 0) {
            std::size_t total = 10;
            for (auto w : width) total += w;
            out += std::string(total, '-') + "\n";
        }
    }
    return out;
}

std::string emit_report(const RunManifest& manifest, ReportFormat format)
{
    const std::string text = render_report(manifest, format);
    const fs::path file =
        fs::path(manifest.out_dir) / (format == ReportFormat::Csv ? "report.csv" : "report.txt");
    std::ofstream out(file);
    out << text;
    if (!out) throw InputError(fmt::format("cannot write {}", file.string()));
    return file.string();
}

}  // namespace kpzlab
