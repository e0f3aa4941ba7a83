#include "perfhom/report_io.hpp"

#include "perfhom/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace perfhom::io {

namespace {

std::string header_line(int n) {
    std::string s;
    for (int i = 0; i <= n; ++i) s += "," + std::to_string(i);
    s += '\n';
    return s;
}

template <class Format>
std::string field_csv(const ScalarField& field, Format&& format) {
    const int n = field.grid().n();
    std::string out = header_line(n);
    char buf[64];
    for (int j = 0; j <= n; ++j) {
        out += std::to_string(j);
        for (int i = 0; i <= n; ++i) {
            out += ',';
            format(buf, sizeof buf, field(i, j));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

// JSON has no NaN; non-finite values become null.
nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

std::string table_csv_rounded(const ScalarField& field) {
    return field_csv(field, [](char* buf, std::size_t size, double v) {
        double r = round_half_away(v, 3);
        if (r == 0.0) r = 0.0;  // no "-0.000"
        std::snprintf(buf, size, "%.3f", r);
    });
}

std::string field_csv_full(const ScalarField& field) {
    return field_csv(field, [](char* buf, std::size_t size, double v) { std::snprintf(buf, size, "%.17g", v); });
}

ScalarField parse_field_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != ',')
        throw InvalidConfig("field CSV: missing header line");
    int columns = 0;
    for (char c : line) columns += c == ',' ? 1 : 0;
    const int n = columns - 1;
    if (n < 2) throw InvalidConfig("field CSV: need at least 3 columns");
    const Grid2D grid(n);
    ScalarField field(grid);
    for (int j = 0; j <= n; ++j) {
        if (!std::getline(in, line)) throw InvalidConfig("field CSV: expected " + std::to_string(n + 1) + " rows");
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        if (cell != std::to_string(j)) throw InvalidConfig("field CSV: row " + std::to_string(j) + " mislabelled");
        for (int i = 0; i <= n; ++i) {
            if (!std::getline(row, cell, ',')) throw InvalidConfig("field CSV: short row " + std::to_string(j));
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw InvalidConfig("field CSV: bad number '" + cell + "'");
            }
            if (used != cell.size() || !std::isfinite(v)) throw InvalidConfig("field CSV: bad number '" + cell + "'");
            field(i, j) = v;
        }
        if (std::getline(row, cell, ',')) throw InvalidConfig("field CSV: long row " + std::to_string(j));
    }
    while (std::getline(in, line))
        if (!line.empty()) throw InvalidConfig("field CSV: trailing data");
    return field;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScalarField read_field_csv(const std::filesystem::path& path) { return parse_field_csv(read_file(path)); }

std::string trace_csv(const IterationTrace& trace) {
    std::string out = "iteration,delta\n";
    char buf[64];
    for (const auto& [k, delta] : emit_trace(trace)) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", k, delta);
        out += buf;
    }
    return out;
}

std::string table_text(const ScalarField& rounded) {
    const int n = rounded.grid().n();
    std::string out = "    ";
    char buf[32];
    for (int i = 0; i <= n; ++i) {
        std::snprintf(buf, sizeof buf, "%8d", i);
        out += buf;
    }
    out += '\n';
    for (int j = 0; j <= n; ++j) {
        std::snprintf(buf, sizeof buf, "%4d", j);
        out += buf;
        for (int i = 0; i <= n; ++i) {
            std::snprintf(buf, sizeof buf, "%8.3f", round_half_away(rounded(i, j), 3));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

nlohmann::json trace_json(const IterationTrace& trace) {
    return {{"iterations", trace.iterations},
            {"converged", trace.converged},
            {"final_ratio", number_or_null(trace.final_ratio)},
            {"final_delta", trace.deltas.empty() ? nlohmann::json(nullptr) : nlohmann::json(trace.deltas.back())}};
}

nlohmann::json sweep_json(const SweepResult& result, const SweepConfig& config, bool include_timings) {
    nlohmann::json eps = nlohmann::json::array();
    for (int m : config.cells_per_side) eps.push_back("1/" + std::to_string(m));
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = {{"eps_list", eps},
                   {"c0", config.c0},
                   {"n", config.n},
                   {"t_boundary", config.t_boundary},
                   {"baseline_mu0", config.baseline_mu0},
                   {"jobs", config.jobs},
                   {"stop_tol", config.tol.stop_tol},
                   {"max_iter", config.tol.max_iter},
                   {"cg_rel_tol", config.tol.cg_rel_tol},
                   {"jacobi", config.tol.jacobi},
                   {"mg",
                    {{"pre_smooth", config.tol.mg.pre_smooth},
                     {"post_smooth", config.tol.mg.post_smooth},
                     {"max_cycles", config.tol.mg.max_cycles},
                     {"target_residual_linf", config.tol.mg.target_residual_linf},
                     {"coarsest_n", config.tol.mg.coarsest_n}}}};
    j["mu"] = result.mu;
    j["homogenized"] = trace_json(result.homogenized_trace);
    if (include_timings) j["homogenized"]["runtime_seconds"] = result.homogenized_runtime_seconds;

    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.records) {
        nlohmann::json rec = {{"epsilon", "1/" + std::to_string(r.cells_per_side)},
                              {"epsilon_value", r.epsilon},
                              {"radius", r.radius},
                              {"hole_count", r.hole_count},
                              {"n", r.n},
                              {"ok", r.ok}};
        if (r.ok) {
            rec["discrepancy_l2h"] = r.discrepancy_l2h;
            rec["discrepancy_linf"] = r.discrepancy_linf;
            rec["h1_norm_extended"] = r.h1_norm_extended;
            rec["cg_iterations"] = r.cg_iterations;
            if (r.baseline_discrepancy_l2h) {
                rec["baseline_mu0"] = {{"discrepancy_l2h", *r.baseline_discrepancy_l2h},
                                       {"discrepancy_linf", *r.baseline_discrepancy_linf}};
            }
        } else {
            rec["error"] = r.error;
        }
        if (include_timings) rec["runtime_seconds"] = r.runtime_seconds;
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    return j;
}

nlohmann::json table_checks_json(const TableChecks& c) {
    return {{"boundary_all_ten", c.boundary_all_ten},
            {"eightfold_symmetric", c.eightfold_symmetric},
            {"center_is_unique_max", c.center_is_unique_max},
            {"rounded_max_block_centered", c.rounded_max_block_centered},
            {"interior_in_range", c.interior_in_range},
            {"all_passed", c.all()},
            {"messages", c.messages}};
}

nlohmann::json calibration_json(const CalibrationReport& rep) {
    nlohmann::json conv = nlohmann::json::array();
    for (const auto& c : rep.conventions)
        conv.push_back({{"name", c.name},
                        {"description", c.description},
                        {"mu_effective", c.mu_effective},
                        {"source_scale", c.source_scale},
                        {"method", c.method},
                        {"center_value", c.center_value},
                        {"linf_deviation", c.linf_deviation},
                        {"center_deviation", c.center_deviation}});
    return {{"version", kVersion},
            {"conventions", conv},
            {"best", rep.best},
            {"best_beats_default", rep.best_beats_default},
            {"self_deviation", rep.self_deviation},
            {"stop_tol_sensitivity",
             {{"loose", rep.stop_tol_loose},
              {"tight", rep.stop_tol_tight},
              {"rounded_cells_changed", rep.rounded_cells_changed},
              {"max_abs_change", rep.max_abs_change}}}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidConfig("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw InvalidConfig("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace perfhom::io
