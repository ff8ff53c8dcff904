#include "inflab/harness.hpp"

#include "inflab/errors.hpp"
#include "inflab/experiments.hpp"
#include "inflab/profile.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace inflab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

WaveState smooth_pair(const RunConfig& c, const TorusGrid& grid) {
    if (c.smooth.kind == "band_limited") return band_limited_pair(grid, c.seed, c.smooth.kmax, c.smooth.amplitude);
    return WaveState::zero(grid);
}

SolverConfig solver_config(const RunConfig& c) {
    SolverConfig s;
    s.dt = c.solver.dt;
    s.sigma = c.regime.sigma;
    s.dealias_padding = c.solver.dealias_padding;
    s.nonlinear_cfl = c.solver.nonlinear_cfl;
    s.blowup_guard = c.solver.blowup_guard;
    return s;
}

void fill_evolution(const RunConfig& c, EvolutionOptions& o) {
    o.moll = {c.mollifier.c_moll, c.mollifier.support_radius};
    o.solver = solver_config(c);
    o.steps_per_horizon = c.solver.steps_per_horizon;
    o.time_samples = c.solver.time_samples;
    o.jobs = c.jobs;
}

std::function<double(double)> weight_function(const RunConfig& c) {
    const auto& w = c.coarea.weight;
    if (w == "one") return [](double) { return 1.0; };
    if (w == "zero") return [](double) { return 0.0; };
    const ProfileSolution* p = &shared_profile(c.regime.sigma);
    if (w == "V") return [p](double x) { return p->value(x); };
    return [p](double x) { return p->rate(x); };
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << bytes;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const ExperimentReport& r) {
    json j;
    j["experiment"] = r.experiment;
    j["passed"] = r.passed();
    j["steps"] = r.steps;
    json inputs = json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = number(v);
    j["inputs"] = inputs;
    j["labels"] = r.labels;
    json fitted = json::object();
    for (const auto& [k, v] : r.fitted) fitted[k] = number(v);
    j["fitted"] = fitted;
    json verdicts = json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"name", v.name},
                            {"criterion", v.criterion},
                            {"passed", v.passed},
                            {"applicable", v.applicable},
                            {"detail", v.detail}});
    j["verdicts"] = verdicts;
    j["notes"] = r.notes;
    json tables = json::object();
    for (const auto& [name, t] : r.tables) tables[name] = {{"columns", t.columns}, {"rows", t.rows.size()}};
    j["tables"] = tables;
    return j;
}

// Files this module may have written into a run directory.
void remove_previous_outputs(const fs::path& dir) {
    if (!fs::exists(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto& p = entry.path();
        const auto ext = p.extension().string();
        const auto name = p.filename().string();
        if (ext == ".csv" || ext == ".json" || name == "config.yaml" || name == "FAILED") fs::remove(p);
    }
    if (fs::exists(dir / "plots"))
        for (const auto& entry : fs::directory_iterator(dir / "plots"))
            if (entry.path().extension() == ".svg") fs::remove(entry.path());
}

std::vector<ManifestEntry> hash_outputs(const fs::path& dir) {
    std::vector<ManifestEntry> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == "manifest.json") continue;
        out.push_back({rel, sha256_file(entry.path()), entry.file_size()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return out;
}

RunOutcome write_manifest(const fs::path& dir, const std::string& experiment, const std::string& status,
                          const std::map<std::string, std::vector<std::string>>& columns) {
    RunOutcome out;
    out.directory = dir;
    out.files = hash_outputs(dir);
    json files = json::array();
    for (const auto& f : out.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    json m;
    m["experiment"] = experiment;
    m["status"] = status;
    m["files"] = files;
    m["csv_columns"] = columns;
    const std::string text = m.dump(2) + "\n";
    write_file(dir / "manifest.json", text);
    out.manifest_hash = sha256_hex(text);
    out.completed = status == "completed";
    return out;
}

void write_plots(const std::string& experiment, const Table& summary, const std::map<std::string, double>& inputs,
                 const fs::path& dir) {
    const auto charts = charts_for(experiment, summary, inputs);
    if (charts.empty()) return;
    fs::create_directories(dir / "plots");
    for (const auto& [name, chart] : charts) write_file(dir / "plots" / (name + ".svg"), render_svg(chart));
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

ExperimentReport run_experiment(const RunConfig& c) {
    validate_config(c);
    switch (c.experiment) {
    case ExperimentKind::ProfileCheck: {
        const TorusGrid grid(c.grid.dim, c.grid.n);
        ProfileBoundOptions o;
        o.moll = {c.mollifier.c_moll, c.mollifier.support_radius};
        o.horizon_scale = c.sweep.horizon_scale;
        o.time_samples = c.solver.time_samples;
        o.eps_power = c.sweep.eps_power;
        o.jobs = c.jobs;
        if (c.sweep.eps_power == 2) return run_eps_squared_variant(c.regime, c.sweep.n_list, grid, o);
        return run_profile_bound_check(c.regime, c.sweep.n_list, grid, o);
    }
    case ExperimentKind::CoareaCheck: {
        CoareaOptions o;
        o.dim = c.grid.dim;
        o.rel_tol = c.coarea.rel_tol;
        o.jobs = c.jobs;
        std::vector<double> lambdas;
        const double a = std::log(c.coarea.lambda_min), b = std::log(c.coarea.lambda_max);
        for (int i = 0; i < c.coarea.lambda_count; ++i)
            lambdas.push_back(std::exp(a + (b - a) * i / (c.coarea.lambda_count - 1)));
        return run_coarea_check(weight_function(c), c.coarea.weight, c.regime.sigma, lambdas, o);
    }
    case ExperimentKind::PerturbationCheck: {
        const TorusGrid grid(c.grid.dim, c.grid.n);
        PerturbationOptions o;
        fill_evolution(c, o);
        o.profile_amplitude = c.sweep.profile_amplitude;
        return run_perturbation_check(c.regime, smooth_pair(c, grid), c.sweep.n_list, o);
    }
    case ExperimentKind::FspCheck: {
        FspOptions o;
        o.solver = solver_config(c);
        o.time_samples = c.solver.time_samples;
        o.tolerance = c.fsp.tolerance;
        o.working_n = c.fsp.working_n;
        o.jobs = c.jobs;
        const auto problem = standard_fsp_problem(c.grid.dim, c.seed, c.fsp.r0, c.fsp.bump_amplitude);
        return run_fsp_check(problem, c.grid.dim, c.fsp.grid_sizes, c.fsp.horizon, o);
    }
    case ExperimentKind::InflationSweep: {
        const TorusGrid grid(c.grid.dim, c.grid.n);
        InflationOptions o;
        fill_evolution(c, o);
        o.eps_mode = c.sweep.eps_mode == "fixed" ? EpsMode::Fixed : EpsMode::Shrinking;
        PathologicalDataSpec spec{c.sweep.k_min, c.sweep.k_max, c.sweep.n0};
        return run_inflation_sweep(c.regime, smooth_pair(c, grid), spec, grid, o);
    }
    }
    throw PreconditionViolated("unknown experiment kind");
}

fs::path resolve_output_root(const RunConfig& config, const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (!config.output.directory.empty()) return config.output.directory;
    if (const char* env = std::getenv("INFLATION_LAB_OUT"); env && *env) return env;
    return "inflation_lab_out";
}

RunOutcome write_results(const RunConfig& config, const ExperimentReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    remove_previous_outputs(dir);
    write_file(dir / "config.yaml", serialize_config(config, false));
    std::map<std::string, std::vector<std::string>> columns;
    for (const auto& [name, table] : report.tables) {
        columns[name] = table.columns;
        if (config.output.csv) write_file(dir / (name + ".csv"), table_to_csv(table));
    }
    if (config.output.json) write_file(dir / "summary.json", report_json(report).dump(2) + "\n");
    if (config.output.plots) {
        auto it = report.tables.find("summary");
        if (it != report.tables.end()) write_plots(report.experiment, it->second, report.inputs, dir);
    }
    RunOutcome out = write_manifest(dir, report.experiment, "completed", columns);
    out.passed = report.passed();
    out.report = report;
    return out;
}

RunOutcome run(const RunConfig& config, const fs::path& root) {
    validate_config(config);
    const fs::path dir = root / experiment_name(config.experiment);
    try {
        ExperimentReport report = run_experiment(config);
        return write_results(config, report, dir);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        fs::create_directories(dir);
        remove_previous_outputs(dir);
        write_file(dir / "config.yaml", serialize_config(config, false));
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        RunOutcome out = write_manifest(dir, experiment_name(config.experiment), "failed", {});
        out.error = e.what();
        return out;
    }
}

RunOutcome rerender_report(const fs::path& dir) {
    if (!fs::exists(dir / "manifest.json")) throw PreconditionViolated("no manifest.json in " + dir.string());
    const json manifest = json::parse(read_file(dir / "manifest.json"));
    const std::string experiment = manifest.at("experiment").get<std::string>();
    if (manifest.at("status") != "completed") throw PreconditionViolated("run in " + dir.string() + " did not complete");
    if (!fs::exists(dir / "summary.csv")) throw PreconditionViolated("no summary.csv in " + dir.string());
    const Table summary = table_from_csv(read_file(dir / "summary.csv"));

    std::map<std::string, double> inputs;
    if (fs::exists(dir / "summary.json")) {
        const json s = json::parse(read_file(dir / "summary.json"));
        for (const auto& [k, v] : s.at("inputs").items())
            if (v.is_number()) inputs[k] = v.get<double>();
    } else {
        const RunConfig c = parse_config(dir / "config.yaml");
        inputs = {{"s", c.regime.s}, {"theta", c.regime.theta}, {"sigma", c.regime.sigma}};
    }
    if (fs::exists(dir / "plots"))
        for (const auto& entry : fs::directory_iterator(dir / "plots"))
            if (entry.path().extension() == ".svg") fs::remove(entry.path());
    write_plots(experiment, summary, inputs, dir);
    std::map<std::string, std::vector<std::string>> columns =
        manifest.at("csv_columns").get<std::map<std::string, std::vector<std::string>>>();
    RunOutcome out = write_manifest(dir, experiment, "completed", columns);
    if (fs::exists(dir / "summary.json"))
        out.passed = json::parse(read_file(dir / "summary.json")).at("passed").get<bool>();
    else
        out.passed = true;
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string table_to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += "\n";
    char buf[40];
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out += (i ? "," : "");
            out += buf;
        }
        out += "\n";
    }
    return out;
}

Table table_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line) || line.empty()) throw ParseError("CSV has no header row", 1, 1);
    Table t(split(line));
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.columns.size())
            throw ParseError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(t.columns.size()),
                             line_no, 1);
        std::vector<double> row;
        int col = 1;
        for (const auto& cell : cells) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || *end != '\0') throw ParseError("non-numeric CSV cell '" + cell + "'", line_no, col);
            row.push_back(v);
            col += static_cast<int>(cell.size()) + 1;
        }
        t.add_row(std::move(row));
    }
    return t;
}

std::string render_svg(const ChartSpec& chart) {
    constexpr double W = 640, H = 400, left = 80, right = 20, top = 40, bottom = 60;
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!chart.log_x || x > 0) && (!chart.log_y || y > 0);
    };
    auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
    auto ty = [&](double y) { return chart.log_y ? std::log10(y) : y; };

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto extend = [&](const std::vector<double>& ys) {
        for (std::size_t i = 0; i < chart.x.size() && i < ys.size(); ++i) {
            if (!usable(chart.x[i], ys[i])) continue;
            x0 = std::min(x0, tx(chart.x[i]));
            x1 = std::max(x1, tx(chart.x[i]));
            y0 = std::min(y0, ty(ys[i]));
            y1 = std::max(y1, ty(ys[i]));
        }
    };
    extend(chart.y);
    extend(chart.reference);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(chart.title)
        << "</text>\n";
    if (!(x0 <= x1)) {
        svg << "<text x=\"" << W / 2 << "\" y=\"" << H / 2 << "\" text-anchor=\"middle\">no plottable data</text>\n";
        svg << "</svg>\n";
        return svg.str();
    }
    if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
        const double pad = std::max(0.5, 0.1 * std::abs(y0));
        y0 -= pad;
        y1 += pad;
    }
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (ty(y) - y0) / (y1 - y0) * ph; };

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double vx = chart.log_x ? std::pow(10.0, fx) : fx, vy = chart.log_y ? std::pow(10.0, fy) : fy;
        const double sx = left + pw * i / 4.0, sy = top + ph - ph * i / 4.0;
        svg << "<line x1=\"" << sx << "\" y1=\"" << top + ph << "\" x2=\"" << sx << "\" y2=\"" << top + ph + 5
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << sx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt_tick(vx)
            << "</text>\n";
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\"" << sy
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << fmt_tick(vy)
            << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
        << xml_escape(chart.x_label + (chart.log_x ? " (log)" : "")) << "</text>\n";
    svg << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << xml_escape(chart.y_label + (chart.log_y ? " (log)" : "")) << "</text>\n";

    auto polyline = [&](const std::vector<double>& ys, const char* style) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < chart.x.size() && i < ys.size(); ++i)
            if (usable(chart.x[i], ys[i])) pts << px(chart.x[i]) << ',' << py(ys[i]) << ' ';
        svg << "<polyline fill=\"none\" " << style << " points=\"" << pts.str() << "\"/>\n";
    };
    if (!chart.reference.empty()) {
        polyline(chart.reference, "stroke=\"#c0392b\" stroke-dasharray=\"6,4\"");
        svg << "<text x=\"" << left + pw - 4 << "\" y=\"" << top + 16 << "\" text-anchor=\"end\" fill=\"#c0392b\">"
            << xml_escape(chart.reference_label) << "</text>\n";
    }
    polyline(chart.y, "stroke=\"#1f4e79\" stroke-width=\"2\"");
    for (std::size_t i = 0; i < chart.x.size() && i < chart.y.size(); ++i)
        if (usable(chart.x[i], chart.y[i]))
            svg << "<circle cx=\"" << px(chart.x[i]) << "\" cy=\"" << py(chart.y[i])
                << "\" r=\"3.5\" fill=\"#1f4e79\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::pair<std::string, ChartSpec>> charts_for(const std::string& experiment, const Table& t,
                                                          const std::map<std::string, double>& inputs) {
    std::vector<std::pair<std::string, ChartSpec>> out;
    auto has = [&](const std::string& c) { return std::find(t.columns.begin(), t.columns.end(), c) != t.columns.end(); };
    auto input = [&](const std::string& k) {
        auto it = inputs.find(k);
        return it == inputs.end() ? 0.0 : it->second;
    };
    auto chart = [&](const std::string& xcol, const std::string& ycol, bool log_x, bool log_y) {
        ChartSpec c;
        c.title = ycol + " vs " + xcol;
        c.x_label = xcol;
        c.y_label = ycol;
        c.x = t.column(xcol);
        c.y = t.column(ycol);
        c.log_x = log_x;
        c.log_y = log_y;
        return c;
    };
    // Reference curve C·x^p anchored at the first finite measured point.
    auto power_reference = [](ChartSpec& c, double p, const std::string& label) {
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (!(std::isfinite(c.y[i]) && c.y[i] > 0 && c.x[i] > 0)) continue;
            const double C = c.y[i] / std::pow(c.x[i], p);
            for (double x : c.x) c.reference.push_back(C * std::pow(x, p));
            c.reference_label = label;
            return;
        }
    };

    if (experiment == "profile-bound" || experiment == "eps-squared-variant") {
        for (const char* y : {"ratio1", "ratio2_h0", "ratio2_h1", "ratio2_h2", "ratio3", "ratio4", "hs_norm"})
            if (has("n") && has(y)) out.emplace_back(y, chart("n", y, true, true));
    } else if (experiment == "coarea") {
        if (has("lambda") && has("g")) out.emplace_back("g", chart("lambda", "g", true, true));
    } else if (experiment == "perturbation") {
        const double s = input("s"), theta = input("theta");
        const std::pair<const char*, double> nu[] = {{"h0", 0.0}, {"h1", 1.0}, {"h2", 2.0}, {"hs", s}};
        for (const auto& [tag, v] : nu) {
            const std::string sup = std::string("sup_w_") + tag, resc = std::string("rescaled_") + tag;
            if (has("n") && has(sup)) {
                auto c = chart("n", sup, true, true);
                power_reference(c, (v - s) - theta, "n^((nu-s)-theta)");
                out.emplace_back(sup, c);
            }
            if (has("n") && has(resc)) out.emplace_back(resc, chart("n", resc, true, true));
        }
    } else if (experiment == "fsp") {
        if (has("N") && has("discrepancy")) out.emplace_back("discrepancy", chart("N", "discrepancy", true, true));
    } else if (experiment == "inflation-sweep") {
        if (has("k") && has("sup_hs")) out.emplace_back("sup_hs", chart("k", "sup_hs", false, true));
        if (has("k") && has("local_hs") && has("predicted")) {
            auto c = chart("k", "local_hs", false, true);
            const double s = input("s");
            const auto pred = t.column("predicted");
            const auto k = t.column("k");
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                if (!(std::isfinite(c.y[i]) && c.y[i] > 0)) continue;
                // Predicted rate is for r_k^s times the local norm, r_k = 1/k^3.
                const double anchor = c.y[i] / (pred[i] * std::pow(k[i], 3.0 * s));
                for (std::size_t j = 0; j < k.size(); ++j) c.reference.push_back(anchor * pred[j] * std::pow(k[j], 3.0 * s));
                c.reference_label = "predicted rate";
                break;
            }
            out.emplace_back("local_hs", c);
        }
        if (has("k") && has("local_over_predicted"))
            out.emplace_back("local_over_predicted", chart("k", "local_over_predicted", false, true));
    }
    return out;
}

} // namespace inflab
