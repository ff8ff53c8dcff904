#include "inflab/config.hpp"

#include "inflab/errors.hpp"
#include "inflab/profile.hpp"
#include "inflab/torus_grid.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace inflab {

namespace {

struct NamedKind {
    ExperimentKind kind;
    const char* name;
};

constexpr NamedKind kKinds[] = {
    {ExperimentKind::ProfileCheck, "profile-check"},
    {ExperimentKind::CoareaCheck, "coarea-check"},
    {ExperimentKind::PerturbationCheck, "perturbation-check"},
    {ExperimentKind::FspCheck, "fsp-check"},
    {ExperimentKind::InflationSweep, "inflation-sweep"},
};

std::string where(const YAML::Node& node) {
    const auto m = node.Mark();
    if (m.line < 0) return "";
    return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

// Reads one mapping, recording type errors and unknown keys instead of throwing.
class Section {
public:
    Section(const YAML::Node& node, std::string path, std::vector<std::string>& errors)
        : node_(node), path_(std::move(path)), errors_(errors) {
        if (node_ && !node_.IsMap()) {
            errors_.push_back(path_ + ": expected a mapping" + where(node_));
            node_ = YAML::Node();
        }
    }
    ~Section() {
        if (!node_) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) errors_.push_back(key_path(key) + ": unknown key" + where(kv.first));
        }
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!node_ || !node_[key]) return;
        const YAML::Node v = node_[key];
        try {
            if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
                if (!v.IsSequence()) throw YAML::BadConversion(v.Mark());
            } else {
                if (!v.IsScalar()) throw YAML::BadConversion(v.Mark());
            }
            out = v.as<T>();
        } catch (const YAML::BadConversion&) {
            errors_.push_back(key_path(key) + ": expected " + type_name<T>() + where(v));
        }
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        return Section(node_ ? node_[key] : YAML::Node(), key_path(key), errors_);
    }

private:
    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    static std::string type_name() {
        if constexpr (std::is_same_v<T, bool>) return "true or false";
        else if constexpr (std::is_integral_v<T>) return "an integer";
        else if constexpr (std::is_floating_point_v<T>) return "a number";
        else if constexpr (std::is_same_v<T, std::string>) return "a string";
        else return "a list of numbers";
    }

    YAML::Node node_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

RunConfig read_config(const YAML::Node& root) {
    std::vector<std::string> errors;
    RunConfig c;
    {
        Section top(root, "", errors);
        std::string name = experiment_name(c.experiment);
        top.get("experiment", name);
        try {
            c.experiment = experiment_from_name(name);
        } catch (const PreconditionViolated& e) {
            errors.push_back(std::string("experiment: ") + e.what());
        }
        top.get("seed", c.seed);
        top.get("jobs", c.jobs);
        {
            auto r = top.child("regime");
            r.get("s", c.regime.s);
            r.get("sigma", c.regime.sigma);
            r.get("delta1", c.regime.delta1);
            r.get("delta2", c.regime.delta2);
            r.get("theta", c.regime.theta);
        }
        {
            auto g = top.child("grid");
            g.get("dim", c.grid.dim);
            g.get("N", c.grid.n);
        }
        {
            auto s = top.child("solver");
            s.get("dt", c.solver.dt);
            s.get("dealias_padding", c.solver.dealias_padding);
            s.get("nonlinear_cfl", c.solver.nonlinear_cfl);
            s.get("blowup_guard", c.solver.blowup_guard);
            s.get("steps_per_horizon", c.solver.steps_per_horizon);
            s.get("time_samples", c.solver.time_samples);
        }
        {
            auto m = top.child("mollifier");
            m.get("c_moll", c.mollifier.c_moll);
            m.get("support_radius", c.mollifier.support_radius);
        }
        {
            auto s = top.child("sweep");
            s.get("n_list", c.sweep.n_list);
            s.get("k_min", c.sweep.k_min);
            s.get("k_max", c.sweep.k_max);
            s.get("n0", c.sweep.n0);
            s.get("eps_power", c.sweep.eps_power);
            s.get("horizon_scale", c.sweep.horizon_scale);
            s.get("eps_mode", c.sweep.eps_mode);
            s.get("profile_amplitude", c.sweep.profile_amplitude);
        }
        {
            auto s = top.child("smooth");
            s.get("kind", c.smooth.kind);
            s.get("kmax", c.smooth.kmax);
            s.get("amplitude", c.smooth.amplitude);
        }
        {
            auto s = top.child("coarea");
            s.get("weight", c.coarea.weight);
            s.get("lambda_min", c.coarea.lambda_min);
            s.get("lambda_max", c.coarea.lambda_max);
            s.get("lambda_count", c.coarea.lambda_count);
            s.get("rel_tol", c.coarea.rel_tol);
        }
        {
            auto s = top.child("fsp");
            s.get("grid_sizes", c.fsp.grid_sizes);
            s.get("horizon", c.fsp.horizon);
            s.get("r0", c.fsp.r0);
            s.get("bump_amplitude", c.fsp.bump_amplitude);
            s.get("tolerance", c.fsp.tolerance);
            s.get("working_n", c.fsp.working_n);
        }
        {
            auto o = top.child("output");
            o.get("directory", c.output.directory);
            o.get("csv", c.output.csv);
            o.get("json", c.output.json);
            o.get("plots", c.output.plots);
        }
    }
    if (!errors.empty()) throw ValidationError(errors);
    return c;
}

void check_resolvable(double n, const RunConfig& c, const std::string& what, std::vector<std::string>& out) {
    const double h = 2.0 * std::numbers::pi / c.grid.n;
    if ((2.0 / n) / h < kMinCellsAcrossBump)
        out.push_back(what + " = " + std::to_string(n) + " is unresolvable at N = " + std::to_string(c.grid.n) +
                      " (bump diameter 2/n spans fewer than " + std::to_string(int(kMinCellsAcrossBump)) + " cells)");
}

void check_regime(const RunConfig& c, std::vector<std::string>& out) {
    const auto r = validate_regime(c.regime.s, c.regime.sigma);
    for (const auto& why : r.reasons) out.push_back("regime: " + why);
    if (!r.valid && r.reasons.empty()) out.push_back("regime: (s, sigma) outside the admissible window");
    if (!(c.regime.delta1 > 0.0 && c.regime.delta1 < c.regime.delta2 && c.regime.delta2 < 1.0))
        out.push_back("regime: need 0 < delta1 < delta2 < 1");
}

void check_n_list(const RunConfig& c, std::vector<std::string>& out) {
    const auto& n = c.sweep.n_list;
    if (n.empty()) out.push_back("sweep.n_list: must not be empty");
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] >= 3.0)) out.push_back("sweep.n_list: entries must be >= 3");
        else check_resolvable(n[i], c, "sweep.n_list entry n", out);
        if (i > 0 && !(n[i] > n[i - 1])) out.push_back("sweep.n_list: must be strictly increasing");
    }
}

void check_smooth(const RunConfig& c, std::vector<std::string>& out) {
    if (c.smooth.kind != "zero" && c.smooth.kind != "band_limited")
        out.push_back("smooth.kind: must be zero or band_limited, got " + c.smooth.kind);
    if (c.smooth.kind == "band_limited") {
        if (c.smooth.kmax < 1 || 2 * c.smooth.kmax >= c.grid.n)
            out.push_back("smooth.kmax: must satisfy 1 <= kmax < N/2");
        if (!(c.smooth.amplitude >= 0.0)) out.push_back("smooth.amplitude: must be >= 0");
    }
}

void check_pathological(const RunConfig& c, std::vector<std::string>& out) {
    if (c.sweep.k_min < 1 || c.sweep.k_max < c.sweep.k_min) {
        out.push_back("sweep: need 1 <= k_min <= k_max");
        return;
    }
    if (!(c.sweep.n0 > 0.0)) {
        out.push_back("sweep.n0: must be positive");
        return;
    }
    if (c.sweep.eps_mode != "shrinking" && c.sweep.eps_mode != "fixed")
        out.push_back("sweep.eps_mode: must be shrinking or fixed, got " + c.sweep.eps_mode);
    auto n_of = [&](int k) { return c.sweep.n0 * std::pow(2.0, k); };
    for (int k = c.sweep.k_min; k <= c.sweep.k_max; ++k) {
        const double n = n_of(k);
        if (n < 3.0) {
            out.push_back("sweep: n_k = " + std::to_string(n) + " < 3 at k = " + std::to_string(k));
            continue;
        }
        check_resolvable(n, c, "sweep: n_k at k = " + std::to_string(k) + ", n", out);
        const double r = 1.0 / (double(k) * k * k);
        const double eps = c.mollifier.c_moll / n;
        if (r < 1.0 / n + c.mollifier.support_radius * eps)
            out.push_back("sweep: mollified bump k = " + std::to_string(k) + " leaves its ball of radius 1/k^3");
        for (int j = k + 1; j <= c.sweep.k_max; ++j) {
            const double gap = 1.0 / k - 1.0 / j - 1.0 / n - 1.0 / n_of(j);
            if (gap <= 0.0)
                out.push_back("sweep: bumps k = " + std::to_string(k) + " and k = " + std::to_string(j) + " overlap");
        }
    }
}

} // namespace

std::string experiment_name(ExperimentKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.name;
    throw PreconditionViolated("unknown experiment kind");
}

ExperimentKind experiment_from_name(const std::string& name) {
    for (const auto& k : kKinds)
        if (name == k.name) return k.kind;
    std::string known;
    for (const auto& k : kKinds) known += std::string(known.empty() ? "" : ", ") + k.name;
    throw PreconditionViolated("unknown experiment '" + name + "' (known: " + known + ")");
}

RunConfig parse_config_text(const std::string& text, bool validate) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ParseError("top level must be a mapping", 1, 1);
    RunConfig c = read_config(root);
    if (validate) validate_config(c);
    return c;
}

RunConfig parse_config(const std::string& path, bool validate) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path, 0, 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), validate);
}

std::vector<std::string> validation_errors(const RunConfig& c) {
    std::vector<std::string> out;
    if (c.jobs < 1) out.push_back("jobs: must be >= 1");
    if (c.grid.dim < 1 || c.grid.dim > 3) out.push_back("grid.dim: must be 1, 2 or 3");
    if (c.grid.n < 8 || c.grid.n % 2 != 0) out.push_back("grid.N: must be even and >= 8");
    if (!(c.solver.dt > 0.0)) out.push_back("solver.dt: must be positive");
    if (!(c.solver.dealias_padding >= 1.0)) out.push_back("solver.dealias_padding: must be >= 1");
    if (!(c.solver.nonlinear_cfl > 0.0)) out.push_back("solver.nonlinear_cfl: must be positive");
    if (!(c.solver.blowup_guard >= 0.0)) out.push_back("solver.blowup_guard: must be >= 0 (0 selects the default)");
    if (c.solver.steps_per_horizon < 1) out.push_back("solver.steps_per_horizon: must be >= 1");
    if (c.solver.time_samples < 1) out.push_back("solver.time_samples: must be >= 1");
    if (!(c.mollifier.c_moll > 0.0)) out.push_back("mollifier.c_moll: must be positive");
    if (!(c.mollifier.support_radius > 0.0 && c.mollifier.support_radius <= 1.0))
        out.push_back("mollifier.support_radius: must lie in (0, 1]");
    check_regime(c, out);
    const bool grid_ok = c.grid.n >= 8 && c.grid.n % 2 == 0;

    switch (c.experiment) {
    case ExperimentKind::ProfileCheck:
        if (grid_ok) check_n_list(c, out);
        if (c.sweep.eps_power != 1 && c.sweep.eps_power != 2) out.push_back("sweep.eps_power: must be 1 or 2");
        if (c.sweep.eps_power == 2 && c.regime.sigma < 1.0)
            out.push_back("sweep.eps_power: the squared mollification scale needs sigma >= 1");
        if (!(c.sweep.horizon_scale >= 0.0)) out.push_back("sweep.horizon_scale: must be >= 0");
        break;
    case ExperimentKind::CoareaCheck:
        if (c.coarea.weight != "dV" && c.coarea.weight != "V" && c.coarea.weight != "one" && c.coarea.weight != "zero")
            out.push_back("coarea.weight: must be dV, V, one or zero, got " + c.coarea.weight);
        if (!(c.coarea.lambda_min > 0.0 && c.coarea.lambda_max > c.coarea.lambda_min))
            out.push_back("coarea: need 0 < lambda_min < lambda_max");
        if (c.coarea.lambda_count < 2) out.push_back("coarea.lambda_count: must be >= 2");
        if (!(c.coarea.rel_tol > 0.0)) out.push_back("coarea.rel_tol: must be positive");
        break;
    case ExperimentKind::PerturbationCheck:
        if (grid_ok) check_n_list(c, out);
        if (!validate_theta(c.regime.s, c.regime.sigma, c.regime.theta))
            out.push_back("regime.theta: must satisfy 0 < theta < " +
                          std::to_string(theta_upper_bound(c.regime.s, c.regime.sigma)));
        if (!(c.sweep.profile_amplitude >= 0.0)) out.push_back("sweep.profile_amplitude: must be >= 0");
        check_smooth(c, out);
        break;
    case ExperimentKind::FspCheck: {
        const auto& g = c.fsp.grid_sizes;
        if (g.empty()) out.push_back("fsp.grid_sizes: must not be empty");
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] < 8 || g[i] % 2 != 0) out.push_back("fsp.grid_sizes: entries must be even and >= 8");
            if (i > 0 && g[i] <= g[i - 1]) out.push_back("fsp.grid_sizes: must be strictly increasing");
        }
        if (std::find(g.begin(), g.end(), c.fsp.working_n) == g.end())
            out.push_back("fsp.working_n: must be one of fsp.grid_sizes");
        if (!(c.fsp.horizon >= 0.0)) out.push_back("fsp.horizon: must be >= 0");
        if (!(c.fsp.r0 > 0.0 && c.fsp.r0 < std::numbers::pi - 0.2)) out.push_back("fsp.r0: must lie in (0, pi - 0.2)");
        if (!(c.fsp.tolerance > 0.0)) out.push_back("fsp.tolerance: must be positive");
        break;
    }
    case ExperimentKind::InflationSweep: {
        const auto d = validate_inflation_deltas(c.regime.s, c.regime.sigma, c.regime.delta1, c.regime.delta2);
        if (!d.valid) out.push_back("regime: inflation needs s*sigma*(delta2 - delta1) > delta1");
        if (grid_ok) check_pathological(c, out);
        check_smooth(c, out);
        break;
    }
    }
    return out;
}

void validate_config(const RunConfig& config) {
    auto errors = validation_errors(config);
    if (!errors.empty()) throw ValidationError(std::move(errors));
}

std::string serialize_config(const RunConfig& c, bool include_execution) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "experiment" << YAML::Value << experiment_name(c.experiment);
    e << YAML::Key << "seed" << YAML::Value << c.seed;
    if (include_execution) e << YAML::Key << "jobs" << YAML::Value << c.jobs;

    e << YAML::Key << "regime" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "s" << YAML::Value << c.regime.s;
    e << YAML::Key << "sigma" << YAML::Value << c.regime.sigma;
    e << YAML::Key << "delta1" << YAML::Value << c.regime.delta1;
    e << YAML::Key << "delta2" << YAML::Value << c.regime.delta2;
    e << YAML::Key << "theta" << YAML::Value << c.regime.theta;
    e << YAML::EndMap;

    e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dim" << YAML::Value << c.grid.dim;
    e << YAML::Key << "N" << YAML::Value << c.grid.n;
    e << YAML::EndMap;

    e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dt" << YAML::Value << c.solver.dt;
    e << YAML::Key << "dealias_padding" << YAML::Value << c.solver.dealias_padding;
    e << YAML::Key << "nonlinear_cfl" << YAML::Value << c.solver.nonlinear_cfl;
    e << YAML::Key << "blowup_guard" << YAML::Value << c.solver.blowup_guard;
    e << YAML::Key << "steps_per_horizon" << YAML::Value << c.solver.steps_per_horizon;
    e << YAML::Key << "time_samples" << YAML::Value << c.solver.time_samples;
    e << YAML::EndMap;

    e << YAML::Key << "mollifier" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "c_moll" << YAML::Value << c.mollifier.c_moll;
    e << YAML::Key << "support_radius" << YAML::Value << c.mollifier.support_radius;
    e << YAML::EndMap;

    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_list" << YAML::Value << YAML::Flow << c.sweep.n_list;
    e << YAML::Key << "k_min" << YAML::Value << c.sweep.k_min;
    e << YAML::Key << "k_max" << YAML::Value << c.sweep.k_max;
    e << YAML::Key << "n0" << YAML::Value << c.sweep.n0;
    e << YAML::Key << "eps_power" << YAML::Value << c.sweep.eps_power;
    e << YAML::Key << "horizon_scale" << YAML::Value << c.sweep.horizon_scale;
    e << YAML::Key << "eps_mode" << YAML::Value << c.sweep.eps_mode;
    e << YAML::Key << "profile_amplitude" << YAML::Value << c.sweep.profile_amplitude;
    e << YAML::EndMap;

    e << YAML::Key << "smooth" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << c.smooth.kind;
    e << YAML::Key << "kmax" << YAML::Value << c.smooth.kmax;
    e << YAML::Key << "amplitude" << YAML::Value << c.smooth.amplitude;
    e << YAML::EndMap;

    e << YAML::Key << "coarea" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "weight" << YAML::Value << c.coarea.weight;
    e << YAML::Key << "lambda_min" << YAML::Value << c.coarea.lambda_min;
    e << YAML::Key << "lambda_max" << YAML::Value << c.coarea.lambda_max;
    e << YAML::Key << "lambda_count" << YAML::Value << c.coarea.lambda_count;
    e << YAML::Key << "rel_tol" << YAML::Value << c.coarea.rel_tol;
    e << YAML::EndMap;

    e << YAML::Key << "fsp" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "grid_sizes" << YAML::Value << YAML::Flow << c.fsp.grid_sizes;
    e << YAML::Key << "horizon" << YAML::Value << c.fsp.horizon;
    e << YAML::Key << "r0" << YAML::Value << c.fsp.r0;
    e << YAML::Key << "bump_amplitude" << YAML::Value << c.fsp.bump_amplitude;
    e << YAML::Key << "tolerance" << YAML::Value << c.fsp.tolerance;
    e << YAML::Key << "working_n" << YAML::Value << c.fsp.working_n;
    e << YAML::EndMap;

    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    if (include_execution) e << YAML::Key << "directory" << YAML::Value << c.output.directory;
    e << YAML::Key << "csv" << YAML::Value << c.output.csv;
    e << YAML::Key << "json" << YAML::Value << c.output.json;
    e << YAML::Key << "plots" << YAML::Value << c.output.plots;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

} // namespace inflab
