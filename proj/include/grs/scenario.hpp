#pragma once

#include "grs/expr.hpp"
#include "grs/manifolds/circle.hpp"
#include "grs/manifolds/euclidean.hpp"
#include "grs/manifolds/so3.hpp"
#include "grs/reach.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

namespace grs {

using json = nlohmann::json;

/// True dynamics given as expression strings over the chart coordinates;
/// only used by validation scenarios, never by the guarantee itself.
struct TruthDynamics {
    std::vector<Expr> drift;                // n entries
    std::vector<std::vector<Expr>> input;   // n rows x m columns

    int n_inputs() const { return input.empty() ? 0 : static_cast<int>(input.front().size()); }

    VectorField drift_field() const {
        return [this](const ChartPoint& x) {
            const std::vector<double> vals = coordinate_values(x);
            Eigen::VectorXd out(static_cast<Eigen::Index>(drift.size()));
            for (std::size_t i = 0; i < drift.size(); ++i) out[static_cast<Eigen::Index>(i)] = drift[i].eval(vals);
            return out;
        };
    }

    MatrixField input_field() const {
        return [this](const ChartPoint& x) {
            const std::vector<double> vals = coordinate_values(x);
            Eigen::MatrixXd out(static_cast<Eigen::Index>(input.size()), n_inputs());
            for (std::size_t r = 0; r < input.size(); ++r) {
                for (std::size_t c = 0; c < input[r].size(); ++c) {
                    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        input[r][c].eval(vals);
                }
            }
            return out;
        };
    }

    /// Coordinates are exposed twice: under the manifold's names and under
    /// the generic aliases x1..xn.
    static std::vector<double> coordinate_values(const ChartPoint& x) {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(2 * x.dim()));
        for (int i = 0; i < x.dim(); ++i) vals.push_back(x[i]);
        for (int i = 0; i < x.dim(); ++i) vals.push_back(x[i]);
        return vals;
    }

    static std::vector<std::string> coordinate_variables(const ManifoldSpec& m) {
        std::vector<std::string> vars = m.coord_names;
        for (int i = 0; i < m.dim; ++i) vars.push_back("x" + std::to_string(i + 1));
        return vars;
    }
};

/// A batch experiment: the local knowledge bundle, the manifold, horizon and
/// sampling parameters, and optional truth dynamics for validation.
struct Scenario {
    std::string name;
    ManifoldPtr manifold;
    Eigen::VectorXd x0;
    Eigen::VectorXd f0;
    Eigen::MatrixXd G0;
    double lipschitz_drift = 0.0;
    Eigen::VectorXd lipschitz_inputs;
    std::optional<BoundEnvelope> env;  // absent: pointwise bounds at the query
    double horizon = 1.0;
    double dt = 1e-3;
    long n_trajectories = 100;
    std::uint64_t seed = 0;
    ControlPolicy policy = ControlPolicy::PiecewiseConstantRandom;
    int gvs_samples = 200;
    double containment_tol = 1e-6;
    std::optional<TruthDynamics> truth;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& why) {
    throw ConfigError(path + ": " + why);
}

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) config_fail(path + "." + key, "missing required field");
    return j.at(key);
}

inline double require_number(const json& j, const std::string& key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number()) config_fail(path + "." + key, "expected a number");
    return v.get<double>();
}

inline Eigen::VectorXd parse_vector(const json& v, const std::string& path) {
    if (!v.is_array()) config_fail(path, "expected an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) config_fail(path + "[" + std::to_string(i) + "]", "expected a number");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

inline Eigen::MatrixXd parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) config_fail(path, "expected a non-empty array of row arrays");
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    if (cols == 0) config_fail(path + "[0]", "expected a non-empty row array");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < v.size(); ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        if (!v[r].is_array() || v[r].size() != cols) config_fail(row_path, "ragged row");
        out.row(static_cast<Eigen::Index>(r)) = parse_vector(v[r], row_path).transpose();
    }
    return out;
}

}  // namespace detail

/// Builds a manifold from a definition document: generic chart with metric
/// entries as closed-form expressions over x1..xn, numerical Christoffels,
/// geodesic shooting for distance and geodesic integration for the
/// exponential map.
inline ManifoldPtr manifold_from_definition(const json& def, const std::string& path = "manifold") {
    auto m = std::make_shared<ManifoldSpec>();
    m->name = def.contains("name") ? def.at("name").get<std::string>() : "user_manifold";
    if (!def.contains("dim") || !def.at("dim").is_number_integer()) {
        detail::config_fail(path + ".dim", "expected an integer dimension");
    }
    m->dim = def.at("dim").get<int>();
    if (m->dim < 1) detail::config_fail(path + ".dim", "dimension must be positive");

    std::vector<Interval> bounds(static_cast<std::size_t>(m->dim));
    if (def.contains("domain")) {
        const json& dom = def.at("domain");
        if (!dom.is_array() || dom.size() != static_cast<std::size_t>(m->dim)) {
            detail::config_fail(path + ".domain", "expected one [lo, hi] pair per coordinate");
        }
        for (std::size_t i = 0; i < dom.size(); ++i) {
            const std::string p = path + ".domain[" + std::to_string(i) + "]";
            if (!dom[i].is_array() || dom[i].size() != 2) detail::config_fail(p, "expected [lo, hi]");
            Interval iv;
            if (!dom[i][0].is_null()) iv.lo = dom[i][0].get<double>();
            if (!dom[i][1].is_null()) iv.hi = dom[i][1].get<double>();
            if (!(iv.lo < iv.hi)) detail::config_fail(p, "lower bound must be below upper bound");
            bounds[i] = iv;
        }
    }
    m->chart = make_chart(m->name, std::move(bounds));
    for (int i = 0; i < m->dim; ++i) m->coord_names.push_back("x" + std::to_string(i + 1));

    const json& metric = detail::require_field(def, "metric", path);
    const Eigen::Index n = m->dim;
    auto entries = std::make_shared<std::vector<Expr>>();
    entries->reserve(static_cast<std::size_t>(n * n));
    if (!metric.is_array() || metric.size() != static_cast<std::size_t>(n)) {
        detail::config_fail(path + ".metric", "expected an n x n array of expression strings");
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = metric[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
            detail::config_fail(path + ".metric[" + std::to_string(r) + "]", "ragged metric row");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            const json& cell = row[static_cast<std::size_t>(c)];
            const std::string p =
                path + ".metric[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (!cell.is_string()) detail::config_fail(p, "expected an expression string");
            try {
                entries->push_back(Expr::parse(cell.get<std::string>(), m->coord_names));
            } catch (const ConfigError& e) {
                detail::config_fail(p, e.what());
            }
        }
    }
    m->metric.metric = [entries, n](const ChartPoint& x) {
        std::vector<double> vals(x.coords().data(), x.coords().data() + x.dim());
        Eigen::MatrixXd H(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                H(r, c) = (*entries)[static_cast<std::size_t>(r * n + c)].eval(vals);
            }
        }
        return H;
    };

    if (def.contains("distance") && def.at("distance").get<std::string>() != "shooting") {
        detail::config_fail(path + ".distance", "unknown designator (supported: \"shooting\")");
    }
    if (def.contains("exp") && def.at("exp").get<std::string>() != "integrate") {
        detail::config_fail(path + ".exp", "unknown designator (supported: \"integrate\")");
    }
    return m;
}

inline ManifoldPtr resolve_manifold(const json& field, const std::string& path = "manifold") {
    if (field.is_object()) return manifold_from_definition(field, path);
    if (!field.is_string()) detail::config_fail(path, "expected a builtin name or inline definition");
    const std::string name = field.get<std::string>();
    if (name == "circle") return manifolds::circle();
    if (name == "so3") return manifolds::so3();
    if (name.rfind("euclidean", 0) == 0 && name.size() > 9) {
        try {
            return manifolds::euclidean(std::stoi(name.substr(9)));
        } catch (const std::exception&) {
            detail::config_fail(path, "malformed euclidean dimension in '" + name + "'");
        }
    }
    detail::config_fail(path, "unknown manifold '" + name +
                                  "' (builtins: circle, so3, euclidean<N>)");
}

inline Scenario parse_scenario(const json& j, const std::string& path = "scenario") {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1) {
        detail::config_fail(path + ".schema_version", "expected schema_version = 1");
    }
    Scenario s;
    s.name = j.contains("name") ? j.at("name").get<std::string>() : "unnamed";
    s.manifold = resolve_manifold(detail::require_field(j, "manifold", path), path + ".manifold");
    const int n = s.manifold->dim;

    s.x0 = detail::parse_vector(detail::require_field(j, "x0", path), path + ".x0");
    if (s.x0.size() != n) {
        detail::config_fail(path + ".x0", "expected " + std::to_string(n) + " coordinates, got " +
                                              std::to_string(s.x0.size()));
    }
    s.f0 = detail::parse_vector(detail::require_field(j, "f0", path), path + ".f0");
    if (s.f0.size() != n) {
        detail::config_fail(path + ".f0", "expected " + std::to_string(n) + " entries, got " +
                                              std::to_string(s.f0.size()));
    }
    s.G0 = detail::parse_matrix(detail::require_field(j, "G0", path), path + ".G0");
    if (s.G0.rows() != n) {
        detail::config_fail(path + ".G0", "expected " + std::to_string(n) + " rows, got " +
                                              std::to_string(s.G0.rows()));
    }
    s.lipschitz_drift = detail::require_number(j, "L_f", path);
    s.lipschitz_inputs =
        detail::parse_vector(detail::require_field(j, "L_g", path), path + ".L_g");
    if (s.lipschitz_inputs.size() != s.G0.cols()) {
        detail::config_fail(path + ".L_g", "expected one bound per input column (" +
                                               std::to_string(s.G0.cols()) + "), got " +
                                               std::to_string(s.lipschitz_inputs.size()));
    }

    if (j.contains("env")) {
        const json& env = j.at("env");
        try {
            s.env = BoundEnvelope::user_supplied(detail::require_number(env, "H_norm_hi", path + ".env"),
                                                 detail::require_number(env, "H_inv_norm_hi", path + ".env"));
        } catch (const InvalidMetricError& e) {
            detail::config_fail(path + ".env", e.what());
        }
    }

    s.horizon = detail::require_number(j, "horizon", path);
    if (s.horizon < 0.0) detail::config_fail(path + ".horizon", "must be nonnegative");
    s.dt = detail::require_number(j, "dt", path);
    if (s.dt <= 0.0) detail::config_fail(path + ".dt", "must be positive");
    const json& traj = detail::require_field(j, "n_trajectories", path);
    if (!traj.is_number_integer() || traj.get<long>() < 1) {
        detail::config_fail(path + ".n_trajectories", "expected a positive integer");
    }
    s.n_trajectories = traj.get<long>();
    s.seed = detail::require_field(j, "seed", path).get<std::uint64_t>();

    if (j.contains("policy")) {
        const std::string p = j.at("policy").get<std::string>();
        if (p == "piecewise_constant_random") s.policy = ControlPolicy::PiecewiseConstantRandom;
        else if (p == "boundary_bang") s.policy = ControlPolicy::BoundaryBang;
        else detail::config_fail(path + ".policy", "unknown policy '" + p + "'");
    }
    if (j.contains("gvs_samples")) s.gvs_samples = j.at("gvs_samples").get<int>();
    if (j.contains("containment_tol")) s.containment_tol = j.at("containment_tol").get<double>();

    if (j.contains("truth")) {
        const json& t = j.at("truth");
        TruthDynamics truth;
        const std::vector<std::string> vars = TruthDynamics::coordinate_variables(*s.manifold);
        const json& fj = detail::require_field(t, "f", path + ".truth");
        if (!fj.is_array() || fj.size() != static_cast<std::size_t>(n)) {
            detail::config_fail(path + ".truth.f", "expected " + std::to_string(n) + " expressions");
        }
        for (std::size_t i = 0; i < fj.size(); ++i) {
            truth.drift.push_back(Expr::parse(fj[i].get<std::string>(), vars));
        }
        const json& gj = detail::require_field(t, "G", path + ".truth");
        if (!gj.is_array() || gj.size() != static_cast<std::size_t>(n)) {
            detail::config_fail(path + ".truth.G", "expected " + std::to_string(n) + " rows");
        }
        std::size_t m_cols = 0;
        for (std::size_t r = 0; r < gj.size(); ++r) {
            const std::string rp = path + ".truth.G[" + std::to_string(r) + "]";
            if (!gj[r].is_array() || gj[r].empty()) detail::config_fail(rp, "expected a row of expressions");
            if (r == 0) m_cols = gj[r].size();
            if (gj[r].size() != m_cols) detail::config_fail(rp, "ragged row");
            std::vector<Expr> row;
            for (std::size_t c = 0; c < gj[r].size(); ++c) {
                row.push_back(Expr::parse(gj[r][c].get<std::string>(), vars));
            }
            truth.input.push_back(std::move(row));
        }
        s.truth = std::move(truth);
    }
    return s;
}

inline Scenario load_scenario_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open scenario file: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario file " + file.string() + ": " + e.what());
    }
    return parse_scenario(j);
}

}  // namespace grs
