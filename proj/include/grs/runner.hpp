#pragma once

#include "grs/scenario.hpp"

namespace grs {

enum class Subcommand { Gvs, Reach, Validate };

inline const char* to_string(Subcommand s) {
    switch (s) {
        case Subcommand::Gvs: return "gvs";
        case Subcommand::Reach: return "reach";
        default: return "validate";
    }
}

inline const char* to_string(ControlPolicy p) {
    return p == ControlPolicy::PiecewiseConstantRandom ? "piecewise_constant_random"
                                                       : "boundary_bang";
}

/// What a run produced, echoing the parameters it actually used.
struct RunSummary {
    std::string scenario_name;
    std::string subcommand;
    std::string manifold_name;
    double horizon = 0.0;
    double dt = 0.0;
    long n_trajectories = 0;
    std::uint64_t seed = 0;
    std::string policy;
    int n_workers = 1;

    double ball_radius_at_start = 0.0;
    double matrix_lipschitz = 0.0;
    struct Stats {
        double min = std::numeric_limits<double>::quiet_NaN();
        double mean = std::numeric_limits<double>::quiet_NaN();
        double max = std::numeric_limits<double>::quiet_NaN();
        long count = 0;
    } domain_radius;
    long n_points = 0;
    long n_checked = 0;
    long violations = 0;
    double worst_excess_control_norm = std::numeric_limits<double>::quiet_NaN();
    double worst_velocity_residual = std::numeric_limits<double>::quiet_NaN();
    double wall_time_s = 0.0;
};

inline json to_json(const RunSummary& s) {
    json j;
    j["schema_version"] = 1;
    j["scenario"] = {{"name", s.scenario_name},    {"manifold", s.manifold_name},
                     {"horizon", s.horizon},       {"dt", s.dt},
                     {"n_trajectories", s.n_trajectories}, {"seed", s.seed},
                     {"policy", s.policy}};
    j["subcommand"] = s.subcommand;
    j["n_workers"] = s.n_workers;
    json res;
    res["ball_radius_at_start"] = s.ball_radius_at_start;
    res["matrix_lipschitz"] = s.matrix_lipschitz;
    res["domain_radius"] = {{"min", s.domain_radius.min},
                            {"mean", s.domain_radius.mean},
                            {"max", s.domain_radius.max},
                            {"count", s.domain_radius.count}};
    res["n_points"] = s.n_points;
    res["n_checked"] = s.n_checked;
    res["violations"] = s.violations;
    if (std::isfinite(s.worst_excess_control_norm)) {
        res["worst_excess_control_norm"] = s.worst_excess_control_norm;
    }
    if (std::isfinite(s.worst_velocity_residual)) {
        res["worst_velocity_residual"] = s.worst_velocity_residual;
    }
    res["wall_time_s"] = s.wall_time_s;
    j["results"] = res;
    return j;
}

namespace detail {

inline void csv_number(std::ostream& os, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    os << buf;
}

inline RunSummary::Stats domain_radius_stats(const LocalData& local, const BoundEnvelope& env,
                                             const ManifoldSpec& manifold,
                                             const std::vector<CloudPoint>& points,
                                             std::size_t max_samples = 512) {
    RunSummary::Stats stats;
    if (points.empty()) return stats;
    const std::size_t stride = std::max<std::size_t>(1, points.size() / max_samples);
    double sum = 0.0;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); i += stride) {
        const BoundsAtPoint b = evaluate_bounds(local, env, manifold, manifold.point(points[i].coords));
        stats.min = std::min(stats.min, b.radii.velocity_ball);
        stats.max = std::max(stats.max, b.radii.velocity_ball);
        sum += b.radii.velocity_ball;
        ++stats.count;
    }
    stats.mean = sum / static_cast<double>(stats.count);
    return stats;
}

}  // namespace detail

/// Dispatches a parsed scenario:
///   gvs      -> gvs_samples.csv (radii over sampled states around the start)
///   reach    -> cloud.csv of the surrogate propagation
///   validate -> additionally truth_cloud.csv and a containment certificate
/// All subcommands write summary.json. Throws ConfigError on inconsistent
/// input; containment violations are reported in the summary, not thrown.
inline RunSummary run_scenario(const Scenario& scenario, Subcommand subcommand,
                               const std::filesystem::path& out_dir, int n_workers = 1) {
    const auto t_start = std::chrono::steady_clock::now();
    if (subcommand == Subcommand::Validate && !scenario.truth) {
        throw ConfigError("scenario.truth: required by the validate subcommand");
    }

    const ManifoldSpec& manifold = *scenario.manifold;
    ChartPoint x0 = [&] {
        try {
            return manifold.point(scenario.x0);
        } catch (const BoundaryError& e) {
            throw ConfigError(std::string("scenario.x0: ") + e.what());
        }
    }();
    LocalData local = [&] {
        try {
            return LocalData::create(x0, scenario.f0, scenario.G0, scenario.lipschitz_drift,
                                     scenario.lipschitz_inputs);
        } catch (const Error& e) {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
    }();
    const BoundEnvelope env =
        scenario.env ? *scenario.env : BoundEnvelope::pointwise_at(manifold.metric, x0);

    std::filesystem::create_directories(out_dir);

    RunSummary summary;
    summary.scenario_name = scenario.name;
    summary.subcommand = to_string(subcommand);
    summary.manifold_name = manifold.name;
    summary.horizon = scenario.horizon;
    summary.dt = scenario.dt;
    summary.n_trajectories = scenario.n_trajectories;
    summary.seed = scenario.seed;
    summary.policy = to_string(scenario.policy);
    summary.n_workers = std::max(1, n_workers);
    summary.ball_radius_at_start = local.min_input_gain();
    summary.matrix_lipschitz = aggregate_matrix_lipschitz(local, env);

    if (subcommand == Subcommand::Gvs) {
        // Scan radius: past the admissible region so the empty transition is
        // visible in the output.
        const BoundsAtPoint at0 = evaluate_bounds(local, env, manifold, x0);
        double scan = at0.radii.velocity_ball;
        if (!std::isfinite(scan) || scan <= 0.0) scan = 1.0;
        scan *= 1.25;

        std::ofstream csv(out_dir / "gvs_samples.csv");
        csv << "sample";
        for (const auto& n : manifold.coord_names) csv << ',' << n;
        csv << ",distance,radius,domain_radius,image_domain_radius,admissible\n";

        Splitmix64 rng(derive_stream(scenario.seed, 0x67767353ULL));
        RunSummary::Stats stats;
        stats.min = std::numeric_limits<double>::infinity();
        stats.max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (int i = 0; i < scenario.gvs_samples; ++i) {
            const Eigen::VectorXd v = scan * sample_unit_ball(rng, manifold.dim);
            ChartPoint x = x0;
            try {
                x = exp_map(manifold, x0, v);
            } catch (const BoundaryError&) {
                continue;  // sample fell off the chart; skip it
            }
            const BoundsAtPoint b = evaluate_bounds(local, env, manifold, x);
            csv << i;
            for (int c = 0; c < manifold.dim; ++c) {
                csv << ',';
                detail::csv_number(csv, x[c]);
            }
            csv << ',';
            detail::csv_number(csv, b.dist);
            csv << ',';
            detail::csv_number(csv, b.ball_radius);
            csv << ',';
            detail::csv_number(csv, b.radii.velocity_ball);
            csv << ',';
            detail::csv_number(csv, b.radii.image_preserving);
            csv << ',' << (b.ball_radius >= 0.0 ? 1 : 0) << '\n';

            stats.min = std::min(stats.min, b.radii.velocity_ball);
            stats.max = std::max(stats.max, b.radii.velocity_ball);
            sum += b.radii.velocity_ball;
            ++stats.count;
            ++summary.n_points;
        }
        if (stats.count > 0) stats.mean = sum / static_cast<double>(stats.count);
        summary.domain_radius = stats;
    } else {
        SurrogateSystem sys(local, env, scenario.manifold);
        const ReachCloud cloud = reach_cloud(sys, scenario.horizon, scenario.dt,
                                             scenario.n_trajectories, scenario.seed,
                                             scenario.policy, summary.n_workers);
        {
            std::ofstream csv(out_dir / "cloud.csv");
            write_cloud_csv(csv, cloud, manifold);
        }
        summary.n_points = static_cast<long>(cloud.points.size());
        summary.domain_radius = detail::domain_radius_stats(local, env, manifold, cloud.points);

        if (subcommand == Subcommand::Validate) {
            const TruthDynamics& truth = *scenario.truth;
            const VectorField f_true = truth.drift_field();
            const MatrixField G_true = truth.input_field();
            const ReachCloud truth_cloud = true_reach_cloud(
                f_true, G_true, x0, scenario.horizon, scenario.dt, scenario.n_trajectories,
                derive_stream(scenario.seed, 0x54525554ULL), manifold, summary.n_workers);
            {
                std::ofstream csv(out_dir / "truth_cloud.csv");
                write_cloud_csv(csv, truth_cloud, manifold);
            }
            const ContainmentReport report =
                containment_check(manifold, f_true, G_true, cloud, scenario.containment_tol);
            summary.n_checked = report.n_checked;
            summary.violations = report.n_violations;
            summary.worst_excess_control_norm = report.worst_excess_control_norm;
            summary.worst_velocity_residual = report.worst_velocity_residual;
        }
    }

    summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    std::ofstream out(out_dir / "summary.json");
    out << to_json(summary).dump(2) << '\n';
    return summary;
}

}  // namespace grs
