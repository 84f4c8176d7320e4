#pragma once

#include "grs/gvs.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace grs {

using VectorField = std::function<Eigen::VectorXd(const ChartPoint&)>;
using MatrixField = std::function<Eigen::MatrixXd(const ChartPoint&)>;

/// The control system whose trajectories are provably reachable: constant
/// drift (flat transport of the local drift) plus the velocity-ball radius
/// times a control from the unit ball of the input image subspace.
struct SurrogateSystem {
    LocalData local;
    BoundEnvelope env;
    ManifoldPtr manifold;

    SurrogateSystem(LocalData local_in, BoundEnvelope env_in, ManifoldPtr manifold_in)
        : local(std::move(local_in)), env(env_in), manifold(std::move(manifold_in)) {
        if (!manifold) throw Error("SurrogateSystem: null manifold");
        // Nonempty at the base point: radius there is the smallest input gain.
        if (!(local.min_input_gain() > 0.0)) {
            throw Error("SurrogateSystem: admissible domain empty at the base point");
        }
    }
};

/// Velocity of the surrogate system for a control in image-subspace
/// coordinates (dimension = rank of the image basis). Empty optional when
/// the guaranteed velocity set has emptied and the trajectory terminates.
inline std::optional<TangentVector> surrogate_velocity(const SurrogateSystem& sys,
                                                       const ChartPoint& x,
                                                       const Eigen::VectorXd& u) {
    if (u.size() != sys.local.rank()) {
        throw ShapeError("surrogate_velocity: control dimension must equal the image rank");
    }
    if (u.norm() > 1.0 + 1e-12) throw Error("surrogate_velocity: control outside the unit ball");
    const VelocityBall ball = guaranteed_velocity_ball(sys.local, x, sys.env, *sys.manifold);
    if (ball.empty()) return std::nullopt;
    return TangentVector(x, ball.center + ball.image_basis * (ball.radius * u));
}

/// One explicit Euler step retracted through the exponential map.
inline ChartPoint integrate_step(const ChartPoint& x, const TangentVector& v, double dt,
                                 const ManifoldSpec& manifold) {
    if (dt <= 0.0) throw Error("integrate_step: dt must be positive");
    return exp_map(manifold, x, (v.components() * dt).eval());
}

struct CloudPoint {
    int trajectory;
    double t;
    Eigen::VectorXd coords;
    Eigen::VectorXd embedded;
    Eigen::VectorXd velocity;  // outgoing chart velocity; empty on final states
};

/// Time-stamped point cloud approximating a reachable set. Points are
/// ordered by trajectory id, then time.
struct ReachCloud {
    struct Meta {
        double horizon = 0.0;
        double dt = 0.0;
        long n_trajectories = 0;
        std::uint64_t seed = 0;
    };

    std::vector<CloudPoint> points;
    Meta meta;
};

enum class ControlPolicy { PiecewiseConstantRandom, BoundaryBang };

namespace detail {

/// Runs n_traj independent trajectories of a generic stepper. Each trajectory
/// draws from its own seed stream, so the assembled cloud is identical for
/// any worker count.
template <typename VelocityProvider>
ReachCloud propagate_cloud(const ChartPoint& x0, double horizon, double dt, long n_traj,
                           std::uint64_t seed, const ManifoldSpec& manifold, int n_workers,
                           const VelocityProvider& velocity_at) {
    if (horizon < 0.0) throw Error("reach propagation: horizon must be nonnegative");
    if (dt <= 0.0) throw Error("reach propagation: dt must be positive");
    if (n_traj < 1) throw Error("reach propagation: need at least one trajectory");

    const long n_steps = std::lround(horizon / dt);
    std::vector<std::vector<CloudPoint>> per_traj(static_cast<std::size_t>(n_traj));

    const auto run_trajectory = [&](long traj) {
        auto& rows = per_traj[static_cast<std::size_t>(traj)];
        rows.reserve(static_cast<std::size_t>(n_steps + 1));
        Splitmix64 rng(derive_stream(seed, static_cast<std::uint64_t>(traj)));
        ChartPoint x = x0;
        rows.push_back(CloudPoint{static_cast<int>(traj), 0.0, x.coords(), embed(manifold, x), {}});
        for (long k = 0; k < n_steps; ++k) {
            const std::optional<Eigen::VectorXd> v = velocity_at(rng, x);
            if (!v) break;  // guaranteed set emptied
            rows.back().velocity = *v;
            try {
                x = integrate_step(x, TangentVector(x, *v), dt, manifold);
            } catch (const BoundaryError&) {
                break;  // left the chart; trajectory ceases here
            }
            rows.push_back(CloudPoint{static_cast<int>(traj), static_cast<double>(k + 1) * dt,
                                      x.coords(), embed(manifold, x), {}});
        }
    };

    const int workers = std::max(1, n_workers);
    if (workers == 1) {
        for (long traj = 0; traj < n_traj; ++traj) run_trajectory(traj);
    } else {
        std::atomic<long> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const long traj = next.fetch_add(1);
                    if (traj >= n_traj) return;
                    try {
                        run_trajectory(traj);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    ReachCloud cloud;
    cloud.meta = ReachCloud::Meta{horizon, dt, n_traj, seed};
    std::size_t total = 0;
    for (const auto& rows : per_traj) total += rows.size();
    cloud.points.reserve(total);
    for (auto& rows : per_traj) {
        for (auto& p : rows) cloud.points.push_back(std::move(p));
    }
    return cloud;
}

}  // namespace detail

/// Monte-Carlo propagation of the surrogate system: piecewise-constant
/// controls resampled each step from the unit ball of image coordinates (or
/// its boundary). Trajectories halt early when the guaranteed velocity set
/// empties or the chart is exited. Deterministic per seed for any worker
/// count.
inline ReachCloud reach_cloud(const SurrogateSystem& sys, double horizon, double dt, long n_traj,
                              std::uint64_t seed,
                              ControlPolicy policy = ControlPolicy::PiecewiseConstantRandom,
                              int n_workers = 1) {
    const int rank = sys.local.rank();
    return detail::propagate_cloud(
        sys.local.base(), horizon, dt, n_traj, seed, *sys.manifold, n_workers,
        [&](Splitmix64& rng, const ChartPoint& x) -> std::optional<Eigen::VectorXd> {
            const VelocityBall ball = guaranteed_velocity_ball(sys.local, x, sys.env, *sys.manifold);
            if (ball.empty()) return std::nullopt;
            const Eigen::VectorXd u = policy == ControlPolicy::PiecewiseConstantRandom
                                          ? sample_unit_ball(rng, rank)
                                          : sample_unit_sphere(rng, rank);
            return (ball.center + ball.image_basis * (ball.radius * u)).eval();
        });
}

/// Propagation of known dynamics xdot = f(x) + G(x) u with controls drawn
/// from the unit ball each step; the validation baseline.
inline ReachCloud true_reach_cloud(const VectorField& f_true, const MatrixField& G_true,
                                   const ChartPoint& x0, double horizon, double dt, long n_traj,
                                   std::uint64_t seed, const ManifoldSpec& manifold,
                                   int n_workers = 1) {
    const int m = static_cast<int>(G_true(x0).cols());
    return detail::propagate_cloud(
        x0, horizon, dt, n_traj, seed, manifold, n_workers,
        [&](Splitmix64& rng, const ChartPoint& x) -> std::optional<Eigen::VectorXd> {
            const Eigen::VectorXd u = sample_unit_ball(rng, m);
            return (f_true(x) + G_true(x) * u).eval();
        });
}

/// Single trajectory of known dynamics under a fixed control, same stepper as
/// the clouds. Used for extreme-control baselines of scalar systems.
inline std::vector<ChartPoint> propagate_fixed_control(const VectorField& f_true,
                                                       const MatrixField& G_true,
                                                       const ChartPoint& x0,
                                                       const Eigen::VectorXd& u, double horizon,
                                                       double dt, const ManifoldSpec& manifold) {
    const long n_steps = std::lround(horizon / dt);
    std::vector<ChartPoint> states;
    states.reserve(static_cast<std::size_t>(n_steps + 1));
    states.push_back(x0);
    for (long k = 0; k < n_steps; ++k) {
        const ChartPoint& x = states.back();
        const Eigen::VectorXd v = f_true(x) + G_true(x) * u;
        states.push_back(integrate_step(x, TangentVector(x, v), dt, manifold));
    }
    return states;
}

/// Certificate that recorded surrogate velocities are achievable by the true
/// dynamics: at each recorded step the least-squares control reproducing the
/// velocity must sit inside the unit ball and reconstruct it.
struct ContainmentReport {
    long n_checked = 0;
    long n_violations = 0;
    double worst_excess_control_norm = -std::numeric_limits<double>::infinity();  // max ||u|| - 1
    double worst_velocity_residual = 0.0;
};

inline ContainmentReport containment_check(const ManifoldSpec& manifold, const VectorField& f_true,
                                           const MatrixField& G_true, const ReachCloud& cloud,
                                           double tol = 1e-6) {
    ContainmentReport report;
    for (const CloudPoint& p : cloud.points) {
        if (p.velocity.size() == 0) continue;
        const ChartPoint x = manifold.point(p.coords);
        const Eigen::MatrixXd G = G_true(x);
        const Eigen::VectorXd rhs = p.velocity - f_true(x);
        const Eigen::VectorXd u = G.completeOrthogonalDecomposition().solve(rhs);
        const double residual = (G * u - rhs).norm();
        const double excess = u.norm() - 1.0;
        ++report.n_checked;
        report.worst_excess_control_norm = std::max(report.worst_excess_control_norm, excess);
        report.worst_velocity_residual = std::max(report.worst_velocity_residual, residual);
        if (excess > tol || residual > tol) ++report.n_violations;
    }
    return report;
}

/// CSV serialization: header traj_id,t,<coord names>,<embedded names>, one
/// row per recorded state, 12 significant digits.
inline void write_cloud_csv(std::ostream& os, const ReachCloud& cloud,
                            const ManifoldSpec& manifold) {
    os << "traj_id,t";
    for (const auto& n : manifold.coord_names) os << ',' << n;
    for (const auto& n : manifold.embed_names) os << ',' << n;
    os << '\n';

    char buf[64];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        os << ',' << buf;
    };
    for (const CloudPoint& p : cloud.points) {
        os << p.trajectory;
        put(p.t);
        for (Eigen::Index i = 0; i < p.coords.size(); ++i) put(p.coords[i]);
        if (!manifold.embed_names.empty()) {
            for (Eigen::Index i = 0; i < p.embedded.size(); ++i) put(p.embedded[i]);
        }
        os << '\n';
    }
}

}  // namespace grs
