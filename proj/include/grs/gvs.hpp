#pragma once

#include "grs/bounds.hpp"
#include "grs/random.hpp"

namespace grs {

/// Underapproximation of the guaranteed velocity set at a point: a Euclidean
/// ball in chart components, centered on the flat-transported drift and
/// intersected with the flat-transported input image subspace.
///
/// A negative radius encodes the empty set (all membership queries fail);
/// keeping the value around lets callers log how far past admissibility a
/// query landed.
struct VelocityBall {
    ChartPoint base;
    Eigen::VectorXd center;      // flat transport keeps components unchanged
    double radius;
    Eigen::MatrixXd image_basis;  // orthonormal, n x rank

    bool empty() const { return radius < 0.0; }
};

/// Velocity ball of the guarantee at x. Flat transport carries the drift and
/// image basis componentwise; the radius shrinks with geodesic distance and
/// the connection correction terms.
inline VelocityBall guaranteed_velocity_ball(const LocalData& local, const ChartPoint& x,
                                             const BoundEnvelope& env,
                                             const ManifoldSpec& manifold) {
    const BoundsAtPoint bounds = evaluate_bounds(local, env, manifold, x);
    return VelocityBall{x, local.drift(), bounds.ball_radius, local.image_basis()};
}

inline bool contains_velocity(const VelocityBall& ball, const TangentVector& v, double tol = 1e-9) {
    if (!v.base().same_chart(ball.base) || v.base().coords() != ball.base.coords()) {
        throw Error("contains_velocity: velocity is not based at the ball's point");
    }
    if (ball.empty()) return false;
    const Eigen::VectorXd rel = v.components() - ball.center;
    const Eigen::VectorXd off_image = rel - ball.image_basis * (ball.image_basis.transpose() * rel);
    if (off_image.norm() > tol) return false;
    return rel.norm() <= ball.radius + tol;
}

enum class SampleMode { UniformBall, Boundary };

/// Draws k velocities from the ball, restricted to the image subspace.
/// Deterministic for a fixed seed.
inline std::vector<TangentVector> sample_velocities(const VelocityBall& ball, int k,
                                                    std::uint64_t seed,
                                                    SampleMode mode = SampleMode::UniformBall) {
    if (ball.empty()) throw EmptySetError("sample_velocities: velocity ball is empty");
    const int r = static_cast<int>(ball.image_basis.cols());
    Splitmix64 rng(derive_stream(seed, 0));
    std::vector<TangentVector> out;
    out.reserve(static_cast<std::size_t>(std::max(0, k)));
    for (int i = 0; i < k; ++i) {
        const Eigen::VectorXd xi = mode == SampleMode::UniformBall ? sample_unit_ball(rng, r)
                                                                   : sample_unit_sphere(rng, r);
        out.emplace_back(ball.base, ball.center + ball.image_basis * (ball.radius * xi));
    }
    return out;
}

}  // namespace grs
