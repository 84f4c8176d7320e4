#pragma once

#include "grs/geodesic.hpp"

namespace grs {

/// A built-in or registered manifold: one chart, its metric, and optional
/// closed-form distance/exponential/logarithm maps. Missing closed forms fall
/// back to numerical geodesics (integration and two-point shooting).
/// Immutable after construction; safe to share across threads.
struct ManifoldSpec {
    std::string name;
    int dim = 0;
    ChartPtr chart;
    MetricField metric;
    std::vector<std::string> coord_names;
    std::vector<std::string> embed_names;  // empty: no ambient embedding columns

    std::function<double(const ChartPoint&, const ChartPoint&)> distance_fn;
    std::function<ChartPoint(const ChartPoint&, const Eigen::VectorXd&)> exp_fn;
    std::function<Eigen::VectorXd(const ChartPoint&, const ChartPoint&)> log_fn;
    std::function<Eigen::VectorXd(const ChartPoint&)> embed_fn;

    GeodesicOptions geodesic;
    ShootingOptions shooting;

    ChartPoint point(Eigen::VectorXd coords) const { return ChartPoint(chart, std::move(coords)); }

    ChartPoint point(std::initializer_list<double> coords) const {
        Eigen::VectorXd c(static_cast<Eigen::Index>(coords.size()));
        Eigen::Index i = 0;
        for (double v : coords) c[i++] = v;
        return point(std::move(c));
    }
};

using ManifoldPtr = std::shared_ptr<const ManifoldSpec>;

/// Initial velocity of the geodesic from x to y (closed form or shooting).
inline Eigen::VectorXd log_map(const ManifoldSpec& m, const ChartPoint& x, const ChartPoint& y) {
    if (m.log_fn) return m.log_fn(x, y);
    return shoot_geodesic(x, y, m.metric, m.geodesic, m.shooting);
}

/// Geodesic distance between two points of the same chart component.
inline double distance(const ManifoldSpec& m, const ChartPoint& x, const ChartPoint& y) {
    if (m.distance_fn) return m.distance_fn(x, y);
    // Geodesics have constant speed, so the length is |log_x(y)|_h at x.
    return riemannian_vec_norm(log_map(m, x, y), m.metric.metric_at(x));
}

/// Time-1 point of the geodesic from x with initial velocity v. Zero velocity
/// returns x itself, bitwise.
inline ChartPoint exp_map(const ManifoldSpec& m, const ChartPoint& x, const Eigen::VectorXd& v) {
    if (v.size() != x.dim()) throw ShapeError("exp_map: velocity dimension mismatch");
    if (v.isZero(0.0)) return x;
    if (m.exp_fn) return m.exp_fn(x, v);
    return integrate_geodesic(x, v, m.metric, 1.0, m.geodesic.step);
}

inline ChartPoint exp_map(const ManifoldSpec& m, const TangentVector& v) {
    return exp_map(m, v.base(), v.components());
}

/// Unit-speed velocity (|.|_h = 1) at x of the geodesic that runs from x0 to
/// x, the direction the corrections of the growth-bound machinery contract
/// against. Zero at x = x0 by the degenerate-geodesic convention.
inline TangentVector arrival_direction(const ManifoldSpec& m, const ChartPoint& x0,
                                       const ChartPoint& x) {
    const Eigen::VectorXd back = log_map(m, x, x0);  // points from x toward x0
    const double speed = riemannian_vec_norm(back, m.metric.metric_at(x));
    if (speed == 0.0) return TangentVector(x, Eigen::VectorXd::Zero(x.dim()));
    return TangentVector(x, (-back / speed).eval());
}

/// Ambient representation for output; defaults to the chart coordinates.
inline Eigen::VectorXd embed(const ManifoldSpec& m, const ChartPoint& x) {
    if (m.embed_fn) return m.embed_fn(x);
    return x.coords();
}

}  // namespace grs
