#pragma once

#include "grs/manifold.hpp"

namespace grs::manifolds {

/// Smallest representative of an angle difference, in (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * M_PI;
    double w = std::fmod(a, two_pi);
    if (w > M_PI) w -= two_pi;
    if (w <= -M_PI) w += two_pi;
    return w;
}

/// Unit-norm ambient point (cos t, sin t) of an angle.
inline Eigen::Vector2d circle_embed(double theta) {
    return Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

/// The unit circle under its angle chart. The angle coordinate is not
/// wrapped: states accumulate freely and only the distance is periodic, so
/// the exponential map is plain addition of the angular increment.
inline ManifoldPtr circle() {
    auto m = std::make_shared<ManifoldSpec>();
    m->name = "circle";
    m->dim = 1;
    m->chart = make_chart("circle", {unbounded()});
    m->metric = euclidean_metric(1);
    m->coord_names = {"theta"};
    m->embed_names = {"e1", "e2"};
    m->distance_fn = [](const ChartPoint& a, const ChartPoint& b) {
        return std::abs(wrap_angle(a[0] - b[0]));
    };
    m->exp_fn = [](const ChartPoint& x, const Eigen::VectorXd& v) {
        return ChartPoint(x.chart(), x.coords() + v);
    };
    m->log_fn = [](const ChartPoint& x, const ChartPoint& y) {
        Eigen::VectorXd w(1);
        w[0] = wrap_angle(y[0] - x[0]);
        return w;
    };
    m->embed_fn = [](const ChartPoint& x) -> Eigen::VectorXd { return circle_embed(x[0]); };
    return m;
}

}  // namespace grs::manifolds
