#pragma once

#include "grs/manifold.hpp"

namespace grs::manifolds {

/// Flat R^n: identity metric, straight-line geodesics.
inline ManifoldPtr euclidean(int n) {
    if (n < 1) throw Error("euclidean: dimension must be positive");
    auto m = std::make_shared<ManifoldSpec>();
    m->name = "euclidean" + std::to_string(n);
    m->dim = n;
    m->chart = make_chart(m->name, std::vector<Interval>(static_cast<std::size_t>(n)));
    m->metric = euclidean_metric(n);
    for (int i = 0; i < n; ++i) m->coord_names.push_back("x" + std::to_string(i + 1));
    m->distance_fn = [](const ChartPoint& a, const ChartPoint& b) {
        return (a.coords() - b.coords()).norm();
    };
    m->exp_fn = [](const ChartPoint& x, const Eigen::VectorXd& v) {
        return ChartPoint(x.chart(), x.coords() + v);
    };
    m->log_fn = [](const ChartPoint& x, const ChartPoint& y) {
        return (y.coords() - x.coords()).eval();
    };
    return m;
}

}  // namespace grs::manifolds
