#pragma once

#include "grs/grs.hpp"

#include <catch2/catch_amalgamated.hpp>

namespace grs::test {

/// Random SPD matrix with eigenvalues in roughly [e^-2, e^2].
inline Eigen::MatrixXd random_spd(Splitmix64& rng, int n) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.gaussian();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd eigs(n);
    for (int i = 0; i < n; ++i) eigs[i] = std::exp(2.0 * (rng.uniform() - 0.5) * 2.0);
    return Q * eigs.asDiagonal() * Q.transpose();
}

inline Eigen::VectorXd random_vector(Splitmix64& rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    return v;
}

inline Eigen::MatrixXd random_matrix(Splitmix64& rng, int rows, int cols) {
    Eigen::MatrixXd A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = rng.gaussian();
    return A;
}

/// SO(3) with the closed-form distance/exp/log stripped, so the generic
/// geodesic machinery (shooting + integration) is what gets exercised.
inline ManifoldPtr so3_numeric() {
    auto m = std::make_shared<ManifoldSpec>(*manifolds::so3());
    m->name = "so3_numeric";
    m->distance_fn = nullptr;
    m->exp_fn = nullptr;
    m->log_fn = nullptr;
    return m;
}

/// Flat chart on an open box with a constant scaled metric; no closed forms.
inline ManifoldPtr scaled_plane(double scale, double half_width) {
    auto m = std::make_shared<ManifoldSpec>();
    m->name = "scaled_plane";
    m->dim = 2;
    m->chart = make_chart("scaled_plane", {Interval{-half_width, half_width},
                                           Interval{-half_width, half_width}});
    m->coord_names = {"x1", "x2"};
    m->metric.metric = [scale](const ChartPoint&) {
        return Eigen::MatrixXd(scale * Eigen::Matrix2d::Identity());
    };
    return m;
}

}  // namespace grs::test
