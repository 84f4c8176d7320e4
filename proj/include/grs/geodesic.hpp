#pragma once

#include "grs/transport.hpp"

namespace grs {

struct GeodesicOptions {
    double step = 1e-3;  // RK4 step in curve parameter
};

struct ShootingOptions {
    double tol = 1e-8;  // endpoint coordinate tolerance
    int max_iterations = 100;
    double jacobian_step = 1e-6;
};

/// Integrates the geodesic equation x''^k = -sum_ij gamma^k_ij x'^i x'^j from
/// (x, v) to parameter t_end. Throws BoundaryError carrying the exit
/// parameter if the path leaves the chart.
inline ChartPoint integrate_geodesic(const ChartPoint& x, const Eigen::VectorXd& v,
                                     const MetricField& field, double t_end = 1.0,
                                     double step = 1e-3) {
    if (v.size() != x.dim()) throw ShapeError("integrate_geodesic: velocity dimension mismatch");
    if (t_end == 0.0 || v.isZero(0.0)) return x;

    struct State {
        Eigen::VectorXd q;
        Eigen::VectorXd p;
    };
    const auto rate = [&](const State& s) -> State {
        if (!x.chart()->contains(s.q)) throw BoundaryError("integrate_geodesic: left chart domain");
        const ChristoffelTensor gamma = christoffel(ChartPoint(x.chart(), s.q), field);
        return State{s.p, -contract_christoffel(gamma, s.p, s.p)};
    };

    const int n_steps = std::max(1, static_cast<int>(std::ceil(std::abs(t_end) / step)));
    const double h = t_end / n_steps;
    State s{x.coords(), v};
    for (int i = 0; i < n_steps; ++i) {
        try {
            const State k1 = rate(s);
            const State k2 = rate({s.q + 0.5 * h * k1.q, s.p + 0.5 * h * k1.p});
            const State k3 = rate({s.q + 0.5 * h * k2.q, s.p + 0.5 * h * k2.p});
            const State k4 = rate({s.q + h * k3.q, s.p + h * k3.p});
            s.q += (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
            s.p += (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
        } catch (const BoundaryError&) {
            throw BoundaryError("integrate_geodesic: left chart domain", i * h);
        }
        if (!x.chart()->contains(s.q)) {
            throw BoundaryError("integrate_geodesic: left chart domain", (i + 1) * h);
        }
    }
    return ChartPoint(x.chart(), s.q);
}

/// Two-point boundary solve: finds the initial velocity w with
/// exp_x(w) ~= y by damped Newton iteration on the endpoint residual.
inline Eigen::VectorXd shoot_geodesic(const ChartPoint& x, const ChartPoint& y,
                                      const MetricField& field,
                                      const GeodesicOptions& geo = {},
                                      const ShootingOptions& opt = {}) {
    if (!x.same_chart(y)) throw Error("shoot_geodesic: endpoints on different charts");
    const int n = x.dim();

    const auto endpoint = [&](const Eigen::VectorXd& w) {
        return integrate_geodesic(x, w, field, 1.0, geo.step).coords();
    };

    Eigen::VectorXd w = y.coords() - x.coords();
    Eigen::VectorXd res = endpoint(w) - y.coords();
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (res.lpNorm<Eigen::Infinity>() <= opt.tol) return w;

        Eigen::MatrixXd jac(n, n);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd wp = w;
            Eigen::VectorXd wm = w;
            wp[i] += opt.jacobian_step;
            wm[i] -= opt.jacobian_step;
            jac.col(i) = (endpoint(wp) - endpoint(wm)) / (2.0 * opt.jacobian_step);
        }

        const Eigen::VectorXd delta = jac.fullPivLu().solve(res);
        double damping = 1.0;
        bool improved = false;
        for (int back = 0; back < 30; ++back) {
            const Eigen::VectorXd w_try = w - damping * delta;
            const Eigen::VectorXd res_try = endpoint(w_try) - y.coords();
            if (res_try.norm() < res.norm()) {
                w = w_try;
                res = res_try;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break;
    }
    if (res.lpNorm<Eigen::Infinity>() <= opt.tol) return w;
    throw NoGeodesicError("shoot_geodesic: no convergence within iteration cap");
}

}  // namespace grs
