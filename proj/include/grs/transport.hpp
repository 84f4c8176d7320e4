#pragma once

#include "grs/metric.hpp"

namespace grs {

/// LeviCivita uses the metric's connection coefficients; Flat forces all
/// coefficients to zero, so transported components are carried unchanged
/// between coordinate bases.
enum class Connection { LeviCivita, Flat };

/// A parameterized curve on [0, 1] with its chart velocity.
struct Curve {
    std::function<ChartPoint(double)> position;
    std::function<TangentVector(double)> velocity;
    bool is_geodesic = false;
};

/// Straight segment in chart coordinates from a to b.
inline Curve chart_line(const ChartPoint& a, const ChartPoint& b) {
    if (!a.same_chart(b)) throw Error("chart_line: endpoints on different charts");
    const Eigen::VectorXd delta = b.coords() - a.coords();
    Curve c;
    c.position = [a, delta](double t) { return ChartPoint(a.chart(), a.coords() + t * delta); };
    c.velocity = [pos = c.position, delta](double t) { return TangentVector(pos(t), delta); };
    return c;
}

namespace detail {

inline ChristoffelTensor connection_coefficients(const ChartPoint& x, const MetricField& field,
                                                 Connection connection) {
    if (connection == Connection::Flat) return zero_christoffel(x.dim());
    return christoffel(x, field);
}

}  // namespace detail

/// Covariant derivative of a vector field along a direction,
///   (nabla_w f)^k = sum_i w^i (df^k/dx^i + sum_j f^j gamma^k_ij),
/// with the field's Jacobian taken by central differences.
inline TangentVector covariant_derivative(
    const std::function<Eigen::VectorXd(const ChartPoint&)>& f_field,
    const TangentVector& gamma_dot, const MetricField& field, Connection connection,
    double jacobian_step = 1e-6) {
    const ChartPoint& x = gamma_dot.base();
    const int n = x.dim();

    Eigen::MatrixXd jac(n, n);  // jac(k, i) = df^k/dx^i
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd up = x.coords();
        Eigen::VectorXd dn = x.coords();
        up[i] += jacobian_step;
        dn[i] -= jacobian_step;
        if (!x.chart()->contains(up) || !x.chart()->contains(dn)) {
            throw BoundaryError("covariant_derivative: Jacobian stencil leaves chart domain");
        }
        jac.col(i) = (f_field(ChartPoint(x.chart(), up)) - f_field(ChartPoint(x.chart(), dn))) /
                     (2.0 * jacobian_step);
    }

    const ChristoffelTensor gamma = detail::connection_coefficients(x, field, connection);
    Eigen::VectorXd out = jac * gamma_dot.components() +
                          contract_christoffel(gamma, gamma_dot.components(), f_field(x));
    return TangentVector(x, std::move(out));
}

/// Parallel-transports the columns of V along the curve by integrating
/// V'^k = -sum_{i,j} vel^i gamma^k_ij V^j with a classical fourth-order
/// one-step scheme at fixed parameter step. Flat transport returns the
/// components unchanged.
inline Eigen::MatrixXd parallel_transport(const Eigen::MatrixXd& V, const Curve& curve,
                                          const MetricField& field, Connection connection,
                                          double step = 1e-3) {
    if (step <= 0.0) throw Error("parallel_transport: step must be positive");
    if (connection == Connection::Flat) return V;

    const auto rate = [&](double t, const Eigen::MatrixXd& W) -> Eigen::MatrixXd {
        const TangentVector vel = curve.velocity(t);
        const ChristoffelTensor gamma = christoffel(vel.base(), field);
        Eigen::MatrixXd out(W.rows(), W.cols());
        for (int c = 0; c < W.cols(); ++c) {
            out.col(c) = -contract_christoffel(gamma, vel.components(), W.col(c));
        }
        return out;
    };

    const int n_steps = std::max(1, static_cast<int>(std::ceil(1.0 / step)));
    const double h = 1.0 / n_steps;
    Eigen::MatrixXd W = V;
    for (int s = 0; s < n_steps; ++s) {
        const double t = s * h;
        const Eigen::MatrixXd k1 = rate(t, W);
        const Eigen::MatrixXd k2 = rate(t + 0.5 * h, W + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = rate(t + 0.5 * h, W + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = rate(t + h, W + h * k3);
        W += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return W;
}

inline TangentVector parallel_transport(const TangentVector& v, const Curve& curve,
                                        const MetricField& field, Connection connection,
                                        double step = 1e-3) {
    const Eigen::MatrixXd out = parallel_transport(Eigen::MatrixXd(v.components()), curve, field,
                                                   connection, step);
    return TangentVector(curve.position(1.0), out.col(0));
}

/// Length of a curve, integral of |velocity|_h over [0, 1] by composite
/// Simpson quadrature. Invariant under monotone reparameterization up to
/// quadrature error.
inline double curve_length(const Curve& curve, const MetricField& field,
                           int quadrature_points = 257) {
    int nodes = std::max(3, quadrature_points);
    if (nodes % 2 == 0) ++nodes;
    const int panels = (nodes - 1) / 2;
    const double h = 1.0 / (nodes - 1);

    const auto speed = [&](double t) {
        const TangentVector vel = curve.velocity(t);
        return riemannian_vec_norm(vel.components(), field.metric_at(vel.base()));
    };

    double sum = speed(0.0) + speed(1.0);
    for (int p = 0; p < panels; ++p) {
        sum += 4.0 * speed((2 * p + 1) * h);
        if (p + 1 < panels) sum += 2.0 * speed((2 * p + 2) * h);
    }
    return sum * h / 3.0;
}

}  // namespace grs
