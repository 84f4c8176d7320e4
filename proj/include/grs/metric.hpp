#pragma once

#include "grs/types.hpp"

#include <functional>

namespace grs {

/// Per-point metric tensor H_x with optional analytic inverse and Christoffel
/// evaluators. Missing evaluators fall back to numerical routines (matrix
/// inverse, central-difference metric partials).
struct MetricField {
    std::function<Eigen::MatrixXd(const ChartPoint&)> metric;
    std::function<Eigen::MatrixXd(const ChartPoint&)> metric_inverse;       // optional
    std::function<ChristoffelTensor(const ChartPoint&)> christoffel_analytic;  // optional
    double fd_step = 1e-5;  // chart units, central differences

    Eigen::MatrixXd metric_at(const ChartPoint& x) const {
        if (!metric) throw Error("MetricField: no metric evaluator");
        return metric(x);
    }

    Eigen::MatrixXd inverse_at(const ChartPoint& x) const {
        if (metric_inverse) return metric_inverse(x);
        return metric_at(x).inverse();
    }
};

inline MetricField euclidean_metric(int n) {
    MetricField field;
    field.metric = [n](const ChartPoint&) { return Eigen::MatrixXd::Identity(n, n); };
    field.metric_inverse = field.metric;
    field.christoffel_analytic = [n](const ChartPoint&) { return zero_christoffel(n); };
    return field;
}

/// |v|_h = sqrt(v^T H v), the norm induced by the Riemannian inner product.
inline double riemannian_vec_norm(const Eigen::VectorXd& v, const Eigen::MatrixXd& H) {
    if (H.rows() != v.size() || H.cols() != v.size()) {
        throw ShapeError("riemannian_vec_norm: metric/vector dimension mismatch");
    }
    const double q = v.dot(H * v);
    if (q < 0.0) {
        throw InvalidMetricError("riemannian_vec_norm: negative quadratic form (metric not SPD)");
    }
    return std::sqrt(q);
}

inline double riemannian_vec_norm(const TangentVector& v, const Eigen::MatrixXd& H) {
    return riemannian_vec_norm(v.components(), H);
}

namespace detail {

inline Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& H, const char* who) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw InvalidMetricError(std::string(who) + ": eigendecomposition failed");
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidMetricError(std::string(who) + ": metric not positive definite");
    }
    return es.operatorSqrt();
}

inline Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& H, const char* who) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw InvalidMetricError(std::string(who) + ": eigendecomposition failed");
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidMetricError(std::string(who) + ": metric not positive definite");
    }
    return es.operatorInverseSqrt();
}

}  // namespace detail

/// Operator norm of a matrix of tangent columns under the Riemannian metric.
///
/// Square case: largest singular value of H^{1/2} A H^{-1/2}, which equals
/// sup_{v != 0} |Av|_h / |v|_h. For m != n the input space carries the
/// Euclidean norm, so the value is the largest singular value of H^{1/2} A.
inline double riemannian_mat_norm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& H) {
    if (H.rows() != H.cols() || A.rows() != H.rows()) {
        throw ShapeError("riemannian_mat_norm: metric/matrix dimension mismatch");
    }
    const Eigen::MatrixXd left = detail::spd_sqrt(H, "riemannian_mat_norm") * A;
    Eigen::MatrixXd scaled = left;
    if (A.cols() == A.rows()) {
        scaled = left * detail::spd_inv_sqrt(H, "riemannian_mat_norm");
    }
    return scaled.jacobiSvd().singularValues().maxCoeff();
}

/// Two-sided comparison factors between the Riemannian and Euclidean norms,
///   vec_lo * ||v|| <= |v|_h <= vec_hi * ||v||
///   mat_lo * ||A|| <= |A|_h <= mat_hi * ||A||.
struct NormEquivalence {
    double vec_lo;
    double vec_hi;
    double mat_lo;
    double mat_hi;
};

inline NormEquivalence norm_equivalence_factors(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) {
        throw InvalidMetricError("norm_equivalence_factors: eigendecomposition failed");
    }
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) throw InvalidMetricError("norm_equivalence_factors: metric not positive definite");
    // ||H|| = hi, ||H^-1||^-1 = lo for SPD H.
    return NormEquivalence{std::sqrt(lo), std::sqrt(hi), std::sqrt(lo / hi), std::sqrt(hi / lo)};
}

enum class ChristoffelMode { Analytic, FiniteDifference };

/// Levi-Civita connection coefficients from metric partials,
///   gamma^k_ij = 1/2 sum_l H^kl (dH_li/dx^j + dH_lj/dx^i - dH_ij/dx^l).
/// FiniteDifference mode uses central differences of the metric; the point
/// must sit at least one step inside the chart.
inline ChristoffelTensor christoffel(const ChartPoint& x, const MetricField& field,
                                     ChristoffelMode mode) {
    const int n = x.dim();
    if (mode == ChristoffelMode::Analytic) {
        if (!field.christoffel_analytic) {
            throw Error("christoffel: no analytic evaluator registered for this metric");
        }
        return field.christoffel_analytic(x);
    }

    const double h = field.fd_step;
    std::vector<Eigen::MatrixXd> dH(static_cast<std::size_t>(n));  // dH[l](i,j) = dH_ij/dx^l
    for (int l = 0; l < n; ++l) {
        Eigen::VectorXd up = x.coords();
        Eigen::VectorXd dn = x.coords();
        up[l] += h;
        dn[l] -= h;
        if (!x.chart()->contains(up) || !x.chart()->contains(dn)) {
            throw BoundaryError("christoffel: point within one finite-difference step of the chart boundary");
        }
        const Eigen::MatrixXd Hp = field.metric_at(ChartPoint(x.chart(), up));
        const Eigen::MatrixXd Hm = field.metric_at(ChartPoint(x.chart(), dn));
        dH[static_cast<std::size_t>(l)] = (Hp - Hm) / (2.0 * h);
    }

    const Eigen::MatrixXd Hinv = field.inverse_at(x);
    ChristoffelTensor gamma = zero_christoffel(n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) {
                    const auto lu = static_cast<std::size_t>(l);
                    s += Hinv(k, l) *
                         (dH[static_cast<std::size_t>(j)](l, i) + dH[static_cast<std::size_t>(i)](l, j) -
                          dH[lu](i, j));
                }
                gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
                gamma[static_cast<std::size_t>(k)](j, i) = 0.5 * s;
            }
        }
    }
    return gamma;
}

/// Analytic coefficients when registered, finite differences otherwise.
inline ChristoffelTensor christoffel(const ChartPoint& x, const MetricField& field) {
    return christoffel(x, field,
                       field.christoffel_analytic ? ChristoffelMode::Analytic
                                                  : ChristoffelMode::FiniteDifference);
}

}  // namespace grs
