#pragma once

#include "grs/manifold.hpp"

namespace grs {

/// Everything known about the unknown system: its drift and input directions
/// at one point, Lipschitz growth bounds, and the input image subspace.
///
/// The drift must lie in the image of the input matrix (the structural
/// assumption behind the guarantee), and the image basis is the orthonormal
/// column-space basis of the input matrix at the base point.
class LocalData {
public:
    static LocalData create(ChartPoint x0, Eigen::VectorXd drift, Eigen::MatrixXd input,
                            double lipschitz_drift, Eigen::VectorXd lipschitz_inputs,
                            double rank_tol = 1e-10) {
        const int n = x0.dim();
        if (drift.size() != n) throw ShapeError("LocalData: drift dimension does not match chart");
        if (input.rows() != n) throw ShapeError("LocalData: input matrix row count does not match chart");
        if (lipschitz_inputs.size() != input.cols()) {
            throw ShapeError("LocalData: need one input growth bound per input column");
        }
        if (lipschitz_drift < 0.0 || (lipschitz_inputs.size() > 0 && lipschitz_inputs.minCoeff() < 0.0)) {
            throw Error("LocalData: growth bounds must be nonnegative");
        }

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(input, Eigen::ComputeThinU);
        const Eigen::VectorXd sv = svd.singularValues();
        const double scale = sv.size() > 0 ? sv[0] : 0.0;
        int rank = 0;
        while (rank < sv.size() && sv[rank] > rank_tol * std::max(1.0, scale)) ++rank;
        if (rank == 0) {
            throw Error("LocalData: input matrix has no nonzero singular value");
        }
        const Eigen::MatrixXd basis = svd.matrixU().leftCols(rank);
        const double smallest = sv[rank - 1];

        const Eigen::VectorXd off_image = drift - basis * (basis.transpose() * drift);
        if (off_image.norm() > 1e-9 * std::max(1.0, drift.norm())) {
            throw Error("LocalData: drift is not contained in the input image subspace");
        }

        return LocalData(std::move(x0), std::move(drift), std::move(input), lipschitz_drift,
                         std::move(lipschitz_inputs), basis, smallest);
    }

    const ChartPoint& base() const { return x0_; }
    const Eigen::VectorXd& drift() const { return drift_; }
    const Eigen::MatrixXd& input() const { return input_; }
    double lipschitz_drift() const { return lipschitz_drift_; }
    const Eigen::VectorXd& lipschitz_inputs() const { return lipschitz_inputs_; }
    /// Orthonormal basis of the input image subspace, n x rank.
    const Eigen::MatrixXd& image_basis() const { return image_basis_; }
    int rank() const { return static_cast<int>(image_basis_.cols()); }
    int dim() const { return x0_.dim(); }
    int n_inputs() const { return static_cast<int>(input_.cols()); }
    /// Smallest nonzero singular value of the input matrix, the reciprocal of
    /// the pseudoinverse norm. Invariant under flat transport.
    double min_input_gain() const { return min_input_gain_; }

private:
    LocalData(ChartPoint x0, Eigen::VectorXd drift, Eigen::MatrixXd input, double lf,
              Eigen::VectorXd lg, Eigen::MatrixXd basis, double gain)
        : x0_(std::move(x0)),
          drift_(std::move(drift)),
          input_(std::move(input)),
          lipschitz_drift_(lf),
          lipschitz_inputs_(std::move(lg)),
          image_basis_(std::move(basis)),
          min_input_gain_(gain) {}

    ChartPoint x0_;
    Eigen::VectorXd drift_;
    Eigen::MatrixXd input_;
    double lipschitz_drift_;
    Eigen::VectorXd lipschitz_inputs_;
    Eigen::MatrixXd image_basis_;
    double min_input_gain_;
};

/// Upper bounds on the metric operator norms over the working neighbourhood,
/// either supplied with the problem data or taken pointwise at the query.
struct BoundEnvelope {
    enum class Source { Pointwise, UserSupplied };

    double metric_norm_hi = 1.0;      // bound on ||H_x||
    double metric_inv_norm_hi = 1.0;  // bound on ||H_x^-1||
    Source source = Source::UserSupplied;

    static BoundEnvelope user_supplied(double metric_norm_hi, double metric_inv_norm_hi) {
        if (!(metric_norm_hi > 0.0) || !(metric_inv_norm_hi > 0.0) ||
            metric_norm_hi * metric_inv_norm_hi < 1.0 - 1e-12) {
            // For SPD matrices ||H|| >= 1/||H^-1|| always.
            throw InvalidMetricError("BoundEnvelope: inconsistent operator-norm bounds");
        }
        return BoundEnvelope{metric_norm_hi, metric_inv_norm_hi, Source::UserSupplied};
    }

    static BoundEnvelope pointwise_at(const MetricField& field, const ChartPoint& x) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(field.metric_at(x));
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
            throw InvalidMetricError("BoundEnvelope: metric not SPD at query point");
        }
        return BoundEnvelope{es.eigenvalues().maxCoeff(), 1.0 / es.eigenvalues().minCoeff(),
                             Source::Pointwise};
    }
};

/// Riemannian growth bound for the whole input matrix from the per-column
/// bounds: n * ||H^-1|| * ||H||^(1/2) * max_l L_l.
inline double aggregate_matrix_lipschitz(const LocalData& local, const BoundEnvelope& env) {
    const double max_lg = local.lipschitz_inputs().size() > 0 ? local.lipschitz_inputs().maxCoeff() : 0.0;
    return local.dim() * env.metric_inv_norm_hi * std::sqrt(env.metric_norm_hi) * max_lg;
}

/// Connection correction terms at a query point: the contraction of the
/// connection coefficients against the unit geodesic direction and the local
/// dynamics, column for each input direction plus one for the drift.
/// These measure how far flat transport drifts from metric transport, to
/// first order in distance.
struct ConnectionCorrections {
    Eigen::MatrixXd input_columns;  // n x m
    Eigen::VectorXd drift;          // n
};

inline ConnectionCorrections connection_corrections(const LocalData& local,
                                                    const TangentVector& unit_direction,
                                                    const ChristoffelTensor& gamma_at_x) {
    const int n = local.dim();
    const int m = local.n_inputs();
    ConnectionCorrections out;
    out.input_columns.resize(n, m);
    for (int l = 0; l < m; ++l) {
        out.input_columns.col(l) =
            contract_christoffel(gamma_at_x, unit_direction.components(), local.input().col(l));
    }
    out.drift = contract_christoffel(gamma_at_x, unit_direction.components(), local.drift());
    return out;
}

/// Geodesic-distance radii around the base point. Inside image_preserving the
/// input image subspace provably keeps its rank; inside velocity_ball the
/// guaranteed velocity ball is nonempty. Negative values signal an empty
/// admissible neighbourhood; +inf means unconstrained.
struct AdmissibleRadii {
    double image_preserving;
    double velocity_ball;
};

namespace detail {

inline double ratio_with_sentinels(double numerator, double denominator) {
    if (denominator > 0.0) return numerator / denominator;
    return numerator > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline AdmissibleRadii admissible_radii(const LocalData& local, const BoundEnvelope& env,
                                        const ConnectionCorrections& corr) {
    const double hn = env.metric_norm_hi;
    const double hin = env.metric_inv_norm_hi;
    const double mixed = std::sqrt(hin * hn);
    const double lg = aggregate_matrix_lipschitz(local, env);
    const double gain = local.min_input_gain();

    const double input_corr = corr.input_columns.size() > 0
                                  ? corr.input_columns.jacobiSvd().singularValues().maxCoeff()
                                  : 0.0;
    const double drift_corr = corr.drift.norm();

    AdmissibleRadii radii{};
    radii.image_preserving =
        detail::ratio_with_sentinels(gain - std::sqrt(hin) * hn * input_corr, mixed * lg);

    const double slope = mixed * (lg + local.lipschitz_drift() / std::sqrt(hn));
    radii.velocity_ball = detail::ratio_with_sentinels(
        gain - mixed * (std::sqrt(hn) * input_corr + drift_corr), slope);
    return radii;
}

/// Radius of the guaranteed velocity ball at geodesic distance dist from the
/// base point. Negative values encode the empty set. The admissibility
/// condition dist <= velocity_ball radius is exactly this value being
/// nonnegative.
inline double velocity_ball_radius(const LocalData& local, const BoundEnvelope& env,
                                   const ConnectionCorrections& corr, double dist) {
    const double hn = env.metric_norm_hi;
    const double hin = env.metric_inv_norm_hi;
    const double mixed = std::sqrt(hin * hn);
    const double lg = aggregate_matrix_lipschitz(local, env);

    const double input_corr = corr.input_columns.size() > 0
                                  ? corr.input_columns.jacobiSvd().singularValues().maxCoeff()
                                  : 0.0;
    return local.min_input_gain() -
           mixed * (std::sqrt(hn) * input_corr + corr.drift.norm() +
                    (lg + local.lipschitz_drift() / std::sqrt(hn)) * dist);
}

/// Full pipeline at a query point: geodesic distance, connection corrections
/// along the arriving geodesic, and the resulting radii.
struct BoundsAtPoint {
    double dist;
    ConnectionCorrections corrections;
    AdmissibleRadii radii;
    double ball_radius;
};

inline BoundsAtPoint evaluate_bounds(const LocalData& local, const BoundEnvelope& env,
                                     const ManifoldSpec& manifold, const ChartPoint& x) {
    BoundsAtPoint out{};
    out.dist = distance(manifold, local.base(), x);
    if (out.dist == 0.0) {
        out.corrections.input_columns = Eigen::MatrixXd::Zero(local.dim(), local.n_inputs());
        out.corrections.drift = Eigen::VectorXd::Zero(local.dim());
    } else {
        const TangentVector direction = arrival_direction(manifold, local.base(), x);
        const ChristoffelTensor gamma = christoffel(x, manifold.metric);
        out.corrections = connection_corrections(local, direction, gamma);
    }
    out.radii = admissible_radii(local, env, out.corrections);
    out.ball_radius = velocity_ball_radius(local, env, out.corrections, out.dist);
    return out;
}

}  // namespace grs
