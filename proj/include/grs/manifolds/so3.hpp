#pragma once

#include "grs/manifold.hpp"

namespace grs::manifolds {

// Basis of the antisymmetric 3x3 matrices; hat(e_x) etc.
inline const Eigen::Matrix3d& so3_generator_x() {
    static const Eigen::Matrix3d K = (Eigen::Matrix3d() << 0, 0, 0, 0, 0, -1, 0, 1, 0).finished();
    return K;
}
inline const Eigen::Matrix3d& so3_generator_y() {
    static const Eigen::Matrix3d K = (Eigen::Matrix3d() << 0, 0, 1, 0, 0, 0, -1, 0, 0).finished();
    return K;
}
inline const Eigen::Matrix3d& so3_generator_z() {
    static const Eigen::Matrix3d K = (Eigen::Matrix3d() << 0, -1, 0, 1, 0, 0, 0, 0, 0).finished();
    return K;
}

inline Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
    Eigen::Matrix3d out;
    out << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
    return out;
}

inline Eigen::Vector3d vee(const Eigen::Matrix3d& W) {
    return Eigen::Vector3d(W(2, 1), W(0, 2), W(1, 0));
}

/// Rotation by angle ||w|| about axis w/||w|| (Rodrigues formula).
inline Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& w) {
    const double angle = w.norm();
    if (angle < 1e-14) return Eigen::Matrix3d::Identity() + hat(w);
    const Eigen::Matrix3d K = hat(w / angle);
    return Eigen::Matrix3d::Identity() + std::sin(angle) * K + (1.0 - std::cos(angle)) * K * K;
}

/// Inverse of rotation_exp; returns angle * axis with angle in [0, pi].
/// At angle pi the axis sign is arbitrary.
inline Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R) {
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    const double angle = std::acos(c);
    const Eigen::Vector3d skew = vee(R - R.transpose()) * 0.5;
    if (angle < 1e-7) return skew;  // R ~ I + hat(w)
    if (angle < M_PI - 1e-6) return (angle / std::sin(angle)) * skew;
    // Near pi the skew part vanishes; recover the axis from aa^T.
    const Eigen::Matrix3d outer =
        Eigen::Matrix3d::Identity() + (0.5 * (R + R.transpose()) - Eigen::Matrix3d::Identity()) / (1.0 - c);
    int imax = 0;
    outer.diagonal().maxCoeff(&imax);
    Eigen::Vector3d axis = outer.col(imax);
    axis.normalize();
    if (axis.dot(skew) < 0.0) axis = -axis;
    return angle * axis;
}

/// Element of SO(3); orthonormality and unit determinant are validated on
/// construction (1e-9).
class RotationMatrix {
public:
    explicit RotationMatrix(const Eigen::Matrix3d& entries) : entries_(entries) {
        if ((entries.transpose() * entries - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
            throw InvalidRotationError("RotationMatrix: not orthonormal");
        }
        if (std::abs(entries.determinant() - 1.0) > 1e-9) {
            throw InvalidRotationError("RotationMatrix: determinant is not +1");
        }
    }

    const Eigen::Matrix3d& entries() const { return entries_; }

private:
    Eigen::Matrix3d entries_;
};

/// Misorientation angle between two orientations,
/// arccos(Tr(X0 X^T)/2 - 1/2) in [0, pi]. Bi-invariant distance on SO(3).
inline double so3_misorientation(const RotationMatrix& X0, const RotationMatrix& X) {
    const double arg = std::clamp(0.5 * (X0.entries() * X.entries().transpose()).trace() - 0.5,
                                  -1.0, 1.0);
    return std::acos(arg);
}

/// Euler angles (psi, theta, phi) composed as Rz(psi) Rx(theta) Rz(phi),
/// the z-x-z order fixed by requiring (0, pi/2, 0) to map onto the quarter
/// turn whose triad sends e2 -> e3, e3 -> -e2.
inline RotationMatrix euler_to_rotation(const Eigen::Vector3d& angles) {
    const double cp = std::cos(angles[0]), sp = std::sin(angles[0]);
    const double ct = std::cos(angles[1]), st = std::sin(angles[1]);
    const double cf = std::cos(angles[2]), sf = std::sin(angles[2]);
    Eigen::Matrix3d X;
    X << cp * cf - sp * ct * sf, -cp * sf - sp * ct * cf, sp * st,
         sp * cf + cp * ct * sf, -sp * sf + cp * ct * cf, -cp * st,
         st * sf,                 st * cf,                 ct;
    return RotationMatrix(X);
}

inline RotationMatrix euler_to_rotation(const ChartPoint& x) {
    if (x.dim() != 3) throw ShapeError("euler_to_rotation: expected a 3-coordinate chart point");
    return euler_to_rotation(Eigen::Vector3d(x.coords()));
}

/// Extracts z-x-z Euler angles, choosing the psi/phi representatives nearest
/// the reference so successive steps stay continuous. Degenerate at
/// sin(theta) = 0 (chart boundary).
inline Eigen::Vector3d rotation_to_euler(const Eigen::Matrix3d& X, const Eigen::Vector3d& near) {
    const double ct = std::clamp(X(2, 2), -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    if (st < 1e-9) {
        throw BoundaryError("rotation_to_euler: gimbal configuration, sin(theta) ~ 0", 1.0);
    }
    constexpr double two_pi = 2.0 * M_PI;
    double psi = std::atan2(X(0, 2), -X(1, 2));
    double phi = std::atan2(X(2, 0), X(2, 1));
    psi += two_pi * std::round((near[0] - psi) / two_pi);
    phi += two_pi * std::round((near[2] - phi) / two_pi);
    return Eigen::Vector3d(psi, std::acos(ct), phi);
}

/// Spatial angular-velocity matrix of a chart velocity per the generator
/// expansion Xdot = v1 Kx X + v2 Ky X + v3 Kz X. Display/lifting aid only;
/// the chart computations use the coordinate basis.
inline Eigen::Matrix3d so3_lift_velocity(const ChartPoint& x, const TangentVector& xdot) {
    if (xdot.base().coords() != x.coords()) {
        throw Error("so3_lift_velocity: velocity not based at the given point");
    }
    const Eigen::Matrix3d X = euler_to_rotation(x).entries();
    const Eigen::VectorXd& v = xdot.components();
    return v[0] * so3_generator_x() * X + v[1] * so3_generator_y() * X +
           v[2] * so3_generator_z() * X;
}

/// Frame matrix B with columns the rotation axes of the coordinate
/// directions: omega = B(x) * v maps a chart velocity to its spatial angular
/// velocity. The metric tensor is exactly B^T B.
inline Eigen::Matrix3d so3_coordinate_frame(const Eigen::Vector3d& angles) {
    const double cp = std::cos(angles[0]), sp = std::sin(angles[0]);
    const double ct = std::cos(angles[1]), st = std::sin(angles[1]);
    Eigen::Matrix3d B;
    B.col(0) = Eigen::Vector3d(0, 0, 1);              // d/dpsi: z axis
    B.col(1) = Eigen::Vector3d(cp, sp, 0);            // d/dtheta: rotated x axis
    B.col(2) = Eigen::Vector3d(sp * st, -cp * st, ct);  // d/dphi: body z axis
    return B;
}

/// SO(3) under the z-x-z Euler-angle chart. theta is restricted to (0, pi)
/// where the metric is nondegenerate; psi and phi are periodic and kept
/// unwrapped, so the paper-style initial condition (0, pi/2, 0) is a valid
/// interior point. Distance is the misorientation angle; geodesics are
/// one-parameter rotation subgroups.
inline ManifoldPtr so3() {
    auto m = std::make_shared<ManifoldSpec>();
    m->name = "so3";
    m->dim = 3;
    m->chart = make_chart("so3_euler", {unbounded(), Interval{0.0, M_PI}, unbounded()});
    m->coord_names = {"psi", "theta", "phi"};
    m->embed_names = {"r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"};

    m->metric.metric = [](const ChartPoint& x) {
        const double c = std::cos(x[1]);
        Eigen::Matrix3d H;
        H << 1, 0, c, 0, 1, 0, c, 0, 1;
        return Eigen::MatrixXd(H);
    };
    m->metric.metric_inverse = [](const ChartPoint& x) {
        const double c = std::cos(x[1]);
        const double s2 = std::sin(x[1]) * std::sin(x[1]);
        Eigen::Matrix3d Hinv;
        Hinv << 1.0 / s2, 0, -c / s2, 0, 1, 0, -c / s2, 0, 1.0 / s2;
        return Eigen::MatrixXd(Hinv);
    };
    m->metric.christoffel_analytic = [](const ChartPoint& x) {
        const double c = std::cos(x[1]);
        const double s = std::sin(x[1]);
        ChristoffelTensor gamma = zero_christoffel(3);
        const double half_cot = 0.5 * c / s;
        const double half_csc = 0.5 / s;
        gamma[0](0, 1) = gamma[0](1, 0) = half_cot;   // psi-theta
        gamma[0](1, 2) = gamma[0](2, 1) = -half_csc;  // theta-phi
        gamma[1](0, 2) = gamma[1](2, 0) = 0.5 * s;    // psi-phi
        gamma[2](0, 1) = gamma[2](1, 0) = -half_csc;
        gamma[2](1, 2) = gamma[2](2, 1) = half_cot;
        return gamma;
    };

    m->distance_fn = [](const ChartPoint& a, const ChartPoint& b) {
        return so3_misorientation(euler_to_rotation(a), euler_to_rotation(b));
    };
    m->exp_fn = [chart = m->chart](const ChartPoint& x, const Eigen::VectorXd& v) {
        const Eigen::Vector3d angles(x.coords());
        const Eigen::Vector3d omega = so3_coordinate_frame(angles) * Eigen::Vector3d(v);
        const Eigen::Matrix3d X1 = rotation_exp(omega) * euler_to_rotation(angles).entries();
        return ChartPoint(chart, rotation_to_euler(X1, angles));
    };
    m->log_fn = [](const ChartPoint& x, const ChartPoint& y) -> Eigen::VectorXd {
        const Eigen::Vector3d angles(x.coords());
        const Eigen::Matrix3d rel =
            euler_to_rotation(Eigen::Vector3d(y.coords())).entries() *
            euler_to_rotation(angles).entries().transpose();
        const Eigen::Vector3d omega = rotation_log(rel);
        return so3_coordinate_frame(angles).partialPivLu().solve(omega);
    };
    m->embed_fn = [](const ChartPoint& x) {
        const Eigen::Matrix3d X = euler_to_rotation(x).entries();
        Eigen::VectorXd flat(9);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) flat[3 * r + c] = X(r, c);
        return flat;
    };
    return m;
}

}  // namespace grs::manifolds
