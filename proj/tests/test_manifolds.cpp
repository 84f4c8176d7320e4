#include "helpers.hpp"

using namespace grs;
using namespace grs::manifolds;
using Catch::Approx;

namespace {

const ManifoldPtr M = so3();

RotationMatrix random_rotation(Splitmix64& rng) {
    return RotationMatrix(rotation_exp(Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian())));
}

}  // namespace

TEST_CASE("misorientation angle") {
    Splitmix64 rng(3);
    const RotationMatrix R = random_rotation(rng);
    REQUIRE(so3_misorientation(R, R) == Approx(0.0).margin(1e-12));

    // Quarter turn vs identity: Tr = 1, so the angle is pi/2.
    const RotationMatrix X0 = euler_to_rotation(Eigen::Vector3d(0.0, M_PI / 2, 0.0));
    REQUIRE(X0.entries().trace() == Approx(1.0).margin(1e-15));
    REQUIRE(so3_misorientation(X0, RotationMatrix(Eigen::Matrix3d::Identity())) ==
            Approx(M_PI / 2).epsilon(1e-12));

    SECTION("bi-invariance under a common rotation") {
        for (int trial = 0; trial < 50; ++trial) {
            const RotationMatrix A = random_rotation(rng);
            const RotationMatrix B = random_rotation(rng);
            const RotationMatrix C = random_rotation(rng);
            const RotationMatrix CA = RotationMatrix(C.entries() * A.entries());
            const RotationMatrix CB = RotationMatrix(C.entries() * B.entries());
            REQUIRE(std::abs(so3_misorientation(CA, CB) - so3_misorientation(A, B)) < 1e-10);
        }
    }

    SECTION("invalid rotations are rejected") {
        Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
        reflect(2, 2) = -1.0;  // determinant -1
        REQUIRE_THROWS_AS(RotationMatrix(reflect), InvalidRotationError);
        REQUIRE_THROWS_AS(RotationMatrix(Eigen::Matrix3d::Identity() * 1.001), InvalidRotationError);
    }
}

TEST_CASE("euler angles to rotation") {
    // Anchor: (0, pi/2, 0) is the quarter turn with triad columns
    // (1,0,0), (0,0,1), (0,-1,0).
    Eigen::Matrix3d expected;
    expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    const RotationMatrix X0 = euler_to_rotation(Eigen::Vector3d(0.0, M_PI / 2, 0.0));
    REQUIRE((X0.entries() - expected).cwiseAbs().maxCoeff() < 1e-12);

    REQUIRE((euler_to_rotation(Eigen::Vector3d::Zero()).entries() - Eigen::Matrix3d::Identity())
                .cwiseAbs()
                .maxCoeff() < 1e-15);

    SECTION("outputs are valid rotations and round-trip through extraction") {
        Splitmix64 rng(17);
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::Vector3d angles(4.0 * (rng.uniform() - 0.5), 0.05 + 3.03 * rng.uniform(),
                                         4.0 * (rng.uniform() - 0.5));
            const RotationMatrix R = euler_to_rotation(angles);  // ctor validates
            const Eigen::Vector3d back = rotation_to_euler(R.entries(), angles);
            REQUIRE((back - angles).cwiseAbs().maxCoeff() < 1e-8);
        }
    }

    SECTION("chart point round-trip is misorientation zero") {
        const ChartPoint x = M->point({0.4, 1.1, -0.8});
        const RotationMatrix R = euler_to_rotation(x);
        const Eigen::Vector3d back = rotation_to_euler(R.entries(), Eigen::Vector3d(x.coords()));
        REQUIRE(so3_misorientation(R, euler_to_rotation(back)) == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("velocity lift") {
    const ChartPoint x0 = M->point({0.0, M_PI / 2, 0.0});
    const Eigen::Matrix3d zero =
        so3_lift_velocity(x0, TangentVector(x0, Eigen::Vector3d::Zero()));
    REQUIRE(zero.cwiseAbs().maxCoeff() == 0.0);

    const Eigen::Matrix3d lifted =
        so3_lift_velocity(x0, TangentVector(x0, Eigen::Vector3d(1, 0, 0)));
    const Eigen::Matrix3d expected = so3_generator_x() * euler_to_rotation(x0).entries();
    REQUIRE((lifted - expected).cwiseAbs().maxCoeff() < 1e-12);

    SECTION("lifted velocities are tangent: Xdot X^T antisymmetric") {
        Splitmix64 rng(19);
        for (int trial = 0; trial < 50; ++trial) {
            const ChartPoint x = M->point({2.0 * (rng.uniform() - 0.5), 0.2 + 2.7 * rng.uniform(),
                                           2.0 * (rng.uniform() - 0.5)});
            const Eigen::Matrix3d X = euler_to_rotation(x).entries();
            const Eigen::Matrix3d Xdot =
                so3_lift_velocity(x, TangentVector(x, test::random_vector(rng, 3)));
            REQUIRE((Xdot * X.transpose() + X * Xdot.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("circle embedding") {
    REQUIRE((circle_embed(0.0) - Eigen::Vector2d(1, 0)).norm() == 0.0);
    REQUIRE((circle_embed(M_PI / 4) - Eigen::Vector2d(std::sqrt(2.0) / 2, std::sqrt(2.0) / 2)).norm() <
            1e-15);
    Splitmix64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        REQUIRE(circle_embed(10.0 * rng.gaussian()).norm() == Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("rotation chart metric") {
    Splitmix64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const double theta = 0.02 + 3.10 * rng.uniform();
        const ChartPoint x = M->point({3.0 * rng.gaussian(), theta, 3.0 * rng.gaussian()});
        const Eigen::MatrixXd H = M->metric.metric_at(x);
        const Eigen::MatrixXd Hinv = M->metric.inverse_at(x);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        REQUIRE(es.eigenvalues().minCoeff() > 0.0);
        REQUIRE(H.determinant() == Approx(std::sin(theta) * std::sin(theta)).margin(1e-12));
        REQUIRE((H * Hinv - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
        // Entries grow like 1/sin^2(theta), so compare relative to their size.
        REQUIRE((Hinv - H.inverse()).cwiseAbs().maxCoeff() <
                1e-12 * std::max(1.0, Hinv.cwiseAbs().maxCoeff()));
    }

    SECTION("displayed inverse, inside the working band |cos(theta)| < 0.2") {
        const ChartPoint x = M->point({0.7, 1.5, -0.4});
        const double c = std::cos(1.5), s2 = std::sin(1.5) * std::sin(1.5);
        Eigen::Matrix3d expected;
        expected << 1.0 / s2, 0, -c / s2, 0, 1, 0, -c / s2, 0, 1.0 / s2;
        REQUIRE((M->metric.inverse_at(x) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("degenerate gimbal points are outside the chart") {
        REQUIRE_THROWS_AS(M->point({0.0, 0.0, 0.0}), BoundaryError);
        REQUIRE_THROWS_AS(M->point({0.0, M_PI, 0.0}), BoundaryError);
        REQUIRE_THROWS_AS(M->point({0.0, -0.2, 0.0}), BoundaryError);
    }
}

TEST_CASE("chart distance agrees with the generic geometry machinery") {
    const auto numeric = test::so3_numeric();
    Splitmix64 rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const ChartPoint a = M->point({0.3 * rng.gaussian(), 1.1 + 0.6 * rng.uniform(),
                                       0.3 * rng.gaussian()});
        const Eigen::VectorXd step = 0.25 * test::random_vector(rng, 3);
        const ChartPoint b = exp_map(*M, a, step);
        const double closed = distance(*M, a, b);  // misorientation of the lifts
        const double shot = distance(*numeric, numeric->point(a.coords()), numeric->point(b.coords()));
        REQUIRE(std::abs(closed - shot) < 1e-6);
    }
}

TEST_CASE("circle distance is the minimal angular difference") {
    const auto s1 = circle();
    Splitmix64 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = 8.0 * rng.gaussian();
        const double b = 8.0 * rng.gaussian();
        const double d = distance(*s1, s1->point({a}), s1->point({b}));
        REQUIRE(d >= 0.0);
        REQUIRE(d <= M_PI + 1e-12);
        // Equivalent ambient check through the embedding.
        const double chord = (circle_embed(a) - circle_embed(b)).norm();
        REQUIRE(chord == Approx(2.0 * std::sin(d / 2.0)).margin(1e-9));
    }
}
