#include "helpers.hpp"

using namespace grs;
using Catch::Approx;

namespace {

const ManifoldPtr s1 = manifolds::circle();
const ManifoldPtr so3 = manifolds::so3();
const ManifoldPtr r2 = manifolds::euclidean(2);

LocalData pendulum_local() {
    Eigen::VectorXd f0(1), lg(1);
    f0 << -std::sqrt(2.0) / 4.0;
    lg << 0.0;
    return LocalData::create(s1->point({M_PI / 4}), f0, Eigen::MatrixXd::Ones(1, 1), 1.5, lg);
}

LocalData so3_local() {
    Eigen::VectorXd f0 = Eigen::VectorXd::Zero(3);
    Eigen::MatrixXd G0(3, 2);
    G0 << 0, 0, 0, 1, 1, 0;
    Eigen::VectorXd lg(2);
    lg << 0.65, 0.0;
    return LocalData::create(so3->point({0.0, M_PI / 2, 0.0}), f0, G0, 0.0, lg);
}

const BoundEnvelope flat_env = BoundEnvelope::user_supplied(1.0, 1.0);
const BoundEnvelope so3_env = BoundEnvelope::user_supplied(1.2, 1.0 / 0.8);

Eigen::MatrixXd truth_input_so3(const ChartPoint& x) {
    Eigen::MatrixXd G(3, 2);
    G << 0, 0, 0, 1, 1.0 + 0.5 * x[2], 0;
    return G;
}

}  // namespace

TEST_CASE("local data validation") {
    const LocalData local = so3_local();
    REQUIRE(local.rank() == 2);
    REQUIRE(local.min_input_gain() == Approx(1.0));

    // The basis spans exactly the input columns.
    const Eigen::MatrixXd B = local.image_basis();
    const Eigen::MatrixXd proj = B * B.transpose();
    REQUIRE((proj * local.input() - local.input()).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((B.transpose() * B - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    SECTION("drift outside the input image is rejected") {
        Eigen::VectorXd f0(3);
        f0 << 0.5, 0.0, 0.0;  // e1 is orthogonal to span{e2, e3}
        Eigen::VectorXd lg(2);
        lg << 0.1, 0.1;
        Eigen::MatrixXd G0(3, 2);
        G0 << 0, 0, 0, 1, 1, 0;
        REQUIRE_THROWS_AS(
            LocalData::create(so3->point({0.0, M_PI / 2, 0.0}), f0, G0, 0.0, lg), Error);
    }

    SECTION("zero input matrix has no usable image") {
        REQUIRE_THROWS_AS(LocalData::create(r2->point({0.0, 0.0}), Eigen::VectorXd::Zero(2),
                                            Eigen::MatrixXd::Zero(2, 2), 1.0,
                                            Eigen::VectorXd::Zero(2)),
                          Error);
    }

    SECTION("negative growth bounds are rejected") {
        Eigen::VectorXd lg(1);
        lg << -0.1;
        REQUIRE_THROWS_AS(LocalData::create(s1->point({0.0}), Eigen::VectorXd::Zero(1),
                                            Eigen::MatrixXd::Ones(1, 1), 0.0, lg),
                          Error);
    }
}

TEST_CASE("bound envelope") {
    REQUIRE_THROWS_AS(BoundEnvelope::user_supplied(0.5, 1.0), InvalidMetricError);

    const ChartPoint x = so3->point({0.4, 1.1, 0.0});
    const BoundEnvelope env = BoundEnvelope::pointwise_at(so3->metric, x);
    const double c = std::abs(std::cos(1.1));
    REQUIRE(env.metric_norm_hi == Approx(1.0 + c).epsilon(1e-12));
    REQUIRE(env.metric_inv_norm_hi == Approx(1.0 / (1.0 - c)).epsilon(1e-12));
    REQUIRE(env.source == BoundEnvelope::Source::Pointwise);
}

TEST_CASE("aggregate input growth bound") {
    REQUIRE(aggregate_matrix_lipschitz(pendulum_local(), flat_env) == 0.0);

    const double lg = aggregate_matrix_lipschitz(so3_local(), so3_env);
    REQUIRE(lg == Approx(3.0 * (1.0 / 0.8) * std::sqrt(1.2) * 0.65).epsilon(1e-14));
    REQUIRE(lg > 2.6);
    REQUIRE(lg < 2.8);

    Eigen::VectorXd lg1(1);
    lg1 << 2.0;
    const LocalData scalar = LocalData::create(s1->point({0.0}), Eigen::VectorXd::Zero(1),
                                               Eigen::MatrixXd::Ones(1, 1), 0.0, lg1);
    REQUIRE(aggregate_matrix_lipschitz(scalar, flat_env) == Approx(2.0));
}

TEST_CASE("connection corrections") {
    SECTION("vanish on flat manifolds") {
        const LocalData local = pendulum_local();
        const BoundsAtPoint b = evaluate_bounds(local, flat_env, *s1, s1->point({M_PI / 4 + 0.3}));
        REQUIRE(b.corrections.input_columns.cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(b.corrections.drift.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("vanish at the base point") {
        const LocalData local = so3_local();
        const BoundsAtPoint b = evaluate_bounds(local, so3_env, *so3, local.base());
        REQUIRE(b.dist == 0.0);
        REQUIRE(b.corrections.input_columns.cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(b.corrections.drift.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("match the flat-minus-metric transport difference to first order") {
        // Along a short geodesic of length d the componentwise (flat)
        // transport and the metric transport of the input columns differ by
        // d * corrections + O(d^2).
        const ChartPoint x0 = so3->point({0.2, 1.3, -0.1});
        Eigen::VectorXd f0 = Eigen::VectorXd::Zero(3);
        Eigen::MatrixXd G0(3, 2);
        G0 << 0, 0, 0, 1, 1, 0;
        Eigen::VectorXd lg(2);
        lg << 0.65, 0.0;
        const LocalData local = LocalData::create(x0, f0, G0, 0.0, lg);

        Eigen::VectorXd dir(3);
        dir << 0.5, 0.7, -0.3;
        dir /= riemannian_vec_norm(dir, so3->metric.metric_at(x0));

        std::vector<double> errs;
        for (const double d : {0.02, 0.01, 0.005}) {
            const ChartPoint x = exp_map(*so3, x0, (d * dir).eval());
            const BoundsAtPoint b = evaluate_bounds(local, so3_env, *so3, x);
            REQUIRE(b.dist == Approx(d).epsilon(1e-9));

            const Eigen::MatrixXd transported = parallel_transport(
                G0, chart_line(x0, x), so3->metric, Connection::LeviCivita, 1e-3);
            const Eigen::MatrixXd difference = G0 - transported;  // flat keeps components
            errs.push_back((difference - d * b.corrections.input_columns).norm());
        }
        REQUIRE(errs[1] < 0.35 * errs[0]);
        REQUIRE(errs[2] < 0.35 * errs[1]);
        // The first-order model is already a ~1% approximation at d = 0.02.
        REQUIRE(errs[0] < 5e-4);
    }
}

TEST_CASE("admissible radii") {
    SECTION("pendulum closed forms") {
        const LocalData local = pendulum_local();
        const BoundsAtPoint b = evaluate_bounds(local, flat_env, *s1, s1->point({M_PI / 4 + 0.1}));
        REQUIRE(b.radii.velocity_ball == Approx(2.0 / 3.0).epsilon(1e-12));
        REQUIRE(std::isinf(b.radii.image_preserving));
        REQUIRE(b.radii.image_preserving > 0.0);
    }

    SECTION("flat reduction with both bounds zero is unconstrained") {
        Eigen::VectorXd lg(1);
        lg << 0.0;
        const LocalData local = LocalData::create(r2->point({0.0, 0.0}), Eigen::VectorXd::Zero(2),
                                                  (Eigen::MatrixXd(2, 1) << 1, 0).finished(), 0.0, lg);
        const BoundsAtPoint b = evaluate_bounds(local, flat_env, *r2, r2->point({0.4, 0.1}));
        REQUIRE(std::isinf(b.radii.velocity_ball));
        REQUIRE(b.ball_radius == Approx(1.0));
    }

    SECTION("flat closed form on random local data") {
        Splitmix64 rng(53);
        for (int trial = 0; trial < 100; ++trial) {
            const int m = 1 + static_cast<int>(rng.next() % 3);
            Eigen::MatrixXd G0 = test::random_matrix(rng, 2, m);
            Eigen::VectorXd w = test::random_vector(rng, m);
            Eigen::VectorXd f0 = G0 * w;  // keep the drift in the image
            Eigen::VectorXd lg(m);
            for (int i = 0; i < m; ++i) lg[i] = rng.uniform();
            const double lf = rng.uniform() + 0.1;
            const LocalData local = LocalData::create(r2->point({0.0, 0.0}), f0, G0, lf, lg);

            const ChartPoint x = r2->point({rng.gaussian(), rng.gaussian()});
            const BoundsAtPoint b = evaluate_bounds(local, flat_env, *r2, x);

            const double growth = 2.0 * lg.maxCoeff();  // n ||H^-1|| ||H||^(1/2) max L, H = I
            const double gain = local.min_input_gain();
            REQUIRE(b.radii.velocity_ball == Approx(gain / (growth + lf)).epsilon(1e-12));
            REQUIRE(b.ball_radius ==
                    Approx(gain - (growth + lf) * b.dist).margin(1e-12));
        }
    }
}

TEST_CASE("velocity ball radius") {
    SECTION("pendulum matches the linear law") {
        const LocalData local = pendulum_local();
        for (double offset : {-0.5, -0.2, 0.0, 0.1, 0.4, 0.66}) {
            const ChartPoint x = s1->point({M_PI / 4 + offset});
            const BoundsAtPoint b = evaluate_bounds(local, flat_env, *s1, x);
            REQUIRE(b.ball_radius == Approx(1.0 - 1.5 * std::abs(offset)).margin(1e-12));
        }
    }

    SECTION("equals the input gain at the base point") {
        const BoundsAtPoint b1 =
            evaluate_bounds(pendulum_local(), flat_env, *s1, s1->point({M_PI / 4}));
        REQUIRE(b1.ball_radius == 1.0);

        const LocalData local = so3_local();
        const BoundsAtPoint b2 = evaluate_bounds(local, so3_env, *so3, local.base());
        REQUIRE(b2.ball_radius == 1.0);
    }

    SECTION("non-increasing along a fixed geodesic") {
        const LocalData local = so3_local();
        Eigen::VectorXd dirs[3];
        dirs[0] = (Eigen::VectorXd(3) << 1, 0, 0).finished();
        dirs[1] = (Eigen::VectorXd(3) << 0, 1, 0).finished();
        dirs[2] = (Eigen::VectorXd(3) << 0.6, -0.5, 0.4).finished();
        for (const Eigen::VectorXd& raw : dirs) {
            const Eigen::VectorXd dir =
                raw / riemannian_vec_norm(raw, so3->metric.metric_at(local.base()));
            double prev = std::numeric_limits<double>::infinity();
            for (double d = 0.01; d < 0.45; d += 0.02) {
                const ChartPoint x = exp_map(*so3, local.base(), (d * dir).eval());
                const BoundsAtPoint b = evaluate_bounds(local, so3_env, *so3, x);
                REQUIRE(b.ball_radius <= prev + 1e-9);
                prev = b.ball_radius;
            }
        }
    }

    SECTION("nonnegative radius exactly at admissible distances") {
        Splitmix64 rng(59);
        for (int trial = 0; trial < 1000; ++trial) {
            const bool curved = (trial % 2) == 0;
            const ManifoldPtr M = curved ? so3 : std::static_pointer_cast<const ManifoldSpec>(r2);
            const ChartPoint x0 = curved ? so3->point({0.0, M_PI / 2, 0.0}) : r2->point({0.0, 0.0});
            const int n = M->dim;

            Eigen::MatrixXd G0 = test::random_matrix(rng, n, 2);
            Eigen::VectorXd f0 = G0 * test::random_vector(rng, 2);
            Eigen::VectorXd lg(2);
            lg << rng.uniform(), rng.uniform();
            const LocalData local = LocalData::create(x0, f0, G0, rng.uniform(), lg);
            const BoundEnvelope env = curved ? so3_env : flat_env;

            Eigen::VectorXd step = 0.5 * test::random_vector(rng, n);
            if (curved) step[1] = std::clamp(step[1], -1.0, 1.0);
            const ChartPoint x = exp_map(*M, x0, step);
            const BoundsAtPoint b = evaluate_bounds(local, env, *M, x);
            REQUIRE((b.ball_radius >= 0.0) == (b.dist <= b.radii.velocity_ball));
        }
    }

    SECTION("ball radius domain is never larger than the image-preserving domain") {
        Splitmix64 rng(61);
        for (int trial = 0; trial < 200; ++trial) {
            const LocalData local = so3_local();
            Eigen::VectorXd f0 = Eigen::VectorXd::Zero(3);
            Eigen::MatrixXd G0(3, 2);
            G0 << 0, 0, 0, 1, 1, 0;
            Eigen::VectorXd lg(2);
            lg << 0.3 + rng.uniform(), rng.uniform();
            const LocalData with_drift = LocalData::create(
                so3->point({0.0, M_PI / 2, 0.0}), (G0 * test::random_vector(rng, 2)).eval(), G0,
                0.1 + rng.uniform(), lg);

            Eigen::VectorXd step = 0.4 * test::random_vector(rng, 3);
            step[1] = std::clamp(step[1], -1.0, 1.0);
            const ChartPoint x = exp_map(*so3, with_drift.base(), step);
            const BoundsAtPoint b = evaluate_bounds(with_drift, so3_env, *so3, x);
            REQUIRE(b.radii.velocity_ball <= b.radii.image_preserving + 1e-12);
        }
    }
}

TEST_CASE("empirical image preservation inside the domain radius") {
    // The true input matrix of the rotation example keeps rank 2 wherever the
    // image-preserving radius says it must.
    const LocalData local = so3_local();
    Splitmix64 rng(67);
    long admissible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        // Scan radially so the sample set straddles the domain boundary.
        const Eigen::VectorXd step = (0.3 * rng.uniform()) * sample_unit_sphere(rng, 3);
        ChartPoint x = local.base();
        try {
            x = exp_map(*so3, local.base(), step);
        } catch (const BoundaryError&) {
            continue;
        }
        const BoundsAtPoint b = evaluate_bounds(local, so3_env, *so3, x);
        if (b.dist >= b.radii.image_preserving) continue;
        ++admissible;
        const Eigen::VectorXd sv = truth_input_so3(x).jacobiSvd().singularValues();
        REQUIRE(sv[1] > 1e-10 * sv[0]);
    }
    REQUIRE(admissible > 100);  // the scan must actually cover the domain
}
