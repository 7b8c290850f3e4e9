#include "oracles.hpp"

#include "resest/attack.hpp"
#include "resest/bounds.hpp"
#include "resest/chi2.hpp"
#include "resest/decoder.hpp"
#include "resest/errors.hpp"
#include "resest/sparsity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace resest;
using resest::testing::gaussian_matrix;
using resest::testing::uniform;
using resest::testing::uniform_int;

namespace {

MeasurementModel three_sensor(double noise = 1e-3) { return MeasurementModel(Matrix::Ones(3, 1), Vector::Constant(3, noise)); }

// A prior trained on one sample of y_center at z = 0, so the posterior at
// z = 0 is centered on y_center with variance about sigma^2.
GprModel point_prior(const Vector& y_center, double sigma) {
    const auto m = y_center.size();
    return GprModel::train(Matrix::Zero(1, 1), y_center, KernelParams{1.0, 1.0, Vector::Constant(m, sigma)});
}

}  // namespace

TEST(Sat, Examples) {
    EXPECT_EQ(sat(3, 2), 2);
    EXPECT_EQ(sat(-3, 2), -2);
    EXPECT_EQ(sat(1.5, 2), 1.5);
    EXPECT_THROW(sat(1, -1), DomainError);
}

TEST(BestKTerm, Examples) {
    const Eigen::Vector3d e(3, -1, 0.5);
    EXPECT_EQ(best_k_term(e, 1), Eigen::Vector3d(3, 0, 0));
    EXPECT_DOUBLE_EQ(best_k_term_error(e, 1), 1.5);
    EXPECT_EQ(best_k_term(e, 0), Eigen::Vector3d::Zero());
    const Eigen::Vector3d sparse(0, -2, 0);
    EXPECT_EQ(best_k_term(sparse, 1), sparse);
    EXPECT_EQ(best_k_term_error(sparse, 1), 0.0);
    EXPECT_THROW(best_k_term(e, 4), DomainError);
}

TEST(BestKTerm, MinimizesTailOverSupports) {
    Rng rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = uniform_int(rng, 1, 8);
        const int k = uniform_int(rng, 0, m);
        const Vector e = rng.normal_vector(m);
        const double best = best_k_term_error(e, k);
        // Zeroing any k entries leaves at least the best tail.
        Vector f = e;
        for (int i = 0; i < k; ++i) {
            f(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(m)))) = 0.0;
        }
        EXPECT_LE(best, f.lpNorm<1>() + 1e-12);
    }
}

TEST(Reweight, Examples) {
    const Vector w = reweight(Eigen::Vector2d(0, 2), 0.1);
    EXPECT_DOUBLE_EQ(w(0), 10.0);
    EXPECT_NEAR(w(1), 0.47619, 1e-5);
    EXPECT_TRUE((reweight(Vector::Zero(4), 0.5).array() == 2.0).all());
    const Vector d = reweight(Eigen::Vector4d(0, -0.5, 1, 3), 0.01);
    for (int j = 0; j + 1 < 4; ++j) {
        EXPECT_GT(d(j), d(j + 1));
    }
    EXPECT_THROW(reweight(Vector::Zero(1), 0.0), DomainError);
}

TEST(BoundMain, Examples) {
    const Eigen::Vector3d e(5, 1, 1);  // tail after k = 1 is 2
    EXPECT_DOUBLE_EQ(bound_main(0.5, 10, e, 1), 12.0);
    EXPECT_DOUBLE_EQ(bound_main(0.5, 1, e, 1), 2.0);
    EXPECT_DOUBLE_EQ(bound_main(0.5, 1, Eigen::Vector3d(5, 0, 0), 1), 0.0);
    EXPECT_THROW(bound_main(1.0, 1, e, 1), DomainError);
    EXPECT_THROW(bound_main(0.0, 1, e, 1), DomainError);
}

TEST(BoundRip, Examples) {
    const Eigen::Vector3d e(5, 1, 0);  // tail 1
    EXPECT_DOUBLE_EQ(bound_rip(0.0, 1, e), 2.0);
    EXPECT_DOUBLE_EQ(bound_rip(0.3, 1, Eigen::Vector3d(5, 0, 0)), 0.0);
    double prev = 0.0;
    for (double d : {0.1, 0.5, 0.7, 0.707, 0.7071}) {
        const double b = bound_rip(d, 1, e);
        EXPECT_GT(b, prev);
        prev = b;
    }
    EXPECT_GT(prev, 1e3);
    EXPECT_THROW(bound_rip(1.0 / std::sqrt(2.0), 1, e), DomainError);
}

TEST(BoundNsp, Examples) {
    Vector e = Vector::Zero(8);
    e(0) = 4.0;
    e(1) = 1.0;  // tail 1 after k = 1
    // 4 (1 + 1/3) / (8 (1 - 1/3)) = 1, so the factor is m / sqrt 2 for any q.
    EXPECT_NEAR(bound_nsp(1.0 / 3.0, 2.0, 8, e, 1), 8.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(bound_nsp(1.0 / 3.0, 2.0, 8, e, 1), 5.656854, 1e-6);
    // gamma = 0.5, q = 2, m = 8: (8 / sqrt 2) sqrt(12 / 8).
    EXPECT_NEAR(bound_nsp(0.5, 2.0, 8, e, 1), 8.0 / std::sqrt(2.0) * std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(bound_nsp(0.5, 2.0, 8, e, 1), 6.9282, 1e-4);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(bound_nsp(1.0 / 3.0, inf, 8, e, 1), 8.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(bound_nsp(1.0 / 3.0, 1e6, 8, e, 1), 8.0 / std::sqrt(2.0), 1e-4);
    EXPECT_EQ(bound_nsp(0.5, 2.0, 8, best_k_term(e, 1), 1), 0.0);
    EXPECT_THROW(bound_nsp(0.5, 1.0, 8, e, 1), DomainError);
}

TEST(BoundKthTerm, Examples) {
    EXPECT_DOUBLE_EQ(bound_kth_term(2.0, 4, 1), 3.0);
    EXPECT_NEAR(bound_kth_term(std::sqrt(9.0), 9, 8), 1.0, 1e-15);
    EXPECT_THROW(bound_kth_term(1.0, 4, 4), DomainError);
}

TEST(BoundKthTerm, HoldsForRandomSphereDraws) {
    Rng rng(52);
    for (int i = 0; i < 5000; ++i) {
        const int m = uniform_int(rng, 1, 20);
        const int k = uniform_int(rng, 0, m - 1);
        const double delta = uniform(rng, 0.01, 10.0);
        Vector eps = rng.normal_vector(m);
        eps *= delta / eps.norm();
        EXPECT_LE(best_k_term_error(eps, k), bound_kth_term(delta, m, k) * (1.0 + 1e-12));
    }
}

TEST(BoundState, Examples) {
    // delta(tau) = 2: C2 = 3, C3 = 4.5, so 2 sat_2(12) + 2 sat_2(9) = 8.
    const Eigen::Vector4d e(5, 1, 0, 0);
    EXPECT_DOUBLE_EQ(bound_state_from_delta(0.5, 2.0, 4, 1, 1.0, 1.0, e), 8.0);
    EXPECT_DOUBLE_EQ(bound_state_from_delta(0.5, 0.0, 4, 1, 1.0, 1.0, best_k_term(e, 1)), 0.0);
    const double chi = chi2_quantile(4, 0.9);
    EXPECT_NEAR(bound_state(0.5, 0.9, 4, 1, 1.0, 4.0 / chi, 1.0, e), 8.0, 1e-9);

    double prev = 0.0;
    for (double d : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double b = bound_state_from_delta(0.3, d, 4, 1, 0.2, 1.5, e);
        EXPECT_GE(b, prev);
        prev = b;
    }
    EXPECT_THROW(bound_state_from_delta(0.5, 2.0, 4, 1, 1.0, 0.0, e), DomainError);
}

TEST(EllipsoidL1Radius, Examples) {
    EXPECT_DOUBLE_EQ(ellipsoid_l1_radius({Vector::Zero(4), Vector::Ones(4), 1.0}), 2.0);
    EXPECT_DOUBLE_EQ(ellipsoid_l1_radius({Vector::Zero(2), Eigen::Vector2d(0.5, 0.5), 4.0}), 4.0);
}

TEST(L0Decode, ThreeSensorExamples) {
    const MeasurementModel model = three_sensor();
    const Decoded d = l0_bruteforce_decode(model, Eigen::Vector3d(2, 2, 7), 1);
    EXPECT_NEAR(d.x(0), 2.0, 1e-12);
    EXPECT_LT((d.e - Eigen::Vector3d(0, 0, 5)).norm(), 1e-12);

    const Decoded clean = l0_bruteforce_decode(model, Eigen::Vector3d(4, 4, 4), 1);
    EXPECT_NEAR(clean.x(0), 4.0, 1e-12);
    EXPECT_EQ(clean.e.norm(), 0.0);

    EXPECT_THROW(l0_bruteforce_decode(model, Eigen::Vector3d(2, 3, 7), 1), NoFeasibleSupport);
    EXPECT_NO_THROW(l0_bruteforce_decode(model, Eigen::Vector3d(2, 3, 7), 2));
}

TEST(L1Decode, ThreeSensorExamples) {
    const MeasurementModel model = three_sensor();
    const Decoded d = l1_decode(model, Eigen::Vector3d(2, 2, 7));
    EXPECT_NEAR(d.x(0), 2.0, 1e-7);
    EXPECT_LT((d.e - Eigen::Vector3d(0, 0, 5)).norm(), 1e-6);

    Rng rng(53);
    const Matrix h = gaussian_matrix(rng, 7, 2);
    const MeasurementModel m(h, Vector::Constant(7, 0.1));
    const Vector y = rng.normal_vector(7);
    const Decoded c = l1_decode(m, h * least_squares(h, y));
    EXPECT_LT(c.e.norm(), 1e-7);
    EXPECT_LT((c.x - least_squares(h, y)).norm(), 1e-7);
}

TEST(L1Decode, FeasibleWhenNullspacePropertyFails) {
    Rng rng(54);
    int failing = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix h = gaussian_matrix(rng, 5, 2);
        const MeasurementModel model(h, Vector::Constant(5, 0.1));
        const Matrix q2t = residual_projector(model.qr());
        const NspCertificate c = nsp_check(q2t, 2, 1.0, 1);
        if (c.holds) {
            continue;
        }
        ++failing;
        Vector y = h * rng.normal_vector(2);
        y(0) += 3.0;
        y(3) -= 2.0;
        const Decoded d = l1_decode(model, y);
        EXPECT_LT((q2t * (y - d.e)).norm(), 1e-7);
        EXPECT_LT((h * d.x + d.e - y).norm(), 1e-7);
        EXPECT_LE(d.e.lpNorm<1>(), 5.0 + 1e-6);
    }
    EXPECT_GT(failing, 0);
}

TEST(ResilientEstimate, CleanMeasurementAtPriorMean) {
    Rng rng(55);
    const Matrix h = gaussian_matrix(rng, 8, 2);
    const MeasurementModel model(h, Vector::Constant(8, 1e-3));
    const Vector x = rng.normal_vector(2);
    const Vector y = h * x;
    const EstimateReport r = resilient_estimate(model, point_prior(y, 1e-2), Vector::Zero(1), y, DecoderConfig{});
    EXPECT_LT((r.x_hat - x).norm(), 1e-3);
    EXPECT_TRUE(r.support.empty());
    EXPECT_LT((r.e_hat - (y - h * r.x_hat - r.eps_hat)).norm(), 1e-10);
}

TEST(ResilientEstimate, IdentifiesSingleCorruptedSensor) {
    const MeasurementModel model = three_sensor();
    const Vector y_true = Vector::Constant(3, 2.0);
    const Eigen::Vector3d y(2, 2, 7);
    DecoderConfig cfg;
    cfg.tau = 0.5;
    const EstimateReport r = resilient_estimate(model, point_prior(y_true, 1e-3), Vector::Zero(1), y, cfg);
    EXPECT_NEAR(r.x_hat(0), 2.0, 1e-3);
    EXPECT_EQ(r.support, (IndexSet{2}));
    EXPECT_NEAR(r.e_hat(2), 5.0, 1e-2);
}

TEST(ResilientEstimate, TraceDoesNotIncrease) {
    Rng rng(56);
    for (int trial = 0; trial < 15; ++trial) {
        const int m = 12;
        const Matrix h = gaussian_matrix(rng, m, 3);
        const MeasurementModel model(h, Vector::Constant(m, 0.01));
        const Vector x = rng.normal_vector(3);
        const Vector y_true = h * x;
        Vector y = y_true + 0.01 * rng.normal_vector(m);
        for (int j : random_support(m, 3, 560 + static_cast<std::uint64_t>(trial))) {
            y(j) += 5.0 * std::abs(y(j)) + 1.0;
        }
        DecoderConfig cfg;
        cfg.max_reweight_iters = 8;
        const EstimateReport r = resilient_estimate(model, point_prior(y_true, 0.05), Vector::Zero(1), y, cfg);
        for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
            EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-6 * std::abs(r.objective_trace[i - 1]));
        }
    }
}

TEST(ReweightedL1, InfiniteRadiusCollapsesToL1Decode) {
    Rng rng(57);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix h = gaussian_matrix(rng, 9, 2);
        const MeasurementModel model(h, Vector::Constant(9, 0.1));
        Vector y = h * rng.normal_vector(2);
        y(1) += 4.0;
        y(6) -= 1.0;
        DecoderConfig cfg;
        cfg.noise_constraint = false;
        cfg.max_reweight_iters = 1;
        const EllipsoidConstraint open{Vector::Zero(9), Vector::Ones(9), std::numeric_limits<double>::infinity()};
        const EstimateReport r = reweighted_l1(model, y, open, cfg);
        EXPECT_NEAR(r.e_hat.lpNorm<1>(), l1_decode(model, y).e.lpNorm<1>(), 1e-6);
    }
}

TEST(Decoders, TranslationEquivariant) {
    Rng rng(58);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix h = gaussian_matrix(rng, 10, 3);
        const MeasurementModel model(h, Vector::Constant(10, 0.01));
        Vector y = h * rng.normal_vector(3) + 0.01 * rng.normal_vector(10);
        y(2) += 3.0;
        const Vector x0 = rng.normal_vector(3);
        const Vector shifted = y + h * x0;

        EXPECT_LT((least_squares(h, shifted) - least_squares(h, y) - x0).norm(), 1e-10);
        EXPECT_LT((l1_decode(model, shifted).x - l1_decode(model, y).x - x0).norm(), 1e-8);
        EXPECT_LT((l0_bruteforce_decode(model, shifted, 10).x - l0_bruteforce_decode(model, y, 10).x - x0).norm(),
                  1e-8);

        DecoderConfig cfg;
        cfg.damping = 1e-3;
        cfg.max_reweight_iters = 3;
        const Vector a = reweighted_l1(model, shifted, std::nullopt, cfg).x_hat;
        const Vector b = reweighted_l1(model, y, std::nullopt, cfg).x_hat;
        EXPECT_LT((a - b - x0).norm(), 1e-8);
    }
}

TEST(ResilientEstimate, RejectsMismatchedPriorAndBadConfig) {
    const MeasurementModel model = three_sensor();
    const GprModel wrong = point_prior(Vector::Ones(2), 0.1);
    EXPECT_THROW(resilient_estimate(model, wrong, Vector::Zero(1), Vector::Ones(3), DecoderConfig{}), ShapeError);
    DecoderConfig bad;
    bad.tau = 1.0;
    EXPECT_THROW(reweighted_l1(model, Vector::Ones(3), std::nullopt, bad), DomainError);
    EXPECT_THROW(reweighted_l1(model, Vector::Ones(2), std::nullopt, DecoderConfig{}), ShapeError);
}

TEST(ResilientEstimate, DisjointPriorAndNoiseSetsAreInfeasible) {
    const MeasurementModel model = three_sensor(1e-3);
    // The prior demands Hx + eps near (1, 0, 0), which is far from range(H).
    const GprModel prior = point_prior(Eigen::Vector3d(1, 0, 0), 1e-4);
    DecoderConfig cfg;
    cfg.tau = 0.5;
    EXPECT_THROW(resilient_estimate(model, prior, Vector::Zero(1), Eigen::Vector3d(1, 1, 1), cfg), InfeasibleProblem);
}
