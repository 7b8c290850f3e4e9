#include "oracles.hpp"

#include "resest/attack.hpp"
#include "resest/errors.hpp"
#include "resest/measurement_model.hpp"
#include "resest/weighted_l1.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

using namespace resest;
using resest::testing::gaussian_matrix;
using resest::testing::uniform_int;

namespace {

std::uint64_t seed_with_first_sign(double sign) {
    for (std::uint64_t s = 0;; ++s) {
        if (attack_signs(1, s)(0) == sign) {
            return s;
        }
    }
}

}  // namespace

TEST(SensorBias, Examples) {
    const Eigen::Vector2d y(2, 4);
    const Vector up = sensor_bias_attack(y, {1}, 5.0, seed_with_first_sign(1.0));
    EXPECT_EQ(up, Eigen::Vector2d(2, 24));
    const Vector down = sensor_bias_attack(y, {1}, 5.0, seed_with_first_sign(-1.0));
    EXPECT_EQ(down, Eigen::Vector2d(2, -16));
    EXPECT_EQ(sensor_bias_attack(y, {0, 1}, 0.0, 9), Vector(y));
    EXPECT_THROW(sensor_bias_attack(y, {}, 5.0, 1), DomainError);
    EXPECT_THROW(sensor_bias_attack(y, {2}, 5.0, 1), DomainError);
}

TEST(SensorBias, DeterministicAndChangesExactlyTheTargets) {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = uniform_int(rng, 1, 30);
        Vector y = rng.normal_vector(m);
        const int count = uniform_int(rng, 1, m);
        const std::uint64_t seed = rng.next_u64();
        const IndexSet targets = random_support(m, count, seed);
        const Vector a = sensor_bias_attack(y, targets, 5.0, seed);
        EXPECT_EQ(a, sensor_bias_attack(y, targets, 5.0, seed));
        int changed = 0;
        for (int j = 0; j < m; ++j) {
            const bool target = std::binary_search(targets.begin(), targets.end(), j);
            if (a(j) != y(j)) {
                ++changed;
                EXPECT_TRUE(target);
                EXPECT_NEAR(std::abs(a(j) - y(j)), 5.0 * std::abs(y(j)), 1e-12 * std::abs(y(j)));
            }
        }
        EXPECT_EQ(changed, count);
    }
}

TEST(StateTargeted, Examples) {
    EXPECT_EQ(state_targeted_attack(Matrix::Ones(3, 1), {0}, 0.5, Vector::Constant(1, 2.0)), Eigen::Vector3d(1, 1, 1));
    Rng rng(62);
    const Matrix h = gaussian_matrix(rng, 6, 3);
    EXPECT_EQ(state_targeted_attack(h, {0, 2}, 0.0, rng.normal_vector(3)), Vector::Zero(6));
    EXPECT_THROW(state_targeted_attack(h, {3}, 0.5, Vector::Ones(3)), DomainError);
}

TEST(StateTargeted, LiesInRangeOfH) {
    Rng rng(63);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = uniform_int(rng, 1, 6);
        const int m = uniform_int(rng, n + 1, 20);
        const Matrix h = gaussian_matrix(rng, m, n);
        const Vector x = rng.normal_vector(n);
        const IndexSet targets = random_support(n, uniform_int(rng, 1, n), rng.next_u64());
        const Vector a = state_targeted_attack(h, targets, 0.5, x);
        EXPECT_LT((residual_projector(qr_split(h)) * a).norm(), 1e-10 * std::max(1.0, a.norm()));
        const Vector c = least_squares(h, a);
        for (int j = 0; j < n; ++j) {
            const bool target = std::binary_search(targets.begin(), targets.end(), j);
            EXPECT_NEAR(c(j), target ? 0.5 * x(j) : 0.0, 1e-10);
        }
    }
}

TEST(RandomSupport, EdgeCases) {
    EXPECT_EQ(random_support(5, 5, 1), (IndexSet{0, 1, 2, 3, 4}));
    EXPECT_TRUE(random_support(5, 0, 1).empty());
    EXPECT_EQ(random_support(7, 3, 42), random_support(7, 3, 42));
    EXPECT_THROW(random_support(3, 4, 1), DomainError);
    EXPECT_THROW(random_support(3, -1, 1), DomainError);
    const IndexSet s = random_support(50, 20, 99);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
}

TEST(RandomSupport, IndexFrequenciesAreUniform) {
    const int m = 10;
    const int count = 3;
    const int draws = 100000;
    std::vector<int> hits(m, 0);
    for (int i = 0; i < draws; ++i) {
        for (int j : random_support(m, count, derive_seed(7, static_cast<std::uint64_t>(i)))) {
            ++hits[static_cast<std::size_t>(j)];
        }
    }
    for (int h : hits) {
        EXPECT_NEAR(static_cast<double>(h) / draws, static_cast<double>(count) / m, 0.01);
    }
}

TEST(AttackSigns, BalancedAndReproducible) {
    const Vector s = attack_signs(20000, 5);
    EXPECT_TRUE((s.array().abs() == 1.0).all());
    EXPECT_NEAR(s.mean(), 0.0, 0.03);
    EXPECT_EQ(s.head(100), attack_signs(100, 5));
}
