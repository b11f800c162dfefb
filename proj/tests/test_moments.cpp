#include "qfock/errors.hpp"
#include "qfock/moments.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace qfock;
using qfock::testing::e;

TEST(VacuumExpectation, Examples) {
    for (double q : {-0.5, 0.0, 0.5}) {
        const auto p = make_params(1, 4, q);
        const GramCache cache(p);
        const auto s = field(cache, e(p, {0}));
        EXPECT_DOUBLE_EQ(vacuum_expectation(identity_operator(p)), 1.0);
        EXPECT_NEAR(vacuum_expectation(s * s), 1.0, 1e-13);
        EXPECT_NEAR(vacuum_expectation(s * s * s * s), 2.0 + q, 1e-12);
    }
}

TEST(FieldMoment, Examples) {
    const auto p = make_params(2, 4, 0.5);
    EXPECT_EQ(field_moment({{e(p, {0}), e(p, {0}), e(p, {1})}, p}), 0.0);
    EXPECT_EQ(field_moment({{e(p, {0}), e(p, {1})}, p}), 0.0);
    EXPECT_NEAR(field_moment({{e(p, {0}), e(p, {0}), e(p, {0}), e(p, {0})}, p}), 2.5, 1e-14);
    EXPECT_THROW(field_moment({{e(p, {0}), e(p, {0}), e(p, {0}), e(p, {0}), e(p, {0}), e(p, {0})}, p}),
                 PreconditionError);
}

TEST(PairPartition, Examples) {
    const auto p = make_params(2, 1, 0.3);
    const std::vector<FockVector> two{e(p, {0}, 2.0), e(p, {0}, 3.0)};
    EXPECT_DOUBLE_EQ(pair_partition_moment(two, 0.3), 6.0);
    const std::vector<FockVector> three{e(p, {0}), e(p, {0}), e(p, {0})};
    EXPECT_EQ(pair_partition_moment(three, 0.3), 0.0);
    const std::vector<FockVector> four(4, e(p, {0}));
    EXPECT_DOUBLE_EQ(pair_partition_moment(four, 0.3), 2.3);
    const std::vector<FockVector> six(6, e(p, {0}));
    EXPECT_NEAR(pair_partition_moment(six, 0.0), 5.0, 1e-15);  // Catalan(3) non-crossing pairings
}

TEST(FieldMoment, MatchesPairPartitionOracle) {
    std::mt19937_64 rng(101);
    for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
        for (int n = 1; n <= 8; ++n) {
            const auto p = make_params(2, n, q);
            for (int t = 0; t < 4; ++t) {
                std::vector<FockVector> xs;
                for (int i = 0; i < n; ++i) xs.push_back(qfock::testing::random_homogeneous(p, 1, rng));
                EXPECT_NEAR(field_moment({xs, p}), pair_partition_moment(xs, q), 1e-9) << "q=" << q << " n=" << n;
            }
        }
}

TEST(Traciality, ExamplesAndErrors) {
    const auto p = make_params(2, 4, 0.5);
    const auto x = wick_polynomial(e(p, {0}));
    const auto y = wick_polynomial(e(p, {0, 1}));
    EXPECT_EQ(traciality_check(y, y).discrepancy, 0.0);
    EXPECT_LE(traciality_check(x, y).discrepancy, 1e-10);
    const auto z = wick_polynomial(e(p, {1}));
    const auto r = traciality_check(x, z);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.rhs, 0.0);
    EXPECT_THROW(traciality_check(y, y * y), PreconditionError);
}

TEST(Traciality, RandomWickWords) {
    std::mt19937_64 rng(55);
    for (double q : {-0.9, -0.5, 0.5, 0.9})
        for (int kx = 0; kx <= 3; ++kx)
            for (int ky = 0; ky <= 3; ++ky) {
                const auto p = make_params(3, kx + ky, q);
                const auto x = wick_polynomial(qfock::testing::random_homogeneous(p, kx, rng));
                const auto y = wick_polynomial(qfock::testing::random_homogeneous(p, ky, rng));
                EXPECT_LE(traciality_check(x, y).discrepancy, 1e-9);
            }
}

TEST(VacuumExpectation, PositivityOfSquares) {
    std::mt19937_64 rng(7);
    for (double q : {-0.8, 0.2, 0.85})
        for (int k = 0; k <= 3; ++k) {
            const auto p = make_params(2, 2 * k, q);
            const auto eta = qfock::testing::random_homogeneous(p, k, rng);
            const auto x = wick_polynomial(eta);
            const double tau = vacuum_expectation(x.adjoint() * x);
            const double norm = qfock::testing::q_norm(x.apply(vacuum(p)));
            EXPECT_GE(tau, 0.0);
            EXPECT_NEAR(tau, norm * norm, 1e-10 * std::max(1.0, tau));
        }
}
