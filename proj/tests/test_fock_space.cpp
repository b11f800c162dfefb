#include "qfock/errors.hpp"
#include "qfock/fock_space.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace qfock;
using qfock::testing::e;

TEST(FockSpace, ParamsValidation) {
    EXPECT_NO_THROW(make_params(2, 3, 0.5));
    EXPECT_THROW(make_params(0, 3, 0.5), PreconditionError);
    EXPECT_THROW(make_params(2, -1, 0.5), PreconditionError);
    EXPECT_THROW(make_params(2, 3, 1.0), PreconditionError);
    EXPECT_THROW(make_params(2, 3, -1.0), PreconditionError);
}

TEST(FockSpace, EnumerateBasisSmall) {
    EXPECT_EQ(enumerate_basis(2, 0), (std::vector<MultiIndex>{MultiIndex{}}));
    EXPECT_EQ(enumerate_basis(2, 1), (std::vector<MultiIndex>{{0}, {1}}));
    EXPECT_EQ(enumerate_basis(2, 2), (std::vector<MultiIndex>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(FockSpace, EnumerateBasisCountsAndUniqueness) {
    for (int d = 1; d <= 4; ++d)
        for (int k = 0; k <= 8; ++k) {
            const auto basis = enumerate_basis(d, k);
            ASSERT_EQ(basis.size(), checked_pow(static_cast<std::uint64_t>(d), k));
            std::set<MultiIndex> uniq(basis.begin(), basis.end());
            EXPECT_EQ(uniq.size(), basis.size());
            EXPECT_TRUE(std::is_sorted(basis.begin(), basis.end()));
            for (std::size_t r = 0; r < basis.size(); r += 7) EXPECT_EQ(word_rank(basis[r], d), r);
        }
}

TEST(FockSpace, FockDim) {
    EXPECT_EQ(fock_dim(2, 0), 1u);
    EXPECT_EQ(fock_dim(2, 3), 15u);
    EXPECT_EQ(fock_dim(3, 4), 121u);
    for (int d = 1; d <= 4; ++d)
        for (int N = 0; N <= 6; ++N) {
            std::uint64_t total = 0;
            for (int m = 0; m <= N; ++m) total += enumerate_basis(d, m).size();
            EXPECT_EQ(fock_dim(d, N), total);
        }
    EXPECT_THROW(fock_dim(2, 64), std::overflow_error);
    EXPECT_THROW(fock_dim(1000, 10), std::overflow_error);
}

TEST(FockSpace, Vacuum) {
    const auto p = make_params(2, 4, 0.5);
    const auto v = vacuum(p);
    ASSERT_EQ(v.coeffs().size(), 1u);
    EXPECT_EQ(v.get(MultiIndex{}), 1.0);
    EXPECT_TRUE(v.is_homogeneous(0));
}

TEST(FockSpace, VectorArithmetic) {
    const auto p = make_params(2, 3, 0.3);
    std::mt19937_64 rng(3);
    const auto v = qfock::testing::random_vector(p, 3, rng);
    EXPECT_TRUE(add(v, scale(-1.0, v)).is_zero());
    EXPECT_TRUE(scale(0.0, v).is_zero());
    EXPECT_EQ(scale(2.0, scale(0.5, v)), v);

    const auto w = vacuum(p) + e(p, {0, 1}, 2.0);
    const auto parts = degree_split(w);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts.at(0), vacuum(p));
    EXPECT_EQ(parts.at(2), e(p, {0, 1}, 2.0));
}

TEST(FockSpace, MismatchedParamsRejected) {
    const auto a = vacuum(make_params(2, 3, 0.3));
    const auto b = vacuum(make_params(2, 4, 0.3));
    EXPECT_THROW(add(a, b), PreconditionError);
}

TEST(FockSpace, IndexOutOfRangeRejected) {
    const auto p = make_params(2, 2, 0.0);
    FockVector v(p);
    EXPECT_THROW(v.set(MultiIndex{2}, 1.0), PreconditionError);
    EXPECT_THROW(v.set(MultiIndex{0, 0, 0}, 1.0), PreconditionError);
}

TEST(FockSpace, GradedRoundTrip) {
    const auto p = make_params(3, 3, -0.4);
    std::mt19937_64 rng(11);
    const auto v = qfock::testing::random_vector(p, 3, rng);
    EXPECT_EQ(to_fock(to_graded(v), p), v);
}
