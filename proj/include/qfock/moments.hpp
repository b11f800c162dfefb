#pragma once

#include "qfock/fock_space.hpp"
#include "qfock/operators.hpp"
#include "qfock/wick.hpp"

#include <span>
#include <vector>

namespace qfock {

/// tau(T) = <T Omega, Omega>_q.
double vacuum_expectation(const FockOperator& T);
double vacuum_expectation(const FieldPolynomial& x);

/// Arguments of s(xi_1) ... s(xi_n); every xi is degree 1.
struct MomentRequest {
    std::vector<FockVector> vectors;
    TruncationParams params;
};

/// <s(xi_1) ... s(xi_n) Omega, Omega>_q by sequential application.
/// Requires N >= n.
double field_moment(const MomentRequest& req);

/// Sum over pair partitions of q^{crossings} prod_{(a<b)} <xi_b, xi_a>,
/// with the undeformed inner product. Zero for odd n.
double pair_partition_moment(std::span<const FockVector> vectors, double q);

struct TracialityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double discrepancy = 0.0;
};

/// tau(x y) against tau(y x); needs deg x + deg y <= N.
TracialityReport traciality_check(const FieldPolynomial& x, const FieldPolynomial& y);

}  // namespace qfock
