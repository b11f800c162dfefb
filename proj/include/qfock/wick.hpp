#pragma once

#include "qfock/fock_space.hpp"
#include "qfock/kernels.hpp"
#include "qfock/operators.hpp"

#include <compare>
#include <map>
#include <vector>

namespace qfock {

/// s(e_index) for Side::left, the mirrored t(e_index) for Side::right.
struct FieldLetter {
    Side side = Side::left;
    int index = 0;

    friend auto operator<=>(const FieldLetter&, const FieldLetter&) = default;
};

/// Non-commutative polynomial in basis field operators, evaluated
/// matrix-free. A monomial {a1, a2, ..., am} is the product
/// s(a1) s(a2) ... s(am): a_m acts first.
///
/// Truncated fields stay self-adjoint in the q-metric, so reversing every
/// monomial gives the exact metric adjoint on the truncated space.
class FieldPolynomial {
public:
    using Monomial = std::vector<FieldLetter>;
    using Terms = std::map<Monomial, double>;

    explicit FieldPolynomial(const TruncationParams& params);
    static FieldPolynomial constant(const TruncationParams& params, double c);

    const TruncationParams& params() const { return params_; }
    const Terms& terms() const { return terms_; }
    /// Longest monomial; -1 for the zero polynomial.
    int degree() const;

    void add_term(const Monomial& m, double c);

    FieldPolynomial adjoint() const;

    GradedArray apply(const GradedArray& v) const;
    FockVector apply(const FockVector& v) const;

    FockOperator to_operator(OperatorTag tag = OperatorTag::composite) const;

    friend FieldPolynomial operator+(const FieldPolynomial& a, const FieldPolynomial& b);
    friend FieldPolynomial operator*(double c, const FieldPolynomial& a);
    friend FieldPolynomial operator*(const FieldPolynomial& a, const FieldPolynomial& b);

private:
    TruncationParams params_;
    Terms terms_;
};

/// The field-polynomial W with W(eta) Omega = eta, from the recursion
///   W(xi (x) w) = s(xi) W(w) - sum_i q^{i-1} <w_i, xi> W(w without slot i).
/// `eta` must be homogeneous.
FieldPolynomial wick_polynomial(const FockVector& eta);
/// Mirrored recursion in right fields t(.) appending on the right.
FieldPolynomial right_wick_polynomial(const FockVector& eta);

/// Dense forms of the above (guarded by kOperatorMaxDim).
FockOperator wick(const FockVector& eta);
FockOperator right_wick(const FockVector& eta);

/// Degree of a homogeneous vector; throws on zero or mixed-degree input.
int homogeneous_degree(const FockVector& v);

}  // namespace qfock
