#pragma once

#include "qfock/fock_space.hpp"
#include "qfock/kernels.hpp"
#include "qfock/symmetrizer.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qfock {

enum class OperatorTag {
    identity,
    creation,
    annihilation,
    field,
    wick,
    right_creation,
    right_annihilation,
    right_field,
    right_wick,
    composite,
};

std::string to_string(OperatorTag tag);

/// Largest fock_dim a dense operator may span.
inline constexpr std::uint64_t kOperatorMaxDim = 8192;

/// Finite linear map on the truncated Fock space, stored as dense blocks
/// keyed by (output degree, input degree) in the lexicographic word basis.
class FockOperator {
public:
    using Key = std::pair<int, int>;
    using Blocks = std::map<Key, Eigen::MatrixXd>;

    FockOperator(const TruncationParams& params, OperatorTag tag, std::string generator = {});

    const TruncationParams& params() const { return params_; }
    OperatorTag tag() const { return tag_; }
    const std::string& generator() const { return generator_; }
    const Blocks& blocks() const { return blocks_; }

    /// Zero-size matrix for absent blocks.
    const Eigen::MatrixXd& block(int k_out, int k_in) const;
    bool has_block(int k_out, int k_in) const { return blocks_.count({k_out, k_in}) != 0; }
    void set_block(int k_out, int k_in, Eigen::MatrixXd m);
    void add_block(int k_out, int k_in, const Eigen::MatrixXd& m);

    std::vector<Key> degrees() const;

    GradedArray apply(const GradedArray& v) const;
    FockVector apply(const FockVector& v) const;

    FockOperator retagged(OperatorTag tag, std::string generator) const;

private:
    TruncationParams params_;
    OperatorTag tag_;
    std::string generator_;
    Blocks blocks_;
};

FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(double c, const FockOperator& a);
/// Composition: (a * b) v = a (b v).
FockOperator operator*(const FockOperator& a, const FockOperator& b);

/// Largest |entry difference| over the union of blocks. When `max_in_degree`
/// is given only blocks with input degree <= max_in_degree are compared.
double max_abs_diff(const FockOperator& a, const FockOperator& b, int max_in_degree = -1);

FockOperator identity_operator(const TruncationParams& params);

/// Dense matrix of a matrix-free linear map, column by column (OpenMP over
/// columns). `apply(in, out)` must accumulate into a zero-initialized `out`.
FockOperator materialize(const TruncationParams& params, OperatorTag tag, std::string generator,
                         const std::function<void(const GradedArray&, GradedArray&)>& apply);

/// Prepends xi; degree-N inputs are sent to zero.
FockOperator creation(const FockVector& xi);
/// q-metric adjoint of creation: A_k = G_{k-1}^{-1} C_k^T G_k.
FockOperator annihilation(const GramCache& cache, const FockVector& xi);
/// Slot-sum formula, materialized; must agree with annihilation().
FockOperator annihilation_explicit(const FockVector& xi);
FockOperator field(const GramCache& cache, const FockVector& xi);

/// Appends xi on the right; adjoint and field built the same way.
FockOperator right_creation(const FockVector& xi);
FockOperator right_annihilation(const GramCache& cache, const FockVector& xi);
FockOperator right_field(const GramCache& cache, const FockVector& xi);

/// Blockwise G_{k_in}^{-1} B^T G_{k_out}.
FockOperator adjoint(const GramCache& cache, const FockOperator& T);

/// Largest singular value of G^{1/2} T G^{-1/2} over all degrees present.
double op_norm(const GramCache& cache, const FockOperator& T);

/// Reverses every word; an isometry of the q-metric with J^2 = 1.
FockVector involution_J(const FockVector& v);

}  // namespace qfock
