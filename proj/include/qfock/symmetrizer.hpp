#pragma once

#include "qfock/fock_space.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace qfock {

inline constexpr int kNaiveMaxDegree = 9;
inline constexpr std::size_t kGramMaxSize = 4096;
inline constexpr double kIllConditionedEig = 1e-13;

/// Number of pairs a < b with perm(b) < perm(a). `perm` lists the images of
/// 1..k and must be a bijection on {1..k}.
int inversions(std::span<const int> perm);

//
// Symmetrizer kernels on a dense degree-k block of length d^k.
//

/// Serial reference: sums q^{i(sigma)} sigma.v over all k! permutations.
void apply_pq_block_naive(int d, int k, double q, std::span<const double> in, std::span<double> out,
                          int max_degree = kNaiveMaxDegree);

/// Recursive factorization P^k = (1 (x) P^{k-1}) R_k with
/// R_k = sum_m q^m (move slot m+1 to the front), unrolled into k-1 passes.
/// O(k^2 d^k); OpenMP-parallel over the block.
void apply_pq_block(int d, int k, double q, std::span<const double> in, std::span<double> out);

/// P_q^k applied to a homogeneous degree-k vector by full enumeration.
FockVector apply_pq_naive(int k, double q, const FockVector& v, int max_degree = kNaiveMaxDegree);
FockVector apply_pq_fast(int k, double q, const FockVector& v);

/// Degree-k Gram matrix of <.,.>_q in the lexicographic word basis, with
/// lazily cached spectral data. Copies share the cache.
class GramBlock {
public:
    GramBlock(int k, int d, double q, Eigen::MatrixXd G);

    int k() const { return k_; }
    int d() const { return d_; }
    double q() const { return q_; }
    const Eigen::MatrixXd& matrix() const { return G_; }
    Eigen::Index size() const { return G_.rows(); }

    /// Ascending eigenvalues and the matching orthonormal eigenvectors.
    const Eigen::VectorXd& eigenvalues() const;
    const Eigen::MatrixXd& eigenvectors() const;

    /// All three throw NumericalError when the smallest eigenvalue is below
    /// kIllConditionedEig.
    const Eigen::MatrixXd& sqrt() const;
    const Eigen::MatrixXd& inv_sqrt() const;
    const Eigen::MatrixXd& inverse() const;

private:
    struct Spectral {
        std::once_flag eig_once;
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        std::once_flag fn_once;
        Eigen::MatrixXd sqrt, inv_sqrt, inverse;
    };
    const Spectral& spectral() const;
    const Spectral& functions() const;

    int k_;
    int d_;
    double q_;
    Eigen::MatrixXd G_;
    std::shared_ptr<Spectral> cache_;
};

/// Column j holds P_q^k e_j, built with the fast kernel in parallel over
/// columns and symmetrized on output. Throws PreconditionError when d^k
/// exceeds `max_size`.
GramBlock gram_matrix(int k, int d, double q, std::size_t max_size = kGramMaxSize);
/// Serial reference construction through the naive permutation sum.
GramBlock gram_matrix_reference(int k, int d, double q);

/// Gram blocks for one truncated space, built on first use. Safe under
/// concurrent first access.
class GramCache {
public:
    explicit GramCache(const TruncationParams& params, std::size_t max_size = kGramMaxSize);

    const TruncationParams& params() const { return params_; }
    const GramBlock& block(int k) const;

    /// out = G_k in, evaluated matrix-free (never materializes the block).
    void apply(int k, std::span<const double> in, std::span<double> out) const;

private:
    struct Slot {
        std::once_flag once;
        std::unique_ptr<GramBlock> block;
    };
    TruncationParams params_;
    std::size_t max_size_;
    std::unique_ptr<Slot[]> slots_;
};

/// sum_k u_k^T G_k v_k; distinct degrees are orthogonal.
double q_inner(const FockVector& u, const FockVector& v, const GramCache& cache);
double q_inner(const GradedArray& u, const GradedArray& v, double q);
double q_norm(const GradedArray& u, double q);

struct SqrtPair {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv_sqrt;
    double tol = 0.0;
};

/// Spectral square root and its inverse. Residuals ||S S - G|| and
/// ||S S^{-1} - I|| are checked in the spectral norm against `tol`.
SqrtPair gram_sqrt_pair(const GramBlock& block, double tol = 1e-10);

double min_eigenvalue(const GramBlock& block);

struct SpectralReport {
    int k = 0;
    int d = 0;
    double q = 0.0;
    double min_eig = 0.0;
    double max_eig = 0.0;
};

SpectralReport spectral_report(const GramBlock& block);

/// Largest |eigenvalue| of a symmetric matrix.
double symmetric_spectral_norm(const Eigen::MatrixXd& m);

}  // namespace qfock
