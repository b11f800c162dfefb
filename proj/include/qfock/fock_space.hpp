#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qfock {

/// Finite slice of the q-Fock space: alphabet size `d`, kept tensor degrees
/// 0..N, deformation parameter q with -1 < q < 1.
struct TruncationParams {
    int d = 1;
    int N = 0;
    double q = 0.0;

    /// Throws PreconditionError unless d >= 1, N >= 0 and |q| < 1.
    void validate() const;

    friend bool operator==(const TruncationParams&, const TruncationParams&) = default;
};

TruncationParams make_params(int d, int N, double q);

/// A word over {0, ..., d-1}. The empty word is the vacuum slot.
///
/// Ordering is degree first, then lexicographic, which is the layout used
/// by every dense block in the library.
struct MultiIndex {
    std::vector<int> letters;

    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> init) : letters(init) {}
    explicit MultiIndex(std::vector<int> l) : letters(std::move(l)) {}

    int degree() const { return static_cast<int>(letters.size()); }

    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;
};

std::string to_string(const MultiIndex& w);

/// d^k, throwing std::overflow_error instead of wrapping.
std::uint64_t checked_pow(std::uint64_t d, int k);

/// Sum_{m=0}^{N} d^m, throwing std::overflow_error instead of wrapping.
std::uint64_t fock_dim(int d, int N);

/// All d^k words of length k in lexicographic order.
std::vector<MultiIndex> enumerate_basis(int d, int k);

/// Position of a word inside its degree block (first letter most significant).
std::size_t word_rank(const MultiIndex& w, int d);
MultiIndex word_unrank(std::size_t rank, int d, int k);

/// Finitely supported vector in the truncated Fock space, keyed by words.
/// Explicit zeros are never stored.
class FockVector {
public:
    using Coeffs = std::map<MultiIndex, double>;

    explicit FockVector(const TruncationParams& params);

    static FockVector basis(const TruncationParams& params, const MultiIndex& w, double value = 1.0);

    const TruncationParams& params() const { return params_; }
    const Coeffs& coeffs() const { return coeffs_; }

    double get(const MultiIndex& w) const;
    /// Setting zero erases the key.
    void set(const MultiIndex& w, double value);
    void add_to(const MultiIndex& w, double value);

    bool is_zero() const { return coeffs_.empty(); }
    /// -1 for the zero vector.
    int max_degree() const;
    bool is_homogeneous(int k) const;
    FockVector degree_component(int k) const;

    friend bool operator==(const FockVector&, const FockVector&) = default;

private:
    void check_index(const MultiIndex& w) const;

    TruncationParams params_;
    Coeffs coeffs_;
};

FockVector vacuum(const TruncationParams& params);

FockVector add(const FockVector& a, const FockVector& b);
FockVector scale(double c, const FockVector& v);
/// Homogeneous components keyed by degree; zero components are omitted.
std::map<int, FockVector> degree_split(const FockVector& v);

inline FockVector operator+(const FockVector& a, const FockVector& b) { return add(a, b); }
inline FockVector operator-(const FockVector& a, const FockVector& b) { return add(a, scale(-1.0, b)); }
inline FockVector operator*(double c, const FockVector& v) { return scale(c, v); }

/// Re-embed `v` into a space with a larger alphabet or truncation. Fails if
/// some coefficient does not fit the target space.
FockVector embed(const FockVector& v, const TruncationParams& target);

/// Dense per-degree coefficient storage used by the numerical kernels.
/// An empty block stands for a zero block.
class GradedArray {
public:
    GradedArray(int d, int N);
    explicit GradedArray(const TruncationParams& p) : GradedArray(p.d, p.N) {}

    int d() const { return d_; }
    int N() const { return N_; }
    std::size_t block_size(int k) const { return sizes_[static_cast<std::size_t>(k)]; }

    bool has(int k) const { return !blocks_[static_cast<std::size_t>(k)].empty(); }
    std::span<const double> block(int k) const { return blocks_[static_cast<std::size_t>(k)]; }
    /// Allocates a zero block on first access.
    std::span<double> mutable_block(int k);

    void axpy(double alpha, const GradedArray& x);
    void scale(double alpha);

    friend bool operator==(const GradedArray&, const GradedArray&) = default;

private:
    int d_;
    int N_;
    std::vector<std::size_t> sizes_;
    std::vector<std::vector<double>> blocks_;
};

GradedArray to_graded(const FockVector& v);
FockVector to_fock(const GradedArray& a, const TruncationParams& params);

/// Euclidean (undeformed) dot product of two dense blocks.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace qfock
