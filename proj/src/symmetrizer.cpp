#include "qfock/symmetrizer.hpp"

#include "qfock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qfock {

namespace {

constexpr std::ptrdiff_t kParallelThreshold = 4096;

std::vector<double> powers(double q, int count) {
    std::vector<double> p(static_cast<std::size_t>(std::max(count, 1)));
    p[0] = 1.0;
    for (std::size_t i = 1; i < p.size(); ++i) p[i] = p[i - 1] * q;
    return p;
}

std::size_t block_len(int d, int k) { return checked_pow(static_cast<std::uint64_t>(d), k); }

// Inversion count of a 0-based permutation.
int count_inversions(const std::vector<int>& sigma) {
    int inv = 0;
    for (std::size_t a = 0; a < sigma.size(); ++a)
        for (std::size_t b = a + 1; b < sigma.size(); ++b)
            if (sigma[b] < sigma[a]) ++inv;
    return inv;
}

// Every sigma in S_k, flattened, with its weight q^{i(sigma)}.
struct PermTable {
    std::vector<int> perms;
    std::vector<double> weights;
};

PermTable permutation_table(int k, double q) {
    PermTable t;
    std::vector<int> sigma(static_cast<std::size_t>(k));
    std::iota(sigma.begin(), sigma.end(), 0);
    const auto qp = powers(q, k * (k - 1) / 2 + 1);
    do {
        t.perms.insert(t.perms.end(), sigma.begin(), sigma.end());
        t.weights.push_back(qp[static_cast<std::size_t>(count_inversions(sigma))]);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return t;
}

// Naive sum over S_k into `acc`. The sum cancels heavily for q < 0, so the
// accumulator is extended precision.
void naive_accumulate(int d, int k, double q, std::span<const double> in, std::vector<long double>& acc) {
    const auto table = permutation_table(k, q);
    const auto ku = static_cast<std::size_t>(k);
    const auto ud = static_cast<std::size_t>(d);
    acc.assign(in.size(), 0.0L);
    std::vector<int> letters(ku);
    for (std::size_t x = 0; x < in.size(); ++x) {
        if (in[x] == 0.0) continue;
        std::size_t r = x;
        for (std::size_t t = ku; t-- > 0;) {
            letters[t] = static_cast<int>(r % ud);
            r /= ud;
        }
        const long double c = in[x];
        for (std::size_t s = 0; s < table.weights.size(); ++s) {
            const int* sigma = table.perms.data() + s * ku;
            std::size_t y = 0;
            for (std::size_t t = 0; t < ku; ++t) y = y * ud + static_cast<std::size_t>(letters[static_cast<std::size_t>(sigma[t])]);
            acc[y] += table.weights[s] * c;
        }
    }
}

void check_naive_degree(int k, int max_degree) {
    if (k > max_degree)
        throw PreconditionError("naive symmetrizer limited to k <= " + std::to_string(max_degree) +
                                " (k! terms), got k=" + std::to_string(k));
}

void check_homogeneous(int k, const FockVector& v) {
    if (!v.is_homogeneous(k))
        throw PreconditionError("symmetrizer input must be homogeneous of degree " + std::to_string(k));
    if (k > v.params().N) throw PreconditionError("degree exceeds truncation");
}

}  // namespace

int inversions(std::span<const int> perm) {
    const auto k = perm.size();
    std::vector<bool> seen(k, false);
    for (int p : perm) {
        if (p < 1 || static_cast<std::size_t>(p) > k || seen[static_cast<std::size_t>(p - 1)])
            throw PreconditionError("inversions: input is not a bijection on {1..k}");
        seen[static_cast<std::size_t>(p - 1)] = true;
    }
    int inv = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (perm[b] < perm[a]) ++inv;
    return inv;
}

void apply_pq_block_naive(int d, int k, double q, std::span<const double> in, std::span<double> out,
                          int max_degree) {
    check_naive_degree(k, max_degree);
    std::vector<long double> acc;
    naive_accumulate(d, k, q, in.first(block_len(d, k)), acc);
    for (std::size_t y = 0; y < acc.size(); ++y) out[y] = static_cast<double>(acc[y]);
}

void apply_pq_block(int d, int k, double q, std::span<const double> in, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(block_len(d, k));
    if (k <= 1) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    const auto qp = powers(q, k);
    std::vector<double> src(in.begin(), in.end());
    std::vector<double> dst(static_cast<std::size_t>(n));
    const auto ud = static_cast<std::ptrdiff_t>(d);

    // Pass j applies R_j to the trailing j slots; j = k first.
    for (int j = k; j >= 2; --j) {
        std::fill(dst.begin(), dst.end(), 0.0);
        const auto tail = static_cast<std::ptrdiff_t>(block_len(d, j));
        const auto top = tail / ud;  // d^{j-1}
        for (int m = 0; m < j; ++m) {
            const double w = qp[static_cast<std::size_t>(m)];
            if (w == 0.0) continue;
            const auto low = static_cast<std::ptrdiff_t>(block_len(d, j - 1 - m));  // d^{j-1-m}
            const auto mid = low * ud;                                            // d^{j-m}
            // For fixed m the slot move is a bijection, so the writes are disjoint.
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
            for (std::ptrdiff_t x = 0; x < n; ++x) {
                const double v = src[static_cast<std::size_t>(x)];
                if (v == 0.0) continue;
                const auto hi = x / tail;
                const auto t = x % tail;
                const auto prefix = t / mid;
                const auto digit = (t / low) % ud;
                const auto suffix = t % low;
                const auto y = hi * tail + digit * top + prefix * low + suffix;
                dst[static_cast<std::size_t>(y)] += w * v;
            }
        }
        std::swap(src, dst);
    }
    std::copy(src.begin(), src.end(), out.begin());
}

FockVector apply_pq_naive(int k, double q, const FockVector& v, int max_degree) {
    check_homogeneous(k, v);
    check_naive_degree(k, max_degree);
    const int d = v.params().d;
    std::vector<double> in(block_len(d, k), 0.0);
    for (const auto& [w, c] : v.coeffs()) in[word_rank(w, d)] = c;
    std::vector<long double> acc;
    naive_accumulate(d, k, q, in, acc);
    FockVector out(v.params());
    for (std::size_t y = 0; y < acc.size(); ++y)
        if (acc[y] != 0.0L) out.set(word_unrank(y, d, k), static_cast<double>(acc[y]));
    return out;
}

FockVector apply_pq_fast(int k, double q, const FockVector& v) {
    check_homogeneous(k, v);
    GradedArray in = to_graded(v);
    GradedArray out(v.params());
    if (in.has(k)) apply_pq_block(v.params().d, k, q, in.block(k), out.mutable_block(k));
    return to_fock(out, v.params());
}

// ---------------------------------------------------------------------------
// GramBlock

GramBlock::GramBlock(int k, int d, double q, Eigen::MatrixXd G)
    : k_(k), d_(d), q_(q), G_(std::move(G)), cache_(std::make_shared<Spectral>()) {}

const GramBlock::Spectral& GramBlock::spectral() const {
    std::call_once(cache_->eig_once, [this] {
        const auto n = G_.rows();
        if (G_.isIdentity(0.0)) {
            cache_->values = Eigen::VectorXd::Ones(n);
            cache_->vectors = Eigen::MatrixXd::Identity(n, n);
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G_);
        if (es.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");
        cache_->values = es.eigenvalues();
        cache_->vectors = es.eigenvectors();
    });
    return *cache_;
}

const GramBlock::Spectral& GramBlock::functions() const {
    const auto& s = spectral();
    if (s.values.size() > 0 && s.values(0) < kIllConditionedEig) {
        throw NumericalError("ill-conditioned Gram block (k=" + std::to_string(k_) + ", d=" + std::to_string(d_) +
                             ", q=" + std::to_string(q_) + "): smallest eigenvalue " + std::to_string(s.values(0)) +
                             " below 1e-13");
    }
    std::call_once(cache_->fn_once, [this, &s] {
        const auto n = G_.rows();
        if (G_.isIdentity(0.0)) {
            cache_->sqrt = cache_->inv_sqrt = cache_->inverse = Eigen::MatrixXd::Identity(n, n);
            return;
        }
        const Eigen::VectorXd r = s.values.cwiseSqrt();
        const Eigen::MatrixXd& V = s.vectors;
        Eigen::MatrixXd S = V * r.asDiagonal() * V.transpose();
        Eigen::MatrixXd Si = V * r.cwiseInverse().asDiagonal() * V.transpose();
        Eigen::MatrixXd Gi = V * s.values.cwiseInverse().asDiagonal() * V.transpose();
        cache_->sqrt = 0.5 * (S + S.transpose());
        cache_->inv_sqrt = 0.5 * (Si + Si.transpose());
        cache_->inverse = 0.5 * (Gi + Gi.transpose());
    });
    return *cache_;
}

const Eigen::VectorXd& GramBlock::eigenvalues() const { return spectral().values; }
const Eigen::MatrixXd& GramBlock::eigenvectors() const { return spectral().vectors; }
const Eigen::MatrixXd& GramBlock::sqrt() const { return functions().sqrt; }
const Eigen::MatrixXd& GramBlock::inv_sqrt() const { return functions().inv_sqrt; }
const Eigen::MatrixXd& GramBlock::inverse() const { return functions().inverse; }

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& G) { return 0.5 * (G + G.transpose()); }

}  // namespace

GramBlock gram_matrix(int k, int d, double q, std::size_t max_size) {
    if (d < 1 || k < 0) throw PreconditionError("gram_matrix needs d >= 1 and k >= 0");
    if (!(std::abs(q) < 1.0)) throw PreconditionError("gram_matrix needs |q| < 1");
    const auto n = checked_pow(static_cast<std::uint64_t>(d), k);
    if (n > max_size)
        throw PreconditionError("Gram block size d^k = " + std::to_string(n) + " exceeds guard " +
                                std::to_string(max_size));
    const auto sn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G(sn, sn);
#pragma omp parallel
    {
        std::vector<double> e(n, 0.0);
#pragma omp for schedule(dynamic)
        for (Eigen::Index j = 0; j < sn; ++j) {
            e[static_cast<std::size_t>(j)] = 1.0;
            apply_pq_block(d, k, q, e, std::span<double>(G.col(j).data(), n));
            e[static_cast<std::size_t>(j)] = 0.0;
        }
    }
    return GramBlock(k, d, q, symmetrized(G));
}

GramBlock gram_matrix_reference(int k, int d, double q) {
    const auto n = checked_pow(static_cast<std::uint64_t>(d), k);
    const auto sn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G(sn, sn);
    std::vector<double> e(n, 0.0);
    for (Eigen::Index j = 0; j < sn; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        apply_pq_block_naive(d, k, q, e, std::span<double>(G.col(j).data(), n));
        e[static_cast<std::size_t>(j)] = 0.0;
    }
    return GramBlock(k, d, q, symmetrized(G));
}

// ---------------------------------------------------------------------------
// GramCache

GramCache::GramCache(const TruncationParams& params, std::size_t max_size)
    : params_(params), max_size_(max_size), slots_(new Slot[static_cast<std::size_t>(params.N) + 1]) {
    params_.validate();
}

const GramBlock& GramCache::block(int k) const {
    if (k < 0 || k > params_.N) throw PreconditionError("Gram degree outside truncation");
    auto& slot = slots_[static_cast<std::size_t>(k)];
    std::call_once(slot.once, [&] {
        slot.block = std::make_unique<GramBlock>(gram_matrix(k, params_.d, params_.q, max_size_));
    });
    return *slot.block;
}

void GramCache::apply(int k, std::span<const double> in, std::span<double> out) const {
    apply_pq_block(params_.d, k, params_.q, in, out);
}

double q_inner(const GradedArray& u, const GradedArray& v, double q) {
    if (u.d() != v.d() || u.N() != v.N()) throw PreconditionError("q_inner: operands live in different spaces");
    double s = 0.0;
    std::vector<double> tmp;
    for (int k = 0; k <= u.N(); ++k) {
        if (!u.has(k) || !v.has(k)) continue;
        tmp.resize(v.block_size(k));
        apply_pq_block(v.d(), k, q, v.block(k), tmp);
        s += dot(u.block(k), tmp);
    }
    return s;
}

double q_inner(const FockVector& u, const FockVector& v, const GramCache& cache) {
    if (!(u.params() == v.params()) || !(u.params() == cache.params()))
        throw PreconditionError("q_inner: operands live in different truncated spaces");
    return q_inner(to_graded(u), to_graded(v), cache.params().q);
}

double q_norm(const GradedArray& u, double q) { return std::sqrt(std::max(0.0, q_inner(u, u, q))); }

double symmetric_spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

SqrtPair gram_sqrt_pair(const GramBlock& block, double tol) {
    SqrtPair out{block.sqrt(), block.inv_sqrt(), tol};
    const auto n = block.size();
    // Frobenius bounds the spectral norm from above; only refine when it fails.
    auto within = [tol](const Eigen::MatrixXd& r) {
        return r.norm() <= tol || symmetric_spectral_norm(r) <= tol;
    };
    const Eigen::MatrixXd r1 = out.sqrt * out.sqrt - block.matrix();
    const Eigen::MatrixXd r2 = out.sqrt * out.inv_sqrt - Eigen::MatrixXd::Identity(n, n);
    if (!within(r1)) throw NumericalError("Gram square root residual exceeds tolerance");
    if (!within(r2)) throw NumericalError("Gram inverse square root residual exceeds tolerance");
    return out;
}

double min_eigenvalue(const GramBlock& block) { return block.eigenvalues()(0); }

SpectralReport spectral_report(const GramBlock& block) {
    const auto& ev = block.eigenvalues();
    return {block.k(), block.d(), block.q(), ev(0), ev(ev.size() - 1)};
}

}  // namespace qfock
