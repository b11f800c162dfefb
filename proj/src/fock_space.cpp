#include "qfock/fock_space.hpp"

#include "qfock/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace qfock {

void TruncationParams::validate() const {
    if (d < 1) throw PreconditionError("alphabet size d must be >= 1, got " + std::to_string(d));
    if (N < 0) throw PreconditionError("truncation degree N must be >= 0, got " + std::to_string(N));
    if (!(std::abs(q) < 1.0)) throw PreconditionError("deformation parameter must satisfy |q| < 1");
}

TruncationParams make_params(int d, int N, double q) {
    TruncationParams p{d, N, q};
    p.validate();
    return p;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.letters.size() <=> b.letters.size(); c != 0) return c;
    return a.letters <=> b.letters;
}

std::string to_string(const MultiIndex& w) {
    std::string out = "(";
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(w.letters[i]);
    }
    return out + ")";
}

std::uint64_t checked_pow(std::uint64_t d, int k) {
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) {
        if (__builtin_mul_overflow(r, d, &r)) throw std::overflow_error("d^k overflows 64-bit range");
    }
    return r;
}

std::uint64_t fock_dim(int d, int N) {
    if (d < 1 || N < 0) throw PreconditionError("fock_dim needs d >= 1 and N >= 0");
    std::uint64_t total = 0;
    std::uint64_t term = 1;
    for (int m = 0; m <= N; ++m) {
        if (__builtin_add_overflow(total, term, &total))
            throw std::overflow_error("fock_dim overflows 64-bit range");
        if (m < N && __builtin_mul_overflow(term, static_cast<std::uint64_t>(d), &term))
            throw std::overflow_error("fock_dim overflows 64-bit range");
    }
    return total;
}

std::vector<MultiIndex> enumerate_basis(int d, int k) {
    if (d < 1 || k < 0) throw PreconditionError("enumerate_basis needs d >= 1 and k >= 0");
    const auto count = checked_pow(static_cast<std::uint64_t>(d), k);
    std::vector<MultiIndex> out;
    out.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) out.push_back(word_unrank(r, d, k));
    return out;
}

std::size_t word_rank(const MultiIndex& w, int d) {
    std::size_t r = 0;
    for (int a : w.letters) r = r * static_cast<std::size_t>(d) + static_cast<std::size_t>(a);
    return r;
}

MultiIndex word_unrank(std::size_t rank, int d, int k) {
    std::vector<int> letters(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
        letters[static_cast<std::size_t>(i)] = static_cast<int>(rank % static_cast<std::size_t>(d));
        rank /= static_cast<std::size_t>(d);
    }
    return MultiIndex(std::move(letters));
}

// ---------------------------------------------------------------------------
// FockVector

FockVector::FockVector(const TruncationParams& params) : params_(params) { params_.validate(); }

FockVector FockVector::basis(const TruncationParams& params, const MultiIndex& w, double value) {
    FockVector v(params);
    v.set(w, value);
    return v;
}

void FockVector::check_index(const MultiIndex& w) const {
    if (w.degree() > params_.N)
        throw PreconditionError("word " + to_string(w) + " exceeds truncation degree N=" +
                                std::to_string(params_.N));
    for (int a : w.letters) {
        if (a < 0 || a >= params_.d)
            throw PreconditionError("letter out of range [0," + std::to_string(params_.d) + ") in " +
                                    to_string(w));
    }
}

double FockVector::get(const MultiIndex& w) const {
    auto it = coeffs_.find(w);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void FockVector::set(const MultiIndex& w, double value) {
    check_index(w);
    if (value == 0.0) {
        coeffs_.erase(w);
    } else {
        coeffs_[w] = value;
    }
}

void FockVector::add_to(const MultiIndex& w, double value) { set(w, get(w) + value); }

int FockVector::max_degree() const {
    return coeffs_.empty() ? -1 : coeffs_.rbegin()->first.degree();
}

bool FockVector::is_homogeneous(int k) const {
    for (const auto& [w, c] : coeffs_) {
        if (w.degree() != k) return false;
    }
    return true;
}

FockVector FockVector::degree_component(int k) const {
    FockVector out(params_);
    for (const auto& [w, c] : coeffs_) {
        if (w.degree() == k) out.coeffs_.emplace(w, c);
    }
    return out;
}

FockVector vacuum(const TruncationParams& params) { return FockVector::basis(params, MultiIndex{}); }

FockVector add(const FockVector& a, const FockVector& b) {
    if (!(a.params() == b.params())) throw PreconditionError("add: operands live in different truncated spaces");
    FockVector out = a;
    for (const auto& [w, c] : b.coeffs()) out.add_to(w, c);
    return out;
}

FockVector scale(double c, const FockVector& v) {
    FockVector out(v.params());
    if (c == 0.0) return out;
    for (const auto& [w, x] : v.coeffs()) out.set(w, c * x);
    return out;
}

std::map<int, FockVector> degree_split(const FockVector& v) {
    std::map<int, FockVector> out;
    for (const auto& [w, c] : v.coeffs()) {
        auto it = out.try_emplace(w.degree(), v.params()).first;
        it->second.set(w, c);
    }
    return out;
}

FockVector embed(const FockVector& v, const TruncationParams& target) {
    FockVector out(target);
    for (const auto& [w, c] : v.coeffs()) out.set(w, c);
    return out;
}

// ---------------------------------------------------------------------------
// GradedArray

GradedArray::GradedArray(int d, int N) : d_(d), N_(N) {
    if (d < 1 || N < 0) throw PreconditionError("GradedArray needs d >= 1 and N >= 0");
    sizes_.resize(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) sizes_[static_cast<std::size_t>(k)] = checked_pow(static_cast<std::uint64_t>(d), k);
    blocks_.resize(static_cast<std::size_t>(N) + 1);
}

std::span<double> GradedArray::mutable_block(int k) {
    auto& b = blocks_[static_cast<std::size_t>(k)];
    if (b.empty()) b.assign(sizes_[static_cast<std::size_t>(k)], 0.0);
    return b;
}

void GradedArray::axpy(double alpha, const GradedArray& x) {
    if (x.d_ != d_ || x.N_ != N_) throw PreconditionError("axpy: shape mismatch");
    for (int k = 0; k <= N_; ++k) {
        if (!x.has(k)) continue;
        auto src = x.block(k);
        auto dst = mutable_block(k);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] += alpha * src[i];
    }
}

void GradedArray::scale(double alpha) {
    for (auto& b : blocks_) {
        for (double& x : b) x *= alpha;
    }
}

GradedArray to_graded(const FockVector& v) {
    GradedArray out(v.params());
    const int d = v.params().d;
    for (const auto& [w, c] : v.coeffs()) out.mutable_block(w.degree())[word_rank(w, d)] = c;
    return out;
}

FockVector to_fock(const GradedArray& a, const TruncationParams& params) {
    if (a.d() != params.d || a.N() != params.N) throw PreconditionError("to_fock: shape mismatch");
    FockVector out(params);
    for (int k = 0; k <= a.N(); ++k) {
        if (!a.has(k)) continue;
        auto b = a.block(k);
        for (std::size_t r = 0; r < b.size(); ++r) {
            if (b[r] != 0.0) out.set(word_unrank(r, a.d(), k), b[r]);
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace qfock
