#include "qfock/moments.hpp"

#include "qfock/errors.hpp"
#include "qfock/kernels.hpp"

#include <cmath>

namespace qfock {

namespace {

double vacuum_coefficient(const GradedArray& v) { return v.has(0) ? v.block(0)[0] : 0.0; }

GradedArray vacuum_array(const TruncationParams& p) {
    GradedArray v(p);
    v.mutable_block(0)[0] = 1.0;
    return v;
}

// Undeformed inner product of two degree-1 vectors.
double letter_dot(const FockVector& a, const FockVector& b) {
    double s = 0.0;
    for (const auto& [w, c] : a.coeffs()) s += c * b.get(w);
    return s;
}

// Matches the smallest unmatched point with every later one.
double partitions(std::span<const FockVector> xs, std::vector<bool>& used,
                  std::vector<std::pair<int, int>>& pairs, double q) {
    const int n = static_cast<int>(xs.size());
    int a = 0;
    while (a < n && used[static_cast<std::size_t>(a)]) ++a;
    if (a == n) {
        int crossings = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = 0; j < pairs.size(); ++j) {
                const auto [p1, p2] = pairs[i];
                const auto [r1, r2] = pairs[j];
                if (p1 < r1 && r1 < p2 && p2 < r2) ++crossings;
            }
        double w = 1.0;
        for (const auto& [p1, p2] : pairs)
            w *= letter_dot(xs[static_cast<std::size_t>(p2)], xs[static_cast<std::size_t>(p1)]);
        return std::pow(q, crossings) * w;
    }
    double total = 0.0;
    used[static_cast<std::size_t>(a)] = true;
    for (int b = a + 1; b < n; ++b) {
        if (used[static_cast<std::size_t>(b)]) continue;
        used[static_cast<std::size_t>(b)] = true;
        pairs.emplace_back(a, b);
        total += partitions(xs, used, pairs, q);
        pairs.pop_back();
        used[static_cast<std::size_t>(b)] = false;
    }
    used[static_cast<std::size_t>(a)] = false;
    return total;
}

}  // namespace

double vacuum_expectation(const FockOperator& T) {
    const auto& p = T.params();
    return q_inner(T.apply(vacuum_array(p)), vacuum_array(p), p.q);
}

double vacuum_expectation(const FieldPolynomial& x) {
    const auto& p = x.params();
    return q_inner(x.apply(vacuum_array(p)), vacuum_array(p), p.q);
}

double field_moment(const MomentRequest& req) {
    const auto& p = req.params;
    p.validate();
    const int n = static_cast<int>(req.vectors.size());
    if (p.N < n)
        throw PreconditionError("field_moment needs truncation N >= n (N=" + std::to_string(p.N) +
                                ", n=" + std::to_string(n) + ")");
    GradedArray v = vacuum_array(p);
    for (auto it = req.vectors.rbegin(); it != req.vectors.rend(); ++it) {
        if (!(it->params() == p)) throw PreconditionError("moment vector lives in another space");
        const auto c = letter_coeffs(*it);
        GradedArray w(p);
        apply_field(Side::left, c, p.q, v, w);
        v = std::move(w);
    }
    return vacuum_coefficient(v);
}

double pair_partition_moment(std::span<const FockVector> vectors, double q) {
    if (vectors.size() % 2 == 1) return 0.0;
    for (const auto& v : vectors) {
        if (!v.is_homogeneous(1)) throw PreconditionError("pair partition moment needs degree-1 vectors");
    }
    std::vector<bool> used(vectors.size(), false);
    std::vector<std::pair<int, int>> pairs;
    return partitions(vectors, used, pairs, q);
}

TracialityReport traciality_check(const FieldPolynomial& x, const FieldPolynomial& y) {
    if (!(x.params() == y.params())) throw PreconditionError("traciality: words act on different spaces");
    const int budget = std::max(x.degree(), 0) + std::max(y.degree(), 0);
    if (budget > x.params().N)
        throw PreconditionError("traciality needs deg x + deg y <= N (" + std::to_string(budget) + " > " +
                                std::to_string(x.params().N) + ")");
    TracialityReport r;
    const auto& p = x.params();
    const GradedArray omega = vacuum_array(p);
    r.lhs = q_inner(x.apply(y.apply(omega)), omega, p.q);
    r.rhs = q_inner(y.apply(x.apply(omega)), omega, p.q);
    r.discrepancy = std::abs(r.lhs - r.rhs);
    return r;
}

}  // namespace qfock
