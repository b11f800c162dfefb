#include "qfock/kernels.hpp"

#include "qfock/errors.hpp"

#include <cstddef>

namespace qfock {

namespace {

constexpr std::ptrdiff_t kParallelThreshold = 4096;

void check_shapes(std::span<const double> xi, const GradedArray& in, const GradedArray& out) {
    if (static_cast<int>(xi.size()) != in.d()) throw PreconditionError("letter vector length must equal d");
    if (in.d() != out.d() || in.N() != out.N()) throw PreconditionError("kernel: input and output spaces differ");
}

}  // namespace

std::vector<double> letter_coeffs(const FockVector& xi) {
    if (!xi.is_homogeneous(1)) throw PreconditionError("expected a homogeneous degree-1 vector");
    std::vector<double> c(static_cast<std::size_t>(xi.params().d), 0.0);
    for (const auto& [w, x] : xi.coeffs()) c[static_cast<std::size_t>(w.letters[0])] = x;
    return c;
}

void create(Side side, std::span<const double> xi, const GradedArray& in, GradedArray& out, double alpha) {
    check_shapes(xi, in, out);
    const auto d = static_cast<std::ptrdiff_t>(in.d());
    for (int k = 0; k < in.N(); ++k) {
        if (!in.has(k)) continue;
        auto src = in.block(k);
        auto dst = out.mutable_block(k + 1);
        const auto n = static_cast<std::ptrdiff_t>(src.size());
        for (std::ptrdiff_t a = 0; a < d; ++a) {
            const double c = alpha * xi[static_cast<std::size_t>(a)];
            if (c == 0.0) continue;
            if (side == Side::left) {
                double* base = dst.data() + a * n;
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
                for (std::ptrdiff_t x = 0; x < n; ++x) base[x] += c * src[static_cast<std::size_t>(x)];
            } else {
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
                for (std::ptrdiff_t x = 0; x < n; ++x) dst[static_cast<std::size_t>(x * d + a)] += c * src[static_cast<std::size_t>(x)];
            }
        }
    }
}

void annihilate(Side side, std::span<const double> xi, double q, const GradedArray& in, GradedArray& out,
                double alpha) {
    check_shapes(xi, in, out);
    const auto d = static_cast<std::ptrdiff_t>(in.d());
    for (int k = 1; k <= in.N(); ++k) {
        if (!in.has(k)) continue;
        auto src = in.block(k);
        auto dst = out.mutable_block(k - 1);
        const auto n_out = static_cast<std::ptrdiff_t>(dst.size());
        // Slot weights: q^{i-1} (left) or q^{k-i} (right), i = 1..k.
        std::vector<double> weight(static_cast<std::size_t>(k));
        std::vector<std::ptrdiff_t> tail(static_cast<std::size_t>(k));  // d^{k-i}
        for (int i = 1; i <= k; ++i) {
            const int e = side == Side::left ? i - 1 : k - i;
            double w = 1.0;
            for (int t = 0; t < e; ++t) w *= q;
            weight[static_cast<std::size_t>(i - 1)] = w;
            tail[static_cast<std::size_t>(i - 1)] = static_cast<std::ptrdiff_t>(checked_pow(in.d(), k - i));
        }
        // Parallel over outputs: each reduced word gathers its k*d preimages.
#pragma omp parallel for schedule(static) if (n_out > kParallelThreshold)
        for (std::ptrdiff_t r = 0; r < n_out; ++r) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) {
                const double w = weight[static_cast<std::size_t>(i)];
                if (w == 0.0) continue;
                const auto t = tail[static_cast<std::size_t>(i)];
                const auto prefix = r / t;
                const auto suffix = r % t;
                for (std::ptrdiff_t a = 0; a < d; ++a) {
                    const double c = xi[static_cast<std::size_t>(a)];
                    if (c == 0.0) continue;
                    const auto x = (prefix * d + a) * t + suffix;
                    acc += w * c * src[static_cast<std::size_t>(x)];
                }
            }
            dst[static_cast<std::size_t>(r)] += alpha * acc;
        }
    }
}

void apply_field(Side side, std::span<const double> xi, double q, const GradedArray& in, GradedArray& out,
                 double alpha) {
    create(side, xi, in, out, alpha);
    annihilate(side, xi, q, in, out, alpha);
}

void apply_letter_field(Side side, int a, double q, const GradedArray& in, GradedArray& out, double alpha) {
    if (a < 0 || a >= in.d()) throw PreconditionError("letter index out of range");
    std::vector<double> xi(static_cast<std::size_t>(in.d()), 0.0);
    xi[static_cast<std::size_t>(a)] = 1.0;
    apply_field(side, xi, q, in, out, alpha);
}

}  // namespace qfock
