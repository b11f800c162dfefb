#include "qfock/separation.hpp"

#include "qfock/errors.hpp"
#include "qfock/kernels.hpp"
#include "qfock/lanczos.hpp"
#include "qfock/symmetrizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qfock {

namespace {

void require_q(double q) {
    if (!(std::abs(q) < 1.0)) throw PreconditionError("deformation parameter must satisfy |q| < 1");
}

CqValue partial_product(double q, double tail_tol, bool use_abs) {
    require_q(q);
    if (!(tail_tol > 0.0)) throw PreconditionError("c_q tail tolerance must be positive");
    const double aq = std::abs(q);
    const double x = use_abs ? aq : q;
    CqValue r{1.0, 0, tail_tol};
    double qpow = 1.0;   // x^m
    double apow = aq;    // |q|^{m+1}
    while (!(apow / (1.0 - aq) < tail_tol)) {
        qpow *= x;
        r.value /= (1.0 - qpow);
        ++r.terms;
        apow *= aq;
    }
    return r;
}

double qpow(double q, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= q;
    return r;
}

std::vector<Eigen::Index> degree_offsets(const TruncationParams& p) {
    std::vector<Eigen::Index> off(static_cast<std::size_t>(p.N) + 2, 0);
    for (int k = 0; k <= p.N; ++k)
        off[static_cast<std::size_t>(k) + 1] =
            off[static_cast<std::size_t>(k)] + static_cast<Eigen::Index>(checked_pow(static_cast<std::uint64_t>(p.d), k));
    return off;
}

Eigen::VectorXd flatten(const GradedArray& a, const std::vector<Eigen::Index>& off) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(off.back());
    for (int k = 0; k <= a.N(); ++k) {
        if (!a.has(k)) continue;
        auto b = a.block(k);
        v.segment(off[static_cast<std::size_t>(k)], static_cast<Eigen::Index>(b.size())) =
            Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    }
    return v;
}

GradedArray unflatten(const Eigen::VectorXd& v, const TruncationParams& p, const std::vector<Eigen::Index>& off) {
    GradedArray a(p);
    for (int k = 0; k <= p.N; ++k) {
        auto b = a.mutable_block(k);
        Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())) =
            v.segment(off[static_cast<std::size_t>(k)], static_cast<Eigen::Index>(b.size()));
    }
    return a;
}

GradedArray vacuum_array(const TruncationParams& p) {
    GradedArray v(p);
    v.mutable_block(0)[0] = 1.0;
    return v;
}

bool letters_below(const FockVector& v, int bound) {
    for (const auto& [w, c] : v.coeffs())
        for (int a : w.letters)
            if (a >= bound) return false;
    return true;
}

}  // namespace

CqValue c_q(double q, double tail_tol) { return partial_product(q, tail_tol, false); }

CqValue c_q_abs(double q, double tail_tol) { return partial_product(q, tail_tol, true); }

double nou_upper_bound(int k, int d, double q, double tail_tol) {
    if (k < 1 || d < 1) throw PreconditionError("nou_upper_bound needs k >= 1 and d >= 1");
    const double c = c_q(q, tail_tol).value;
    return c * c * c * static_cast<double>(k + 1) * static_cast<double>(k + 1) *
           std::pow(static_cast<double>(d), 0.5 * k);
}

double lower_bound(int k, int d, double q) {
    if (k < 1 || d < 1) throw PreconditionError("lower_bound needs k >= 1 and d >= 1");
    require_q(q);
    return std::pow(std::abs(q) * static_cast<double>(d), k);
}

double log_bound_ratio(int k, int d, double q, double tail_tol) {
    const double c = c_q(q, tail_tol).value;
    return k * std::log(std::abs(q) * d) - 3.0 * std::log(c) - 2.0 * std::log(k + 1.0) - 0.5 * k * std::log(d);
}

CertificateResult find_certificate(double q, int d, int k_max, double delta_floor, double tail_tol) {
    require_q(q);
    if (d < 2) throw PreconditionError("certificate search needs d >= 2");
    if (!(q * q * d > 1.0))
        throw PreconditionError("separation requires q^2 d > 1 (got q^2 d = " + std::to_string(q * q * d) + ")");
    if (k_max < 1) throw PreconditionError("k_max must be >= 1");
    if (!(delta_floor > 0.0)) throw PreconditionError("delta_floor must be positive");

    const auto cq = c_q(q, tail_tol);
    for (int k = 1; k <= k_max; ++k) {
        const double lr = log_bound_ratio(k, d, q, tail_tol);
        if (!(lr >= std::log1p(delta_floor))) continue;
        SeparationCertificate cert;
        cert.q = q;
        cert.d = d;
        cert.k_min = k;
        cert.lower = lower_bound(k, d, q);
        cert.upper = nou_upper_bound(k, d, q, tail_tol);
        cert.delta = cert.lower / cert.upper - 1.0;
        cert.c_q = cq.value;
        cert.c_q_tail_tol = tail_tol;
        cert.c_q_terms = cq.terms;
        cert.scan_max = k_max;
        cert.log_ratio_kmin = lr;
        cert.log_ratio_next = log_bound_ratio(k + 1, d, q, tail_tol);
        if (!(cert.delta >= delta_floor)) continue;  // log and direct forms disagree at the boundary
        return cert;
    }
    CertificateAbsence abs;
    abs.q = q;
    abs.d = d;
    abs.scan_max = k_max;
    abs.ratio_at_kmax = std::exp(log_bound_ratio(k_max, d, q, tail_tol));
    abs.log_growth_per_k = std::log(std::abs(q) * std::sqrt(static_cast<double>(d)));
    abs.message = "no k <= " + std::to_string(k_max) +
                  " qualifies; since q^2 d > 1 the bound ratio grows like exp(k log(|q| sqrt d)) and a larger scan "
                  "succeeds";
    return abs;
}

bool validate_certificate(const SeparationCertificate& cert, std::string* why, double rel_tol) {
    auto fail = [why](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (!(cert.q * cert.q * cert.d > 1.0)) return fail("q^2 d <= 1");
    if (cert.k_min < 1 || cert.k_min > cert.scan_max) return fail("k_min outside scan range");
    if (!(cert.delta > 0.0)) return fail("delta must be positive");
    const double lower = lower_bound(cert.k_min, cert.d, cert.q);
    const double upper = nou_upper_bound(cert.k_min, cert.d, cert.q, cert.c_q_tail_tol);
    const auto cq = c_q(cert.q, cert.c_q_tail_tol);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    if (rel(cert.lower, lower) > rel_tol) return fail("stored lower bound does not reproduce");
    if (rel(cert.upper, upper) > rel_tol) return fail("stored upper bound does not reproduce");
    if (rel(cert.c_q, cq.value) > rel_tol || cq.terms != cert.c_q_terms) return fail("stored c_q does not reproduce");
    if (!(lower >= (1.0 + cert.delta) * upper * (1.0 - 1e-12))) return fail("lower < (1 + delta) upper");
    if (!(log_bound_ratio(cert.k_min + 1, cert.d, cert.q, cert.c_q_tail_tol) >
          log_bound_ratio(cert.k_min, cert.d, cert.q, cert.c_q_tail_tol)))
        return fail("bound ratio does not increase past k_min");
    return true;
}

// ---------------------------------------------------------------------------

WickFamily wick_family(int k, int d, double q, int d_extra, int N) {
    if (k < 1) throw PreconditionError("Wick family needs k >= 1");
    if (d_extra < 0) throw PreconditionError("d_extra must be >= 0");
    if (N < k) throw PreconditionError("Wick family needs N >= k");
    WickFamily fam;
    fam.k = k;
    fam.d = d;
    fam.d_extra = d_extra;
    fam.q = q;
    fam.params = make_params(d + d_extra, N, q);
    const auto G = gram_matrix(k, d, q);
    const auto& S = G.inv_sqrt();
    const auto words = enumerate_basis(d, k);
    fam.xs.reserve(words.size());
    for (std::size_t j = 0; j < words.size(); ++j) {
        FockVector xi(fam.params);
        for (std::size_t i = 0; i < words.size(); ++i)
            xi.set(words[i], S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        fam.xs.push_back(std::move(xi));
    }
    return fam;
}

IdentityReport identity_check(const FockVector& b, const FockVector& c, const FockVector& f, int base_dim) {
    const auto& p = b.params();
    if (!(c.params() == p) || !(f.params() == p)) throw PreconditionError("identity_check: operands in different spaces");
    const int k = homogeneous_degree(b);
    if (homogeneous_degree(c) != k) throw PreconditionError("identity_check: b and c must share the degree k");
    if (!letters_below(b, base_dim) || !letters_below(c, base_dim))
        throw PreconditionError("identity_check: b and c must use the first base_dim coordinates only");
    if (f.is_zero() || !f.is_homogeneous(1)) throw PreconditionError("identity_check: f must be a nonzero degree-1 vector");
    for (const auto& [w, x] : f.coeffs())
        if (w.letters[0] < base_dim) throw PreconditionError("identity_check: f must be orthogonal to the base coordinates");
    if (p.N < 2 * k + 1)
        throw PreconditionError("identity_check needs N >= 2k + 1 (N=" + std::to_string(p.N) + ", k=" + std::to_string(k) + ")");

    const auto W_b = wick_polynomial(b);
    const auto W_c = wick_polynomial(c);
    const auto Wop_c = right_wick_polynomial(c);
    const GradedArray omega = vacuum_array(p);
    const GradedArray fa = to_graded(f);

    IdentityReport r;
    r.lhs = q_inner(W_b.apply(Wop_c.apply(fa)), fa, p.q);
    {
        GradedArray sf(p);
        apply_field(Side::left, letter_coeffs(f), p.q, W_c.apply(omega), sf);
        r.middle = q_inner(W_b.apply(sf), fa, p.q);
    }
    const double vac = q_inner(W_b.apply(Wop_c.apply(omega)), omega, p.q);
    const double ff = q_inner(fa, fa, p.q);
    r.rhs_literal = qpow(p.q, k) * vac;
    r.rhs_with_factor = r.rhs_literal * ff;
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs_with_factor));
    r.rel_diff = scale == 0.0 ? 0.0 : std::abs(r.lhs - r.rhs_with_factor) / scale;
    return r;
}

std::string to_string(FMode m) { return m == FMode::unit_wick_norm ? "unit_wick_norm" : "unit_vector"; }

FMode parse_fmode(const std::string& s) {
    if (s == "unit_wick_norm") return FMode::unit_wick_norm;
    if (s == "unit_vector") return FMode::unit_vector;
    throw PreconditionError("f-mode must be unit_wick_norm or unit_vector");
}

double field_norm(const FockVector& xi, std::uint64_t seed) {
    const auto& p = xi.params();
    const auto coeffs = letter_coeffs(xi);
    const auto off = degree_offsets(p);
    LanczosOptions opts;
    opts.seed = seed;
    opts.max_iter = 800;
    const auto res = lanczos_max_abs(
        off.back(),
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            GradedArray out(p);
            apply_field(Side::left, coeffs, p.q, unflatten(x, p, off), out);
            y = flatten(out, off);
        },
        [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return q_inner(unflatten(a, p, off), unflatten(b, p, off), p.q);
        },
        opts);
    if (!res.converged) throw NumericalError("field norm Lanczos iteration did not converge");
    return res.max_abs_eig;
}

WitnessReport witness_chain(int k, int d, double q, int N, FMode mode) {
    if (k < 1 || d < 1) throw PreconditionError("witness_chain needs k >= 1 and d >= 1");
    if (N < 2 * k + 1)
        throw PreconditionError("witness_chain needs N >= 2k + 1 (N=" + std::to_string(N) + ", k=" + std::to_string(k) + ")");
    if (checked_pow(static_cast<std::uint64_t>(d), k) > kGramMaxSize)
        throw PreconditionError("witness_chain: family size d^k exceeds the Gram guard");
    if (fock_dim(d + 1, N) > 4'000'000) throw PreconditionError("witness_chain: truncated space too large");

    const auto fam = wick_family(k, d, q, 1, N);
    const auto& p = fam.params;

    WitnessReport r;
    r.k = k;
    r.d = d;
    r.q = q;
    r.N = N;
    r.f_mode = mode;

    const FockVector e_extra = FockVector::basis(p, MultiIndex{d});
    const double unit_field_norm = field_norm(e_extra);
    const double scale = mode == FMode::unit_wick_norm ? 1.0 / unit_field_norm : 1.0;
    const FockVector f = scale * e_extra;
    const GradedArray fa = to_graded(f);
    r.f_inner = q_inner(fa, fa, q);
    r.f_norm = std::sqrt(r.f_inner);
    r.wick_f_norm = scale * unit_field_norm;

    const auto members = static_cast<std::ptrdiff_t>(fam.xs.size());
    std::vector<GradedArray> terms(fam.xs.size(), GradedArray(p));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < members; ++j) {
        const auto& xi = fam.xs[static_cast<std::size_t>(j)];
        const auto b = wick_polynomial(xi).adjoint();
        const auto c_op = right_wick_polynomial(xi);
        terms[static_cast<std::size_t>(j)] = b.apply(c_op.apply(fa));
    }
    GradedArray v(p);
    for (const auto& t : terms) v.axpy(1.0, t);  // index order

    r.v_norm = q_norm(v, q);
    r.raw_pairing = std::abs(q_inner(v, fa, q));
    r.pairing = r.raw_pairing / r.f_norm;
    r.predicted = lower_bound(k, d, q) * r.f_inner / r.f_norm;
    r.rel_err = r.predicted == 0.0 ? std::abs(r.pairing) : std::abs(r.pairing - r.predicted) / r.predicted;
    if (r.v_norm < r.pairing - 1e-12 * std::max(1.0, r.pairing))
        throw NumericalError("Cauchy-Schwarz leg violated: ||v||_q < |<v,f>_q| / ||f||_q");
    return r;
}

double tensor_min_norm_lower(const WickFamily& family, int N) {
    const int D = family.params.d;
    const int k = family.k;
    const double q = family.q;
    if (N < 0) throw PreconditionError("tensor_min_norm_lower needs N >= 0");
    const auto n64 = fock_dim(D, N);
    if (static_cast<double>(n64) * static_cast<double>(n64) > kTensorMaxDim)
        throw PreconditionError("tensor_min_norm_lower: (fock_dim)^2 exceeds the size guard");
    const auto n = static_cast<Eigen::Index>(n64);

    // Build each factor one truncation level higher (N + k), so the blocks
    // kept below are exact compressions of the untruncated operators.
    const auto big = make_params(D, N + k, q);
    const auto small = make_params(D, N, q);
    const GramCache gram(small);
    const auto off = degree_offsets(small);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n), Si = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m <= N; ++m) {
        const auto& g = gram.block(m);
        S.block(off[static_cast<std::size_t>(m)], off[static_cast<std::size_t>(m)], g.size(), g.size()) = g.sqrt();
        Si.block(off[static_cast<std::size_t>(m)], off[static_cast<std::size_t>(m)], g.size(), g.size()) = g.inv_sqrt();
    }
    auto compress = [&](const FockOperator& T) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [key, m] : T.blocks()) {
            const auto [ko, ki] = key;
            if (ko > N || ki > N) continue;
            M.block(off[static_cast<std::size_t>(ko)], off[static_cast<std::size_t>(ki)], m.rows(), m.cols()) = m;
        }
        return Eigen::MatrixXd(S * M * Si);
    };

    // Similarity coordinates turn the q-adjoint into the transpose.
    std::vector<Eigen::MatrixXd> A, B;  // A_j = (S W_j S^-1)^T, B_j = S W^op_j S^-1
    for (const auto& xi : family.xs) {
        const auto eta = embed(xi, big);
        A.push_back(compress(wick_polynomial(eta).to_operator(OperatorTag::wick)).transpose());
        B.push_back(compress(right_wick_polynomial(eta).to_operator(OperatorTag::right_wick)));
    }
    // X(V) = sum_j A_j V B_j^T; top eigenvalue of X^T X.
    auto X = [&](const Eigen::MatrixXd& V) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t j = 0; j < A.size(); ++j) out.noalias() += A[j] * V * B[j].transpose();
        return out;
    };
    auto Xt = [&](const Eigen::MatrixXd& V) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t j = 0; j < A.size(); ++j) out.noalias() += A[j].transpose() * V * B[j];
        return out;
    };
    LanczosOptions opts;
    opts.reorthogonalize = true;
    opts.max_iter = 300;
    opts.tol = 1e-14;
    const auto res = lanczos_max_abs(
        n * n,
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            const Eigen::Map<const Eigen::MatrixXd> V(x.data(), n, n);
            const Eigen::MatrixXd Y = Xt(X(V));
            y = Eigen::Map<const Eigen::VectorXd>(Y.data(), n * n);
        },
        [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b); }, opts);
    if (!res.converged) throw NumericalError("tensor norm Lanczos iteration did not converge");
    return std::sqrt(res.max_abs_eig);
}

}  // namespace qfock
