#pragma once

#include "qfock/fock_space.hpp"
#include "qfock/wick.hpp"

#include <string>
#include <variant>
#include <vector>

namespace qfock {

struct CqValue {
    double value = 1.0;
    int terms = 0;  // number of factors multiplied
    double tail_tol = 1e-12;
};

/// Partial product prod_{i=1}^{m} (1 - q^i)^{-1}, stopping at the first m
/// with |q|^{m+1} / (1 - |q|) < tail_tol. Uses q as given (literal reading).
CqValue c_q(double q, double tail_tol = 1e-12);
/// Same product with |q| in place of q.
CqValue c_q_abs(double q, double tail_tol = 1e-12);

/// c_q^3 (k+1)^2 d^{k/2}.
double nou_upper_bound(int k, int d, double q, double tail_tol = 1e-12);
/// |q|^k d^k.
double lower_bound(int k, int d, double q);
/// log(lower_bound) - log(nou_upper_bound), finite even when the bounds overflow.
double log_bound_ratio(int k, int d, double q, double tail_tol = 1e-12);

struct SeparationCertificate {
    double q = 0.0;
    int d = 0;
    int k_min = 0;
    double delta = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double c_q = 0.0;
    double c_q_tail_tol = 0.0;
    int c_q_terms = 0;
    int scan_max = 0;
    // Growth witnesses, not part of the JSON schema.
    double log_ratio_kmin = 0.0;
    double log_ratio_next = 0.0;
};

/// Scan finished without a qualifying degree although q^2 d > 1.
struct CertificateAbsence {
    double q = 0.0;
    int d = 0;
    int scan_max = 0;
    double ratio_at_kmax = 0.0;
    double log_growth_per_k = 0.0;  // log(|q| sqrt(d)) > 0: the ratio grows without bound
    std::string message;
};

using CertificateResult = std::variant<SeparationCertificate, CertificateAbsence>;

/// Smallest k <= k_max with lower >= (1 + delta_floor) upper. Throws
/// PreconditionError when q^2 d <= 1, d < 2 or |q| >= 1.
CertificateResult find_certificate(double q, int d, int k_max = 200, double delta_floor = 0.01,
                                   double tail_tol = 1e-12);

/// Recomputes both closed forms from (q, d, k_min) and checks every
/// certificate invariant; returns false with a reason on failure.
bool validate_certificate(const SeparationCertificate& cert, std::string* why = nullptr, double rel_tol = 1e-9);

/// xi_j = G_k^{-1/2} e_j over the first d letters of an ambient alphabet of
/// size d + d_extra, embedded with truncation N.
struct WickFamily {
    int k = 0;
    int d = 0;
    int d_extra = 0;
    double q = 0.0;
    TruncationParams params;
    std::vector<FockVector> xs;
};

WickFamily wick_family(int k, int d, double q, int d_extra, int N);

struct IdentityReport {
    double lhs = 0.0;              // <W(b) W^op(c) f, f>_q
    double middle = 0.0;           // <W(b) s(f) W(c) Omega, f>_q
    double rhs_with_factor = 0.0;  // q^k <W(b) W^op(c) Omega, Omega>_q <f, f>_q
    double rhs_literal = 0.0;      // q^k <W(b) W^op(c) Omega, Omega>_q
    double rel_diff = 0.0;
};

/// b, c homogeneous of equal degree k over letters < base_dim; f degree 1
/// supported on letters >= base_dim; N >= 2k + 1.
IdentityReport identity_check(const FockVector& b, const FockVector& c, const FockVector& f, int base_dim);

enum class FMode { unit_wick_norm, unit_vector };
std::string to_string(FMode m);
FMode parse_fmode(const std::string& s);

struct WitnessReport {
    int k = 0;
    int d = 0;
    double q = 0.0;
    int N = 0;
    FMode f_mode = FMode::unit_vector;
    double f_norm = 0.0;
    double wick_f_norm = 0.0;
    double v_norm = 0.0;
    double pairing = 0.0;
    double predicted = 0.0;
    double rel_err = 0.0;
    double raw_pairing = 0.0;  // |<v, f>_q| before dividing by ||f||_q
    double f_inner = 0.0;      // <f, f>_q
};

/// v = sum_j W(xi_j)^* W^op(xi_j) f over the normalized family, with f a
/// multiple of the extra basis vector e_d. Throws NumericalError if the
/// Cauchy-Schwarz leg ||v|| >= |<v,f>| / ||f|| fails.
WitnessReport witness_chain(int k, int d, double q, int N, FMode mode);

/// Truncated norm of s(xi) in the q-metric (Lanczos, matrix-free).
double field_norm(const FockVector& xi, std::uint64_t seed = 0);

inline constexpr double kTensorMaxDim = 2.5e5;

/// Largest singular value of sum_j W(xi_j)^* (x) W^op(xi_j), each factor
/// compressed to degrees <= N in the q-metric. A lower estimate of the
/// minimal tensor norm; nondecreasing in N.
double tensor_min_norm_lower(const WickFamily& family, int N);

}  // namespace qfock
