// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "qfock/errors.hpp"
#include "qfock/moments.hpp"
#include "qfock/operators.hpp"
#include "qfock/report.hpp"
#include "qfock/separation.hpp"
#include "qfock/symmetrizer.hpp"
#include "qfock/wick.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace qfock;
using qfock::testing::e;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Tracks the worst observed value against a tolerance.
struct Worst {
    double value = 0.0;
    std::string where;
    void see(double v, const std::string& at) {
        if (!(v <= value)) {
            value = v;
            where = at;
        }
    }
};

std::string fmt(double x) { return format_double(x); }

double coeff_norm(const FockVector& v) {
    double s = 0.0;
    for (const auto& [w, c] : v.coeffs()) s += c * c;
    return std::sqrt(s);
}

Outcome c1_symmetrizer() {
    Outcome o;
    Worst rel;
    std::mt19937_64 rng(1);
    for (double q : {-0.9, -0.3, 0.0, 0.3, 0.9})
        for (int d = 1; d <= 3; ++d)
            for (int k = 0; k <= 6; ++k) {
                const auto p = make_params(d, k, q);
                for (int t = 0; t < 100; ++t) {
                    const auto v = qfock::testing::random_homogeneous(p, k, rng);
                    const auto naive = apply_pq_naive(k, q, v);
                    const auto fast = apply_pq_fast(k, q, v);
                    const double r = coeff_norm(fast - naive) / std::max(coeff_norm(naive), 1e-300);
                    rel.see(r, "q=" + fmt(q) + " d=" + std::to_string(d) + " k=" + std::to_string(k));
                }
            }
    bool identity = true;
    for (int d = 1; d <= 3; ++d)
        for (int k = 0; k <= 6; ++k) {
            const auto G = gram_matrix(k, d, 0.0);
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(G.size(), G.size());
            if (!(G.matrix().array() == I.array()).all()) identity = false;
        }
    o.pass = rel.value <= 1e-12 && identity;
    o.detail = "max rel err " + fmt(rel.value) + " (" + rel.where + "), q=0 Gram identity " +
               (identity ? "exact" : "NOT exact");
    return o;
}

Outcome c2_positivity() {
    Outcome o;
    double min_seen = 1e300;
    std::string at;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double q : {a, -a})
            for (int d = 1; d <= 3; ++d)
                for (int k = 0; k <= 5; ++k) {
                    const double m = min_eigenvalue(gram_matrix(k, d, q));
                    if (m < min_seen) {
                        min_seen = m;
                        at = "q=" + fmt(q) + " d=" + std::to_string(d) + " k=" + std::to_string(k);
                    }
                }
    Worst dev;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double q : {a, -a}) dev.see(std::abs(min_eigenvalue(gram_matrix(2, 2, q)) - (1.0 - std::abs(q))), fmt(q));
    o.pass = min_seen > 0.0 && dev.value <= 1e-10;
    o.detail = "min eig " + fmt(min_seen) + " (" + at + "), |lambda_min - (1-|q|)| at k=d=2: " + fmt(dev.value);
    return o;
}

Outcome c3_wick() {
    Outcome o;
    Worst def, sq, rec;
    std::mt19937_64 rng(3);
    for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
        for (int d = 1; d <= 3; ++d)
            for (int k = 0; k <= 4; ++k) {
                const auto p = make_params(d, k, q);
                for (int t = 0; t < 5; ++t) {
                    const auto eta = qfock::testing::random_homogeneous(p, k, rng);
                    const auto r = wick_polynomial(eta).apply(vacuum(p));
                    def.see(qfock::testing::q_norm(r - eta),
                            "q=" + fmt(q) + " d=" + std::to_string(d) + " k=" + std::to_string(k));
                }
            }
    for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
        for (int d = 1; d <= 2; ++d) {
            const auto p = make_params(d, 5, q);
            const GramCache cache(p);
            const auto s = field(cache, e(p, {0}));
            sq.see(max_abs_diff(wick(e(p, {0, 0})), s * s - identity_operator(p)), "q=" + fmt(q));
        }
    for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
        for (int d = 1; d <= 2; ++d)
            for (int k = 1; k <= 3; ++k) {
                const auto p = make_params(d, k + 2, q);
                const auto eta = qfock::testing::random_homogeneous(p, k, rng);
                const auto a = wick_polynomial(eta).to_operator();
                const auto b = qfock::testing::wick_by_linear_solve(eta, k).to_operator();
                rec.see(max_abs_diff(a, b, p.N - k), "q=" + fmt(q) + " k=" + std::to_string(k));
            }
    o.pass = def.value <= 1e-10 && sq.value <= 1e-10 && rec.value <= 1e-10;
    o.detail = "defining " + fmt(def.value) + ", square " + fmt(sq.value) + ", recursion vs solve " + fmt(rec.value);
    return o;
}

Outcome c4_moments() {
    Outcome o;
    Worst diff, four;
    for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        for (int n = 1; n <= 8; ++n) {
            const auto p = make_params(2, n, q);
            for (const auto& w : enumerate_basis(2, n)) {
                std::vector<FockVector> xs;
                for (int a : w.letters) xs.push_back(FockVector::basis(p, MultiIndex{a}));
                diff.see(std::abs(field_moment({xs, p}) - pair_partition_moment(xs, q)),
                         "q=" + fmt(q) + " w=" + to_string(w));
            }
        }
        const auto p = make_params(1, 4, q);
        const std::vector<FockVector> xs(4, e(p, {0}));
        four.see(std::abs(field_moment({xs, p}) - (2.0 + q)), fmt(q));
    }
    o.pass = diff.value <= 1e-9 && four.value <= 1e-10;
    o.detail = "max |matrix - partition| " + fmt(diff.value) + " (" + diff.where + "), |tau(s^4) - (2+q)| " +
               fmt(four.value);
    return o;
}

Outcome c5_traciality() {
    Outcome o;
    Worst disc;
    std::size_t pairs = 0;
    for (double a : {0.5, 0.9})
        for (double q : {a, -a})
            for (int d = 1; d <= 3; ++d) {
                const auto p = make_params(d, 6, q);
                std::vector<FieldPolynomial> words;
                std::vector<int> degs;
                for (int k = 0; k <= 3; ++k)
                    for (const auto& w : enumerate_basis(d, k)) {
                        words.push_back(wick_polynomial(FockVector::basis(p, w)));
                        degs.push_back(k);
                    }
                for (std::size_t i = 0; i < words.size(); ++i)
                    for (std::size_t j = 0; j < words.size(); ++j) {
                        disc.see(traciality_check(words[i], words[j]).discrepancy,
                                 "q=" + fmt(q) + " d=" + std::to_string(d));
                        ++pairs;
                    }
            }
    o.pass = disc.value <= 1e-9;
    o.detail = std::to_string(pairs) + " pairs, max |tau(xy) - tau(yx)| " + fmt(disc.value);
    return o;
}

Outcome c6_identity() {
    Outcome o;
    Worst ident, wit;
    std::mt19937_64 rng(6);
    for (double a : {0.5, 0.9})
        for (double q : {a, -a})
            for (int d = 1; d <= 3; ++d)
                for (int k = 1; k <= 3; ++k) {
                    const int N = 2 * k + 2;
                    const std::string at = "q=" + fmt(q) + " d=" + std::to_string(d) + " k=" + std::to_string(k);
                    const auto p = make_params(d + 1, N, q);
                    const auto b = qfock::testing::random_homogeneous(p, k, rng, d);
                    const auto c = qfock::testing::random_homogeneous(p, k, rng, d);
                    const auto f = e(p, {d});
                    ident.see(identity_check(b, c, f, d).rel_diff, at);
                    for (FMode m : {FMode::unit_vector, FMode::unit_wick_norm})
                        wit.see(witness_chain(k, d, q, N, m).rel_err, at + " " + to_string(m));
                }
    o.pass = ident.value <= 1e-9 && wit.value <= 1e-8;
    o.detail = "identity rel " + fmt(ident.value) + " (" + ident.where + "), witness rel " + fmt(wit.value) + " (" +
               wit.where + ")";
    return o;
}

Outcome c7_certificate() {
    Outcome o;
    std::vector<std::string> notes;
    const auto res = find_certificate(0.9, 8);
    bool ok = false;
    if (const auto* cert = std::get_if<SeparationCertificate>(&res)) {
        std::string why;
        const bool valid = validate_certificate(*cert, &why);
        const bool grows = log_bound_ratio(cert->k_min + 1, cert->d, cert->q) > log_bound_ratio(cert->k_min, cert->d, cert->q);
        ok = valid && grows;
        notes.push_back("k_min=" + std::to_string(cert->k_min) + " delta=" + fmt(cert->delta) +
                        (valid ? " revalidates" : " INVALID: " + why) + (grows ? ", ratio increases" : ", ratio NOT increasing"));
    } else {
        notes.push_back("no certificate for (0.9, 8)");
    }
    for (auto [q, d] : {std::pair{-0.9, 8}, std::pair{0.8, 3}, std::pair{0.6, 5}}) {
        const auto r = find_certificate(q, d);
        if (const auto* cert = std::get_if<SeparationCertificate>(&r)) {
            ok = ok && validate_certificate(*cert) && cert->log_ratio_next > cert->log_ratio_kmin;
        }
    }
    bool threw = false;
    try {
        find_certificate(0.5, 2);
    } catch (const PreconditionError&) {
        threw = true;
    }
    notes.push_back(threw ? "(0.5, 2) precondition error" : "(0.5, 2) did NOT raise");
    o.pass = ok && threw;
    for (const auto& n : notes) o.detail += (o.detail.empty() ? "" : "; ") + n;
    return o;
}

Outcome c8_norms() {
    Outcome o;
    bool monotone = true, bounded = true;
    double at14 = 0.0;
    for (double q : {0.0, 0.5, 0.9}) {
        double prev = 0.0;
        for (int N = 1; N <= 14; ++N) {
            const auto p = make_params(1, N, q);
            const GramCache cache(p);
            const double n = op_norm(cache, field(cache, e(p, {0})));
            if (n < prev - 1e-12) monotone = false;
            if (n > 2.0 / std::sqrt(1.0 - q) + 1e-6) bounded = false;
            if (q == 0.0 && N == 14) at14 = n;
            prev = n;
        }
    }
    o.pass = monotone && bounded && at14 > 1.95;
    o.detail = std::string(monotone ? "monotone" : "NOT monotone") + ", " + (bounded ? "bounded" : "NOT bounded") +
               ", q=0 N=14 norm " + fmt(at14);
    return o;
}

Outcome c9_ordering() {
    Outcome o;
    double worst_gap = -1e300;
    std::string at;
    for (double q : {-0.9, -0.5, 0.0, 0.5, 0.9})
        for (int k = 1; k <= 2; ++k)
            for (int N = k; N <= 5; ++N) {
                const auto fam = wick_family(k, 2, q, 0, k);
                const double t = tensor_min_norm_lower(fam, N);
                const double gap = t - nou_upper_bound(k, 2, q);
                if (gap > worst_gap) {
                    worst_gap = gap;
                    at = "q=" + fmt(q) + " k=" + std::to_string(k) + " N=" + std::to_string(N) + " value " + fmt(t);
                }
            }
    o.pass = worst_gap <= 1e-6;
    o.detail = "max (lower - upper) " + fmt(worst_gap) + " (" + at + ")";
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome c10_determinism() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "qfock_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::string> cmds{
        "gram --q 0.3 --d 2 --k 3 --out-format csv",
        "spectrum --q -0.7 --d 3 --k 3",
        "operators --q 0.5 --d 2 --k 2",
        "operators --q 0.5 --d 2 --k 2 --out-format csv",
        "moments --q 0.5 --d 2 --n 6",
        "identity --q -0.9 --d 2 --k 2 --seed 42",
        "witness --q 0.9 --d 2 --k 2 --f-mode unit_wick_norm",
        "certificate --q 0.9 --d 8",
    };
    int identical = 0;
    for (const auto& c : cmds) {
        const auto a = dir / "run1";
        const auto b = dir / "run2";
        const int ra = std::system((std::string(QFOCK_CLI_PATH) + " " + c + " --out " + a.string()).c_str());
        const int rb = std::system((std::string(QFOCK_CLI_PATH) + " " + c + " --out " + b.string()).c_str());
        const auto sa = slurp(a);
        if (ra == 0 && rb == 0 && !sa.empty() && sa == slurp(b))
            ++identical;
        else
            o.detail += "differs: " + c + "; ";
        std::filesystem::remove(a);
        std::filesystem::remove(b);
    }
    std::filesystem::remove_all(dir);
    o.pass = identical == static_cast<int>(cmds.size());
    o.detail += std::to_string(identical) + "/" + std::to_string(cmds.size()) + " invocations byte-identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"symmetrizer", c1_symmetrizer}, {"positivity", c2_positivity},   {"wick", c3_wick},
        {"moments", c4_moments},         {"traciality", c5_traciality},   {"contraction", c6_identity},
        {"certificate", c7_certificate}, {"norm_sanity", c8_norms},       {"bound_ordering", c9_ordering},
        {"determinism", c10_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("[%s] %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
