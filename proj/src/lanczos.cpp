#include "qfock/lanczos.hpp"

#include "qfock/errors.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace qfock {

LanczosResult lanczos_max_abs(Eigen::Index n, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                              const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& inner,
                              const LanczosOptions& opts) {
    LanczosResult res;
    if (n == 0) return res;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    v /= std::sqrt(inner(v, v));

    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w(n);
    double beta_prev = 0.0;
    double last = -1.0;
    int stable = 0;
    const int max_iter = static_cast<int>(std::min<Eigen::Index>(opts.max_iter, n));

    for (int it = 0; it < max_iter; ++it) {
        if (opts.reorthogonalize) basis.push_back(v);
        w.setZero();
        op(v, w);
        w -= beta_prev * v_prev;
        const double a = inner(w, v);
        w -= a * v;
        if (opts.reorthogonalize) {
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) w -= inner(w, b) * b;
        }
        alpha.push_back(a);
        const double b = std::sqrt(std::max(0.0, inner(w, w)));

        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                    : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        const double cur = es.eigenvalues().cwiseAbs().maxCoeff();
        res.max_abs_eig = cur;
        res.iterations = it + 1;

        if (b <= 1e-14 * std::max(1.0, cur)) {  // invariant subspace: Ritz values are exact
            res.converged = true;
            break;
        }
        if (last >= 0.0 && std::abs(cur - last) <= opts.tol * std::max(cur, 1e-300)) {
            if (++stable >= 5) {
                res.converged = true;
                break;
            }
        } else {
            stable = 0;
        }
        last = cur;
        beta.push_back(b);
        v_prev = v;
        v = w / b;
        beta_prev = b;
    }
    if (opts.reorthogonalize && res.iterations == n) res.converged = true;
    return res;
}

}  // namespace qfock
