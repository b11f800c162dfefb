#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace qfock {

struct LanczosOptions {
    int max_iter = 400;
    double tol = 1e-13;          // relative change of the extreme Ritz value
    bool reorthogonalize = false;
    std::uint64_t seed = 0;
};

struct LanczosResult {
    double max_abs_eig = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Extreme |eigenvalue| of a self-adjoint operator on R^n with respect to
/// the inner product `inner` (which must make `op` symmetric).
LanczosResult lanczos_max_abs(Eigen::Index n, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                              const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& inner,
                              const LanczosOptions& opts = {});

}  // namespace qfock
