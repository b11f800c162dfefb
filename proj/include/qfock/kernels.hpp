#pragma once

#include "qfock/fock_space.hpp"

#include <span>
#include <vector>

namespace qfock {

/// Which end of the word a creation/annihilation acts on.
enum class Side { left, right };

/// Dense coefficients of a degree-1 vector (length d).
std::vector<double> letter_coeffs(const FockVector& xi);

// Matrix-free kernels on graded arrays; each one accumulates into `out`.
//
// Creation out of degree N is dropped (projection truncation). Annihilation
// uses the slot-sum formula
//   l*(xi)(eta_1 .. eta_k) = sum_i q^{i-1} <eta_i, xi> (eta with slot i omitted)
// and its mirror with weights q^{k-i} for the right action.

void create(Side side, std::span<const double> xi, const GradedArray& in, GradedArray& out, double alpha = 1.0);
void annihilate(Side side, std::span<const double> xi, double q, const GradedArray& in, GradedArray& out,
                double alpha = 1.0);
/// field = creation + annihilation.
void apply_field(Side side, std::span<const double> xi, double q, const GradedArray& in, GradedArray& out,
                 double alpha = 1.0);

/// Field operator of a single basis letter e_a.
void apply_letter_field(Side side, int a, double q, const GradedArray& in, GradedArray& out, double alpha = 1.0);

}  // namespace qfock
