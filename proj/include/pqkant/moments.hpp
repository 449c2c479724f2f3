#pragma once

// Closed-form moments of K_n^{(p,q)} and the scales delta_n, alpha_n that
// drive the error bounds.

#include <cstddef>
#include <stdexcept>

#include "pqkant/pq_core.hpp"

namespace pqkant {

/// Raised when a closed-form quantity leaves its admissible range by more
/// than rounding (e.g. a central moment below -1e-12).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K(1;x), K(t;x), K(t^2;x) and K((t-x)^2;x).
struct MomentSet {
  double m0 = 1.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double central2 = 0.0;
};

/// Negative central moments down to this are treated as rounding and clamped.
inline constexpr double kCentralClamp = 1e-12;

/// m1 = x + p^n/([2][n])
/// m2 = (q[n-1]/[n]) x^2 + (p^n(2q+p)/([3][n]) + p^{n-1}/[n]) x + p^{2n}/([3][n]^2)
/// central2 from the expanded polynomial.
MomentSet moments_closed_form(const PQContext& ctx, std::size_t n, double x);

/// Second central moment as the expanded polynomial in x.
double central_moment_expanded(const PQContext& ctx, std::size_t n, double x);

/// Second central moment as m2 - 2x m1 + x^2.
double central_moment_from_raw(const PQContext& ctx, std::size_t n, double x);

/// sqrt(max(central2, 0)); throws ConsistencyError if central2 < -kCentralClamp.
double delta_n(const PQContext& ctx, std::size_t n, double x);

/// sqrt(central2 + p^{2n}/([2]^2[n]^2)).
double delta_n_local(const PQContext& ctx, std::size_t n, double x);

/// First-moment shift p^n/([2][n]) = K(t;x) - x, independent of x.
double alpha_n(const PQContext& ctx, std::size_t n);

}  // namespace pqkant
