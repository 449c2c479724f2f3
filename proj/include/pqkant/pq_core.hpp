#pragma once

// (p,q)-calculus primitives: integers, factorials, binomial coefficients,
// rising powers, the (p,q)-binomial expansion and the Jackson-type
// (p,q)-definite integral.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqkant {

/// Scalar integrand. Call sites pass lambdas that capture by reference.
using Integrand = std::function<double(double)>;

/// Raised when a truncated series hits its term cap before the stopping rule.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deformation parameters with 0 < q < p <= 1.
class PQParams {
 public:
  /// Throws std::invalid_argument unless 0 < q < p <= 1.
  PQParams(double p, double q);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  static bool admissible(double p, double q) noexcept;

 private:
  double p_;
  double q_;
};

/// Immutable cache of [k]_{p,q}, p^k and q^k for 0 <= k <= n_max + 1.
class PQContext {
 public:
  PQContext(PQParams params, std::size_t n_max);

  const PQParams& params() const noexcept { return params_; }
  double p() const noexcept { return params_.p(); }
  double q() const noexcept { return params_.q(); }
  std::size_t n_max() const noexcept { return n_max_; }

  /// [k]_{p,q}; k <= n_max + 1, else std::out_of_range.
  double integer(std::size_t k) const;
  double p_pow(std::size_t k) const;
  double q_pow(std::size_t k) const;

 private:
  PQParams params_;
  std::size_t n_max_;
  std::vector<double> ints_;
  std::vector<double> p_pows_;
  std::vector<double> q_pows_;
};

double pq_int(const PQContext& ctx, std::size_t n);

/// [k]! = [k][k-1]...[1]; throws std::overflow_error on a non-finite result.
double pq_factorial(const PQContext& ctx, std::size_t k);

/// (p,q)-binomial coefficient as the ratio product prod_{i=1}^{k} [n-i+1]/[i].
/// Throws std::domain_error unless 0 <= k <= n.
double pq_binomial(const PQContext& ctx, std::size_t n, long k);

/// Natural log of pq_binomial, accumulated term by term (never overflows).
double pq_log_binomial(const PQContext& ctx, std::size_t n, std::size_t k);

/// (x)^k_{p,q} = x (px) (p^2 x) ... (p^{k-1} x) = p^{k(k-1)/2} x^k.
double pq_rising_power(double x, std::size_t k, const PQParams& params);

/// (x+y)^n_{p,q} = prod_{s=0}^{n-1} (p^s x + q^s y).
double pq_binomial_expansion(double x, double y, std::size_t n, const PQParams& params);

struct IntegralOptions {
  double rtol = 1e-14;
  std::size_t max_terms = 1'000'000;
  /// Consecutive sub-threshold terms required before stopping.
  int settle_terms = 3;
  /// Add the geometric tail last*r/(1-r) estimated from the trailing ratio.
  bool tail_correction = true;
};

/// Integral of f over [0, a] with respect to d_{p,q}t.
///
/// For p > q this is (p-q) a sum_k q^k/p^{k+1} f(a q^k/p^{k+1}). Note the
/// k = 0 node is a/p, so f must be evaluable on [0, a/p]. Returns exactly 0
/// for a = 0. Throws NonConvergence when max_terms is reached first.
double pq_integral_0a(const Integrand& f, double a, const PQParams& params,
                      const IntegralOptions& opts = {});

/// Raw-parameter form that also admits p < q, where the series runs over
/// nodes a p^k/q^{k+1} with prefactor (q-p) a. Requires p, q > 0, p != q.
double pq_integral_0a(const Integrand& f, double a, double p, double q,
                      const IntegralOptions& opts = {});

/// Integral over [a, b] defined as the difference of the two one-sided
/// integrals from 0. Throws std::domain_error unless 0 <= a <= b.
double pq_integral_ab(const Integrand& f, double a, double b, const PQParams& params,
                      const IntegralOptions& opts = {});

}  // namespace pqkant
