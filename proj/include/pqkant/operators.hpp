#pragma once

// (p,q)-Bernstein-Kantorovich operator, its basis, the revised
// (p,q)-Bernstein operator and the q-Kantorovich operator.

#include <cstddef>
#include <span>
#include <vector>

#include "pqkant/function_spec.hpp"
#include "pqkant/pq_core.hpp"

namespace pqkant {

/// Largest supported operator degree; larger n throws std::length_error.
inline constexpr std::size_t kMaxDegree = 500;

/// Normalized basis at x: w_k = b_{n,k}(x) / p^{n(n-1)/2}, k = 0..n.
struct BasisWeights {
  std::size_t n = 0;
  double x = 0.0;
  std::vector<double> w;
};

/// Integration cell of the k-th term: [p^{n+1-k}[k]/[n], p^{n-k}[k+1]/[n]].
struct KantorovichCell {
  std::size_t k = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct CurvePoint {
  double x = 0.0;
  double value = 0.0;
};

/// Log-space evaluation with exact zeros at x = 0 and x = 1.
/// Throws std::domain_error for x outside [0, 1].
BasisWeights basis_weights(const PQContext& ctx, std::size_t n, double x);

/// n + 1 cells; upper(k) and lower(k+1) come from the same expression.
std::vector<KantorovichCell> kantorovich_cells(const PQContext& ctx, std::size_t n);

/// Right end of the sampled region: upper(n)/p. The k = 0 node of a
/// (p,q)-integral over [0, b] sits at b/p.
double kantorovich_support_end(const PQContext& ctx, std::size_t n);

/// K_n^{(p,q)} bound to one function. The cell integrals do not depend on x,
/// so they are computed once here and every evaluation is a weighted sum.
class KantorovichOperator {
 public:
  /// Throws std::domain_error if f does not cover [0, upper(n)/p], and
  /// propagates NonConvergence from the cell integrals.
  KantorovichOperator(const PQContext& ctx, std::size_t n, const FunctionSpec& f,
                      const IntegralOptions& opts = {});

  double operator()(double x) const;

  std::size_t degree() const noexcept { return n_; }
  const std::vector<KantorovichCell>& cells() const noexcept { return cells_; }
  /// ([n] / (p^{n-k} q^k)) times the k-th cell integral.
  std::span<const double> cell_means() const noexcept { return means_; }

 private:
  PQContext ctx_;
  std::size_t n_;
  std::vector<KantorovichCell> cells_;
  std::vector<double> means_;
};

double kantorovich_apply(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x,
                         const IntegralOptions& opts = {});

/// Order-preserving pointwise evaluation. A failing point aborts the whole
/// grid with the offending x in the message.
std::vector<CurvePoint> kantorovich_eval_grid(const PQContext& ctx, std::size_t n,
                                              const FunctionSpec& f, std::span<const double> xs,
                                              const IntegralOptions& opts = {});

/// q-Bernstein-Kantorovich operator
///   [n+1]_q sum_k p_{n,k}(q;x) q^{-k} int_{[k]_q/[n+1]_q}^{[k+1]_q/[n+1]_q} f d_q t
/// with p_{n,k}(q;x) = [n k]_q x^k prod_{s<n-k} (1 - q^s x). Built from its
/// own q-integers and a linear-space basis, independent of PQContext.
class QKantorovichOperator {
 public:
  QKantorovichOperator(std::size_t n, double q, const FunctionSpec& f,
                       const IntegralOptions& opts = {});

  double operator()(double x) const;

 private:
  std::size_t n_;
  double q_;
  std::vector<double> q_ints_;
  std::vector<double> weighted_integrals_;
};

double q_kantorovich_apply(std::size_t n, double q, const FunctionSpec& f, double x,
                           const IntegralOptions& opts = {});

/// Revised (p,q)-Bernstein operator: sum_k w_k f(p^{n-k}[k]/[n]).
double pq_bernstein_apply(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x);

/// count equally spaced points on [0, 1], endpoints included (count >= 2).
std::vector<double> unit_grid(std::size_t count);

}  // namespace pqkant
