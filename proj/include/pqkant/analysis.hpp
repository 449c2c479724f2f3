#pragma once

// Moduli of continuity, pointwise error bounds and the Korovkin
// convergence harness.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pqkant/function_spec.hpp"
#include "pqkant/operators.hpp"
#include "pqkant/pq_core.hpp"

namespace pqkant {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const noexcept { return hi - lo; }
};

inline constexpr std::size_t kMinModulusGrid = 64;
inline constexpr std::size_t kModulusGridCap = std::size_t{1} << 18;
inline constexpr std::size_t kModulus2GridCap = std::size_t{1} << 14;
/// Relative change at which grid refinement stops.
inline constexpr double kRefineTolerance = 0.01;
/// Inflation of a numeric omega when a bound is validated.
inline constexpr double kModulusSafety = 1.05;

/// sup |f(x) - f(y)| over grid pairs with |x - y| <= delta, on grid_m
/// intervals of `domain`, plus the pairs (x_i, x_i + delta). A lower
/// estimate of the true modulus; exact for monotone affine f.
/// Throws std::domain_error if delta exceeds the domain length or the
/// domain leaves f's domain.
double modulus_continuity(const FunctionSpec& f, double delta, Interval domain,
                          std::size_t grid_m = 1024);

/// modulus_continuity with the grid doubled until the relative change drops
/// below 1% (at most kModulusGridCap intervals).
double modulus_continuity_refined(const FunctionSpec& f, double delta, Interval domain,
                                  std::size_t grid_m = 1024);

/// sup over 0 < h <= h_max and admissible x of |f(x+2h) - 2f(x+h) + f(x)|.
/// h runs over grid multiples and h_max itself. Requires 2 h_max <= length.
double modulus_2(const FunctionSpec& f, double h_max, Interval domain, std::size_t grid_m = 256);

double modulus_2_refined(const FunctionSpec& f, double h_max, Interval domain,
                         std::size_t grid_m = 256);

/// True iff |f(t) - f(x)| <= M |t - x|^alpha on every sampled pair of
/// `domain`. Sampling is deterministic.
bool lipschitz_check(const FunctionSpec& f, double M, double alpha, std::size_t sample_pairs,
                     Interval domain = {0.0, 1.0});

enum class BoundKind { modulus, lipschitz, local };

/// Row label used in reports: "thm32", "thm33", "thm34".
std::string_view bound_label(BoundKind kind);

struct BoundRow {
  double x = 0.0;
  double actual = 0.0;
  double bound = 0.0;
  BoundKind kind = BoundKind::modulus;
  double slack = 0.0;
  /// The same bound with every modulus taken over [0, 1] only.
  double bound_unit = 0.0;
};

struct BoundReport {
  std::string function;
  std::size_t n = 0;
  BoundKind kind = BoundKind::modulus;
  std::vector<BoundRow> rows;

  double min_slack() const;
};

/// Shared state for bounds at many x: the operator, and the region
/// [0, upper(n)/p] on which moduli are measured.
class BoundEvaluator {
 public:
  BoundEvaluator(const PQContext& ctx, std::size_t n, const FunctionSpec& f,
                 const IntegralOptions& opts = {});

  /// |K f - f| <= 2 omega(f, delta_n(x)); bound carries kModulusSafety.
  BoundRow modulus(double x) const;
  /// |K f - f| <= M delta_n(x)^alpha for f in Lip_M(alpha).
  BoundRow lipschitz(double x, double M, double alpha) const;
  /// C omega_2(f, delta_n_local(x)) + omega(f, alpha_n). Informational.
  BoundRow local(double x, double C) const;

  Interval sampled_region() const noexcept { return region_; }

 private:
  double actual_error(double x) const;

  PQContext ctx_;
  std::size_t n_;
  FunctionSpec f_;
  KantorovichOperator op_;
  Interval region_;
};

BoundRow bound_modulus(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x,
                       const IntegralOptions& opts = {});
BoundRow bound_lipschitz(const PQContext& ctx, std::size_t n, double M, double alpha,
                         const FunctionSpec& f, double x, const IntegralOptions& opts = {});
BoundRow bound_local(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x,
                     double C = 4.0, const IntegralOptions& opts = {});

/// n -> (p_n, q_n) with 0 < q_n < p_n <= 1.
class ParamSequence {
 public:
  enum class Kind { standard, constant, custom };

  /// p_n = 1 - 1/(n+1)^2, q_n = 1 - 1/(n+1).
  static ParamSequence standard();
  static ParamSequence constant(PQParams params);
  static ParamSequence custom(std::function<PQParams(std::size_t)> generator);

  PQParams at(std::size_t n) const { return generator_(n); }
  Kind kind() const noexcept { return kind_; }
  std::string_view label() const noexcept;

 private:
  ParamSequence(Kind kind, std::function<PQParams(std::size_t)> generator)
      : kind_(kind), generator_(std::move(generator)) {}

  Kind kind_;
  std::function<PQParams(std::size_t)> generator_;
};

struct ConvergenceEntry {
  std::size_t n = 0;
  double p = 0.0;
  double q = 0.0;
  double sup_error = 0.0;
  double argmax_x = 0.0;
  /// sup |K(e_m) - e_m| for e_0 = 1, e_1 = t, e_2 = t^2.
  double e0_error = 0.0;
  double e1_error = 0.0;
  double e2_error = 0.0;
};

struct ConvergenceReport {
  std::string function;
  std::size_t grid_size = 0;
  std::vector<ConvergenceEntry> entries;
};

/// Sup-norm error over x_grid for every n in n_list (strictly increasing,
/// each <= kMaxDegree), each with a fresh context at (p_n, q_n). Distinct n
/// are evaluated concurrently; entries come back in n order.
ConvergenceReport korovkin_run(const ParamSequence& seq, const FunctionSpec& f,
                               std::span<const std::size_t> n_list,
                               std::span<const double> x_grid, const IntegralOptions& opts = {});

}  // namespace pqkant
