#include "pqkant/operators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pqkant {

namespace {

void check_degree(const PQContext& ctx, std::size_t n) {
  if (n == 0) throw std::invalid_argument("operator degree n must be positive");
  if (n > kMaxDegree) {
    throw std::length_error("degree n=" + std::to_string(n) + " exceeds supported maximum " +
                            std::to_string(kMaxDegree));
  }
  if (n > ctx.n_max()) {
    throw std::out_of_range("degree n=" + std::to_string(n) + " exceeds context n_max=" +
                            std::to_string(ctx.n_max()));
  }
}

void check_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "x=" << x << " lies outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

void check_covers(const FunctionSpec& f, double hi) {
  if (f.domain_lo() > 0.0 || f.domain_hi() < hi) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "function '" << f.name() << "' must be defined on [0, " << hi << "], has ["
        << f.domain_lo() << ", " << f.domain_hi() << "]";
    throw std::domain_error(msg.str());
  }
}

/// p^{n+1-j}[j]/[n]; lower(k) = node(k), upper(k) = node(k+1).
double cell_node(const PQContext& ctx, std::size_t n, std::size_t j) {
  return ctx.p_pow(n + 1 - j) * ctx.integer(j) / ctx.integer(n);
}

}  // namespace

BasisWeights basis_weights(const PQContext& ctx, std::size_t n, double x) {
  check_degree(ctx, n);
  check_unit(x);
  BasisWeights out{n, x, std::vector<double>(n + 1, 0.0)};
  if (x == 0.0) {
    out.w.front() = 1.0;
    return out;
  }
  if (x == 1.0) {
    out.w.back() = 1.0;
    return out;
  }

  // b_{n,k}/p^{n(n-1)/2} = [n k] p^{-k(n-k)} x^k prod_{s<n-k} (1 - (q/p)^s x).
  // Exponents reach ~n log 2; long double keeps their absolute error near 1 ulp of a double.
  using Wide = long double;
  const Wide ratio = static_cast<Wide>(ctx.q()) / ctx.p();
  const Wide log_p = std::log(static_cast<Wide>(ctx.p()));
  const Wide log_x = std::log(static_cast<Wide>(x));

  // tail_log[m] = sum_{s<m} log(1 - ratio^s x)
  std::vector<Wide> tail_log(n + 1, 0.0L);
  Wide ratio_pow = 1.0L;
  for (std::size_t s = 0; s < n; ++s) {
    tail_log[s + 1] = tail_log[s] + std::log1p(-ratio_pow * x);
    ratio_pow *= ratio;
  }

  Wide log_binom = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) {
      log_binom += std::log(static_cast<Wide>(ctx.integer(n - k + 1))) -
                   std::log(static_cast<Wide>(ctx.integer(k)));
    }
    const Wide kd = static_cast<Wide>(k);
    const Wide exponent =
        log_binom - kd * static_cast<Wide>(n - k) * log_p + kd * log_x + tail_log[n - k];
    out.w[k] = static_cast<double>(std::exp(exponent));
  }
  return out;
}

std::vector<KantorovichCell> kantorovich_cells(const PQContext& ctx, std::size_t n) {
  check_degree(ctx, n);
  std::vector<KantorovichCell> cells(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    cells[k] = {k, cell_node(ctx, n, k), cell_node(ctx, n, k + 1)};
  }
  return cells;
}

double kantorovich_support_end(const PQContext& ctx, std::size_t n) {
  check_degree(ctx, n);
  return cell_node(ctx, n, n + 1) / ctx.p();
}

KantorovichOperator::KantorovichOperator(const PQContext& ctx, std::size_t n,
                                         const FunctionSpec& f, const IntegralOptions& opts)
    : ctx_(ctx), n_(n), cells_(kantorovich_cells(ctx, n)) {
  check_covers(f, kantorovich_support_end(ctx, n));
  const Integrand integrand = [&f](double t) { return f(t); };
  const PQParams& params = ctx.params();

  // Integrals from 0 to each node, shared by neighbouring cells.
  std::vector<double> from_zero(n + 2);
  for (std::size_t j = 0; j <= n + 1; ++j) {
    const double end = j == 0 ? 0.0 : (j <= n ? cells_[j].lower : cells_[n].upper);
    from_zero[j] = pq_integral_0a(integrand, end, params, opts);
  }

  // [n]/(p^{n-k} q^k) is 1/(upper - lower) exactly; dividing by the width of
  // the rounded cell keeps f = 1 at 1 to rounding.
  means_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double width = cells_[k].upper - cells_[k].lower;
    means_[k] = (from_zero[k + 1] - from_zero[k]) / width;
  }
}

double KantorovichOperator::operator()(double x) const {
  const BasisWeights basis = basis_weights(ctx_, n_, x);
  double sum = 0.0;
  for (std::size_t k = 0; k <= n_; ++k) sum += basis.w[k] * means_[k];
  return sum;
}

double kantorovich_apply(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x,
                         const IntegralOptions& opts) {
  check_unit(x);
  return KantorovichOperator(ctx, n, f, opts)(x);
}

std::vector<CurvePoint> kantorovich_eval_grid(const PQContext& ctx, std::size_t n,
                                              const FunctionSpec& f, std::span<const double> xs,
                                              const IntegralOptions& opts) {
  const KantorovichOperator op(ctx, n, f, opts);
  std::vector<CurvePoint> out;
  out.reserve(xs.size());
  for (const double x : xs) {
    try {
      out.push_back({x, op(x)});
    } catch (const std::domain_error& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << e.what() << " (grid point x=" << x << ")";
      throw std::domain_error(msg.str());
    }
  }
  return out;
}

QKantorovichOperator::QKantorovichOperator(std::size_t n, double q, const FunctionSpec& f,
                                           const IntegralOptions& opts)
    : n_(n), q_(q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q-Kantorovich: need 0 < q < 1");
  if (n == 0) throw std::invalid_argument("operator degree n must be positive");
  if (n > kMaxDegree) throw std::length_error("q-Kantorovich: degree exceeds supported maximum");

  q_ints_.resize(n + 2);
  for (std::size_t k = 0; k < q_ints_.size(); ++k) {
    q_ints_[k] = (1.0 - std::pow(q, static_cast<double>(k))) / (1.0 - q);
  }
  const double top = q_ints_[n + 1];
  // Nodes of a q-integral over [0, b] stop at b itself (p = 1).
  check_covers(f, 1.0);

  const Integrand integrand = [&f](double t) { return f(t); };
  weighted_integrals_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double lo = q_ints_[k] / top;
    const double hi = q_ints_[k + 1] / top;
    const double integral = pq_integral_0a(integrand, hi, 1.0, q, opts) -
                            pq_integral_0a(integrand, lo, 1.0, q, opts);
    weighted_integrals_[k] = top * integral / std::pow(q, static_cast<double>(k));
  }
}

double QKantorovichOperator::operator()(double x) const {
  check_unit(x);
  double sum = 0.0;
  double binom = 1.0;
  for (std::size_t k = 0; k <= n_; ++k) {
    if (k > 0) binom *= q_ints_[n_ - k + 1] / q_ints_[k];
    double basis = binom * std::pow(x, static_cast<double>(k));
    for (std::size_t s = 0; s + k < n_; ++s) basis *= 1.0 - std::pow(q_, static_cast<double>(s)) * x;
    sum += basis * weighted_integrals_[k];
  }
  return sum;
}

double q_kantorovich_apply(std::size_t n, double q, const FunctionSpec& f, double x,
                           const IntegralOptions& opts) {
  check_unit(x);
  return QKantorovichOperator(n, q, f, opts)(x);
}

double pq_bernstein_apply(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x) {
  const BasisWeights basis = basis_weights(ctx, n, x);
  double sum = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (basis.w[k] == 0.0) continue;
    const double node = ctx.p_pow(n - k) * ctx.integer(k) / ctx.integer(n);
    sum += basis.w[k] * f(node);
  }
  return sum;
}

std::vector<double> unit_grid(std::size_t count) {
  if (count < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> xs(count);
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) xs[i] = static_cast<double>(i) / last;
  return xs;
}

}  // namespace pqkant
