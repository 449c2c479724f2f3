#include "pqkant/pq_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pqkant {

PQParams::PQParams(double p, double q) : p_(p), q_(q) {
  if (!admissible(p, q)) {
    std::ostringstream msg;
    msg << "(p,q) must satisfy 0 < q < p <= 1, got p=" << p << " q=" << q;
    throw std::invalid_argument(msg.str());
  }
}

bool PQParams::admissible(double p, double q) noexcept {
  return std::isfinite(p) && std::isfinite(q) && q > 0.0 && q < p && p <= 1.0;
}

PQContext::PQContext(PQParams params, std::size_t n_max)
    : params_(params), n_max_(n_max) {
  if (n_max == 0) throw std::invalid_argument("PQContext: n_max must be positive");
  const std::size_t size = n_max + 2;
  ints_.resize(size);
  p_pows_.resize(size);
  q_pows_.resize(size);
  const double p = params.p();
  const double q = params.q();
  for (std::size_t k = 0; k < size; ++k) {
    p_pows_[k] = std::pow(p, static_cast<double>(k));
    q_pows_[k] = std::pow(q, static_cast<double>(k));
  }
  // [k+1] = p^k + q [k]: a sum of positive terms, so no cancellation even
  // when p - q is tiny.
  ints_[0] = 0.0;
  for (std::size_t k = 0; k + 1 < size; ++k) ints_[k + 1] = p_pows_[k] + q * ints_[k];
}

namespace {

void check_index(std::size_t k, std::size_t size, const char* what) {
  if (k >= size) {
    std::ostringstream msg;
    msg << what << ": index " << k << " exceeds cache capacity " << size - 1;
    throw std::out_of_range(msg.str());
  }
}

}  // namespace

double PQContext::integer(std::size_t k) const {
  check_index(k, ints_.size(), "pq_int");
  return ints_[k];
}

double PQContext::p_pow(std::size_t k) const {
  check_index(k, p_pows_.size(), "p_pow");
  return p_pows_[k];
}

double PQContext::q_pow(std::size_t k) const {
  check_index(k, q_pows_.size(), "q_pow");
  return q_pows_[k];
}

double pq_int(const PQContext& ctx, std::size_t n) { return ctx.integer(n); }

double pq_factorial(const PQContext& ctx, std::size_t k) {
  check_index(k, ctx.n_max() + 1, "pq_factorial");
  double result = 1.0;
  for (std::size_t i = 2; i <= k; ++i) result *= ctx.integer(i);
  if (!std::isfinite(result)) {
    throw std::overflow_error("pq_factorial: [" + std::to_string(k) + "]! is not finite");
  }
  return result;
}

double pq_binomial(const PQContext& ctx, std::size_t n, long k) {
  if (k < 0 || static_cast<std::size_t>(k) > n) {
    throw std::domain_error("pq_binomial: need 0 <= k <= n, got n=" + std::to_string(n) +
                            " k=" + std::to_string(k));
  }
  check_index(n, ctx.n_max() + 1, "pq_binomial");
  const auto kk = static_cast<std::size_t>(k);
  // Symmetric, so walk the shorter side.
  const std::size_t m = std::min(kk, n - kk);
  double result = 1.0;
  for (std::size_t i = 1; i <= m; ++i) result *= ctx.integer(n - i + 1) / ctx.integer(i);
  return result;
}

double pq_log_binomial(const PQContext& ctx, std::size_t n, std::size_t k) {
  if (k > n) throw std::domain_error("pq_log_binomial: k > n");
  check_index(n, ctx.n_max() + 1, "pq_log_binomial");
  const std::size_t m = std::min(k, n - k);
  double result = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    result += std::log(ctx.integer(n - i + 1)) - std::log(ctx.integer(i));
  }
  return result;
}

double pq_rising_power(double x, std::size_t k, const PQParams& params) {
  const double kd = static_cast<double>(k);
  return std::pow(params.p(), kd * (kd - 1.0) / 2.0) * std::pow(x, kd);
}

double pq_binomial_expansion(double x, double y, std::size_t n, const PQParams& params) {
  double result = 1.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double sd = static_cast<double>(s);
    result *= std::pow(params.p(), sd) * x + std::pow(params.q(), sd) * y;
  }
  return result;
}

namespace {

/// Sum of prefactor * sum_k (small^k / big^{k+1}) f(a small^k / big^{k+1}), small < big.
double jackson_series(const Integrand& f, double a, double big, double small,
                      const IntegralOptions& opts) {
  if (!(opts.rtol > 0.0)) throw std::invalid_argument("pq integral: rtol must be positive");
  if (a == 0.0) return 0.0;

  const double prefactor = (big - small) * a;
  const double ratio = small / big;
  constexpr double kTinyPow = 1e-280;

  // Neumaier-compensated running sum.
  double sum = 0.0;
  double comp = 0.0;
  double last[3] = {0.0, 0.0, 0.0};
  int quiet = 0;
  for (std::size_t k = 0; k < opts.max_terms; ++k) {
    const double kd = static_cast<double>(k);
    const double big_pow = std::pow(big, kd + 1.0);
    const double scale =
        big_pow > kTinyPow ? std::pow(small, kd) / big_pow : std::pow(ratio, kd) / big;
    const double value = f(a * scale);
    const double term = prefactor * scale * value;
    if (!std::isfinite(term)) {
      throw std::domain_error("pq integral: non-finite integrand value at t=" +
                              std::to_string(a * scale));
    }
    const double next = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;

    last[0] = last[1];
    last[1] = last[2];
    last[2] = term;

    const double total = sum + comp;
    quiet = std::abs(term) <= opts.rtol * std::abs(total) ? quiet + 1 : 0;
    if (quiet >= opts.settle_terms) {
      if (opts.tail_correction && k >= 2 && last[0] != 0.0 && last[1] != 0.0) {
        const double r1 = last[2] / last[1];
        const double r0 = last[1] / last[0];
        if (r1 > 0.0 && r1 < 1.0 && std::abs(r1 - r0) <= 0.1 * (1.0 - r1)) {
          return total + last[2] * r1 / (1.0 - r1);
        }
      }
      return total;
    }
  }
  throw NonConvergence("pq integral: no convergence within " + std::to_string(opts.max_terms) +
                       " terms (a=" + std::to_string(a) + ")");
}

}  // namespace

double pq_integral_0a(const Integrand& f, double a, double p, double q,
                      const IntegralOptions& opts) {
  if (!(p > 0.0) || !(q > 0.0) || p == q) {
    throw std::invalid_argument("pq integral: need p, q > 0 and p != q");
  }
  if (!(a >= 0.0)) throw std::domain_error("pq integral: upper limit must be >= 0");
  if (p > q) return jackson_series(f, a, p, q, opts);
  // |p/q| < 1 branch: (q - p) a sum_k p^k/q^{k+1} f(a p^k/q^{k+1}).
  return jackson_series(f, a, q, p, opts);
}

double pq_integral_0a(const Integrand& f, double a, const PQParams& params,
                      const IntegralOptions& opts) {
  return pq_integral_0a(f, a, params.p(), params.q(), opts);
}

double pq_integral_ab(const Integrand& f, double a, double b, const PQParams& params,
                      const IntegralOptions& opts) {
  if (!(a >= 0.0) || !(a <= b)) {
    throw std::domain_error("pq_integral_ab: need 0 <= a <= b");
  }
  if (a == b) return 0.0;
  return pq_integral_0a(f, b, params, opts) - pq_integral_0a(f, a, params, opts);
}

}  // namespace pqkant
