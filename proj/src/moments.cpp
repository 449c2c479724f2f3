#include "pqkant/moments.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace pqkant {

namespace {

void check(const PQContext& ctx, std::size_t n) {
  if (n == 0) throw std::invalid_argument("moments: n must be positive");
  if (n > ctx.n_max()) throw std::out_of_range("moments: n exceeds context n_max");
}

struct Coefficients {
  double quad;
  double lin;
  double constant;
};

// Raw second moment K(t^2;x) as quad x^2 + lin x + constant.
Coefficients second_moment(const PQContext& ctx, std::size_t n) {
  const double p = ctx.p();
  const double q = ctx.q();
  const double in = ctx.integer(n);
  const double i3 = ctx.integer(3);
  const double pn = ctx.p_pow(n);
  return {q * ctx.integer(n - 1) / in,
          pn * (2.0 * q + p) / (i3 * in) + ctx.p_pow(n - 1) / in,
          pn * pn / (i3 * in * in)};
}

}  // namespace

double alpha_n(const PQContext& ctx, std::size_t n) {
  check(ctx, n);
  return ctx.p_pow(n) / (ctx.integer(2) * ctx.integer(n));
}

double central_moment_from_raw(const PQContext& ctx, std::size_t n, double x) {
  check(ctx, n);
  const Coefficients c = second_moment(ctx, n);
  const double m1 = x + alpha_n(ctx, n);
  const double m2 = (c.quad * x + c.lin) * x + c.constant;
  return m2 - 2.0 * x * m1 + x * x;
}

double central_moment_expanded(const PQContext& ctx, std::size_t n, double x) {
  check(ctx, n);
  const Coefficients c = second_moment(ctx, n);
  const double in = ctx.integer(n);
  // q[n-1]/[n] - 1 = -p^{n-1}/[n] via [n] = p^{n-1} + q[n-1].
  const double quad = -ctx.p_pow(n - 1) / in;
  const double lin = c.lin - 2.0 * ctx.p_pow(n) / (ctx.integer(2) * in);
  return (quad * x + lin) * x + c.constant;
}

MomentSet moments_closed_form(const PQContext& ctx, std::size_t n, double x) {
  check(ctx, n);
  const Coefficients c = second_moment(ctx, n);
  MomentSet m;
  m.m0 = 1.0;
  m.m1 = x + alpha_n(ctx, n);
  m.m2 = (c.quad * x + c.lin) * x + c.constant;
  m.central2 = central_moment_expanded(ctx, n, x);
  return m;
}

double delta_n(const PQContext& ctx, std::size_t n, double x) {
  const double central = central_moment_expanded(ctx, n, x);
  if (central < -kCentralClamp) {
    std::ostringstream msg;
    msg << "negative central moment " << central << " at n=" << n << " x=" << x;
    throw ConsistencyError(msg.str());
  }
  return std::sqrt(std::max(central, 0.0));
}

double delta_n_local(const PQContext& ctx, std::size_t n, double x) {
  const double d = delta_n(ctx, n, x);
  const double a = alpha_n(ctx, n);
  return std::sqrt(d * d + a * a);
}

}  // namespace pqkant
