#include "pqkant/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pqkant/moments.hpp"

namespace pqkant {

namespace {

void check_region(const FunctionSpec& f, Interval domain, std::size_t grid_m) {
  if (!(domain.hi > domain.lo)) throw std::invalid_argument("modulus: empty domain");
  if (grid_m < kMinModulusGrid) {
    throw std::invalid_argument("modulus: grid_m must be at least " +
                                std::to_string(kMinModulusGrid));
  }
  if (domain.lo < f.domain_lo() || domain.hi > f.domain_hi()) {
    std::ostringstream msg;
    msg << "modulus: [" << domain.lo << ", " << domain.hi << "] leaves the domain of '"
        << f.name() << "'";
    throw std::domain_error(msg.str());
  }
}

std::vector<double> sample(const FunctionSpec& f, Interval domain, std::size_t m) {
  std::vector<double> values(m + 1);
  const double step = domain.length() / static_cast<double>(m);
  for (std::size_t i = 0; i <= m; ++i) {
    values[i] = f(i == m ? domain.hi : domain.lo + step * static_cast<double>(i));
  }
  return values;
}

bool settled(double previous, double current) {
  return std::abs(current - previous) <= kRefineTolerance * std::abs(current);
}

template <class Estimator>
double refine(Estimator&& estimate, std::size_t grid_m, std::size_t cap) {
  double previous = estimate(grid_m);
  for (std::size_t m = 2 * grid_m; m <= cap; m *= 2) {
    const double current = estimate(m);
    if (settled(previous, current)) return current;
    previous = current;
  }
  return previous;
}

}  // namespace

double modulus_continuity(const FunctionSpec& f, double delta, Interval domain,
                          std::size_t grid_m) {
  check_region(f, domain, grid_m);
  if (!(delta > 0.0)) throw std::invalid_argument("modulus: delta must be positive");
  if (delta > domain.length()) {
    std::ostringstream msg;
    msg << "modulus: delta=" << delta << " exceeds domain length " << domain.length();
    throw std::domain_error(msg.str());
  }

  const std::vector<double> values = sample(f, domain, grid_m);
  const double step = domain.length() / static_cast<double>(grid_m);
  const auto span = static_cast<std::size_t>(std::floor(delta / step * (1.0 + 1e-12)));

  // Largest max - min over every window of span + 1 consecutive samples.
  double best = 0.0;
  std::deque<std::size_t> hi_idx;
  std::deque<std::size_t> lo_idx;
  for (std::size_t i = 0; i < values.size(); ++i) {
    while (!hi_idx.empty() && values[hi_idx.back()] <= values[i]) hi_idx.pop_back();
    while (!lo_idx.empty() && values[lo_idx.back()] >= values[i]) lo_idx.pop_back();
    hi_idx.push_back(i);
    lo_idx.push_back(i);
    const std::size_t first = i >= span ? i - span : 0;
    while (hi_idx.front() < first) hi_idx.pop_front();
    while (lo_idx.front() < first) lo_idx.pop_front();
    best = std::max(best, values[hi_idx.front()] - values[lo_idx.front()]);
  }

  // Pairs exactly delta apart.
  for (std::size_t i = 0; i <= grid_m; ++i) {
    const double x = domain.lo + step * static_cast<double>(i);
    const double y = x + delta;
    if (y > domain.hi) break;
    best = std::max(best, std::abs(f(y) - values[i]));
  }
  best = std::max(best, std::abs(f(domain.hi) - f(domain.hi - delta)));
  return best;
}

double modulus_continuity_refined(const FunctionSpec& f, double delta, Interval domain,
                                  std::size_t grid_m) {
  return refine([&](std::size_t m) { return modulus_continuity(f, delta, domain, m); }, grid_m,
                kModulusGridCap);
}

double modulus_2(const FunctionSpec& f, double h_max, Interval domain, std::size_t grid_m) {
  check_region(f, domain, grid_m);
  if (!(h_max > 0.0)) throw std::invalid_argument("modulus_2: h_max must be positive");
  if (2.0 * h_max > domain.length() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "modulus_2: x + 2h leaves the domain for h_max=" << h_max;
    throw std::domain_error(msg.str());
  }

  const std::vector<double> values = sample(f, domain, grid_m);
  const double step = domain.length() / static_cast<double>(grid_m);
  const auto span = static_cast<std::size_t>(std::floor(h_max / step * (1.0 + 1e-12)));

  double best = 0.0;
  for (std::size_t j = 1; j <= span; ++j) {
    for (std::size_t i = 0; i + 2 * j <= grid_m; ++i) {
      best = std::max(best, std::abs(values[i + 2 * j] - 2.0 * values[i + j] + values[i]));
    }
  }

  // h = h_max itself, which is generally off the grid.
  auto second_difference = [&](double x) {
    return std::abs(f(x + 2.0 * h_max) - 2.0 * f(x + h_max) + f(x));
  };
  const double last_start = std::max(domain.lo, domain.hi - 2.0 * h_max);
  for (std::size_t i = 0; i <= grid_m; ++i) {
    const double x = domain.lo + step * static_cast<double>(i);
    if (x > last_start) break;
    best = std::max(best, second_difference(x));
  }
  best = std::max(best, second_difference(last_start));
  return best;
}

double modulus_2_refined(const FunctionSpec& f, double h_max, Interval domain,
                         std::size_t grid_m) {
  return refine([&](std::size_t m) { return modulus_2(f, h_max, domain, m); }, grid_m,
                kModulus2GridCap);
}

bool lipschitz_check(const FunctionSpec& f, double M, double alpha, std::size_t sample_pairs,
                     Interval domain) {
  if (sample_pairs < 1000) throw std::invalid_argument("lipschitz_check: need >= 1000 pairs");
  if (!(M > 0.0) || !(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("lipschitz_check: need M > 0 and 0 < alpha <= 1");
  }
  std::mt19937_64 rng(0x5eed1234abcdULL);
  std::uniform_real_distribution<double> uniform(domain.lo, domain.hi);
  std::uniform_real_distribution<double> offset(-1e-2, 1e-2);
  auto holds = [&](double t, double x) {
    const double ft = f(t);
    const double fx = f(x);
    const double rounding = 8.0 * std::numeric_limits<double>::epsilon() *
                            (std::abs(ft) + std::abs(fx) + std::abs(t) + std::abs(x));
    return std::abs(ft - fx) <= M * std::pow(std::abs(t - x), alpha) * (1.0 + 1e-12) + rounding;
  };
  // Half far pairs, half close pairs where slopes show up.
  for (std::size_t i = 0; i < sample_pairs; ++i) {
    const double x = uniform(rng);
    double t = i % 2 == 0 ? uniform(rng) : x + offset(rng) * domain.length();
    t = std::clamp(t, domain.lo, domain.hi);
    if (!holds(t, x)) return false;
  }
  return true;
}

std::string_view bound_label(BoundKind kind) {
  switch (kind) {
    case BoundKind::modulus:
      return "thm32";
    case BoundKind::lipschitz:
      return "thm33";
    case BoundKind::local:
      return "thm34";
  }
  return "unknown";
}

double BoundReport::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) m = std::min(m, row.slack);
  return m;
}

BoundEvaluator::BoundEvaluator(const PQContext& ctx, std::size_t n, const FunctionSpec& f,
                               const IntegralOptions& opts)
    : ctx_(ctx),
      n_(n),
      f_(f),
      op_(ctx, n, f, opts),
      region_{0.0, kantorovich_support_end(ctx, n)} {}

double BoundEvaluator::actual_error(double x) const { return std::abs(op_(x) - f_(x)); }

namespace {

double omega_on(const FunctionSpec& f, double delta, Interval region) {
  if (delta <= 0.0) return 0.0;
  return modulus_continuity_refined(f, std::min(delta, region.length()), region);
}

double omega2_on(const FunctionSpec& f, double h, Interval region) {
  if (h <= 0.0) return 0.0;
  return modulus_2_refined(f, std::min(h, region.length() / 2.0), region);
}

BoundRow make_row(double x, double actual, double bound, double bound_unit, BoundKind kind) {
  return {x, actual, bound, kind, bound - actual, bound_unit};
}

}  // namespace

BoundRow BoundEvaluator::modulus(double x) const {
  const double d = delta_n(ctx_, n_, x);
  const double scale = 2.0 * kModulusSafety;
  return make_row(x, actual_error(x), scale * omega_on(f_, d, region_),
                  scale * omega_on(f_, d, Interval{0.0, 1.0}), BoundKind::modulus);
}

BoundRow BoundEvaluator::lipschitz(double x, double M, double alpha) const {
  if (!(M > 0.0) || !(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("Lipschitz bound: need M > 0 and 0 < alpha <= 1");
  }
  const double bound = M * std::pow(delta_n(ctx_, n_, x), alpha);
  return make_row(x, actual_error(x), bound, bound, BoundKind::lipschitz);
}

BoundRow BoundEvaluator::local(double x, double C) const {
  if (!(C > 0.0)) throw std::invalid_argument("local bound: C must be positive");
  const double h = delta_n_local(ctx_, n_, x);
  const double a = alpha_n(ctx_, n_);
  const Interval unit{0.0, 1.0};
  return make_row(x, actual_error(x), C * omega2_on(f_, h, region_) + omega_on(f_, a, region_),
                  C * omega2_on(f_, h, unit) + omega_on(f_, a, unit), BoundKind::local);
}

BoundRow bound_modulus(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x,
                       const IntegralOptions& opts) {
  return BoundEvaluator(ctx, n, f, opts).modulus(x);
}

BoundRow bound_lipschitz(const PQContext& ctx, std::size_t n, double M, double alpha,
                         const FunctionSpec& f, double x, const IntegralOptions& opts) {
  return BoundEvaluator(ctx, n, f, opts).lipschitz(x, M, alpha);
}

BoundRow bound_local(const PQContext& ctx, std::size_t n, const FunctionSpec& f, double x,
                     double C, const IntegralOptions& opts) {
  return BoundEvaluator(ctx, n, f, opts).local(x, C);
}

ParamSequence ParamSequence::standard() {
  return {Kind::standard, [](std::size_t n) {
            const double m = static_cast<double>(n) + 1.0;
            return PQParams(1.0 - 1.0 / (m * m), 1.0 - 1.0 / m);
          }};
}

ParamSequence ParamSequence::constant(PQParams params) {
  return {Kind::constant, [params](std::size_t) { return params; }};
}

ParamSequence ParamSequence::custom(std::function<PQParams(std::size_t)> generator) {
  if (!generator) throw std::invalid_argument("ParamSequence: empty generator");
  return {Kind::custom, std::move(generator)};
}

std::string_view ParamSequence::label() const noexcept {
  switch (kind_) {
    case Kind::standard:
      return "default";
    case Kind::constant:
      return "constant";
    case Kind::custom:
      return "custom";
  }
  return "custom";
}

namespace {

struct SupError {
  double value = 0.0;
  double argmax = 0.0;
};

SupError sup_error(const KantorovichOperator& op, const FunctionSpec& f,
                   std::span<const double> xs) {
  SupError out;
  for (const double x : xs) {
    const double err = std::abs(op(x) - f(x));
    if (err > out.value || x == xs.front()) out = {err, x};
  }
  return out;
}

ConvergenceEntry run_degree(const ParamSequence& seq, const FunctionSpec& f, std::size_t n,
                            std::span<const double> xs, const IntegralOptions& opts) {
  const PQParams params = seq.at(n);
  const PQContext ctx(params, n);
  ConvergenceEntry entry;
  entry.n = n;
  entry.p = params.p();
  entry.q = params.q();
  const SupError main = sup_error(KantorovichOperator(ctx, n, f, opts), f, xs);
  entry.sup_error = main.value;
  entry.argmax_x = main.argmax;
  double* tests[] = {&entry.e0_error, &entry.e1_error, &entry.e2_error};
  const char* names[] = {"one", "t", "t_sq"};
  for (int m = 0; m < 3; ++m) {
    const FunctionSpec e = FunctionSpec::catalog(names[m]);
    *tests[m] = sup_error(KantorovichOperator(ctx, n, e, opts), e, xs).value;
  }
  return entry;
}

}  // namespace

ConvergenceReport korovkin_run(const ParamSequence& seq, const FunctionSpec& f,
                               std::span<const std::size_t> n_list,
                               std::span<const double> x_grid, const IntegralOptions& opts) {
  if (n_list.empty()) throw std::invalid_argument("korovkin_run: empty n list");
  if (x_grid.empty()) throw std::invalid_argument("korovkin_run: empty grid");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0 || n_list[i] > kMaxDegree) {
      throw std::length_error("korovkin_run: n=" + std::to_string(n_list[i]) +
                              " outside [1, " + std::to_string(kMaxDegree) + "]");
    }
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("korovkin_run: n list must be strictly increasing");
    }
  }

  std::vector<std::future<ConvergenceEntry>> jobs;
  jobs.reserve(n_list.size());
  for (const std::size_t n : n_list) {
    jobs.push_back(std::async(std::launch::async, run_degree, std::cref(seq), std::cref(f), n,
                              x_grid, std::cref(opts)));
  }
  ConvergenceReport report{f.name(), x_grid.size(), {}};
  for (auto& job : jobs) report.entries.push_back(job.get());
  return report;
}

}  // namespace pqkant
