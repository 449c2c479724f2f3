#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pqkant/operators.hpp"

using namespace pqkant;

namespace {

const FunctionSpec kOne = FunctionSpec::catalog("one");
const FunctionSpec kT = FunctionSpec::catalog("t");
const FunctionSpec kTSq = FunctionSpec::catalog("t_sq");
const FunctionSpec kSin7 = FunctionSpec::catalog("sin7");
const FunctionSpec kAbsHalf = FunctionSpec::catalog("abs_half");

}  // namespace

TEST_CASE("basis weights: partition of unity and endpoint exactness") {
  for (const auto& [p, q] : {std::pair{1.0, 0.9}, {0.9, 0.8}, {0.99, 0.95}}) {
    const PQContext ctx(PQParams(p, q), 100);
    for (std::size_t n : {1, 2, 7, 30, 100}) {
      for (const double x : unit_grid(41)) {
        const auto b = basis_weights(ctx, n, x);
        REQUIRE(b.w.size() == n + 1);
        const double sum = std::accumulate(b.w.begin(), b.w.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
      const auto b0 = basis_weights(ctx, n, 0.0);
      const auto b1 = basis_weights(ctx, n, 1.0);
      CHECK(b0.w[0] == 1.0);
      CHECK(b1.w[n] == 1.0);
      for (std::size_t k = 1; k <= n; ++k) CHECK(b0.w[k] == 0.0);
      for (std::size_t k = 0; k < n; ++k) CHECK(b1.w[k] == 0.0);
    }
  }
  const PQContext ctx(PQParams(0.9, 0.8), 10);
  CHECK_THROWS_AS(basis_weights(ctx, 5, -0.01), std::domain_error);
  CHECK_THROWS_AS(basis_weights(ctx, 5, 1.01), std::domain_error);
}

TEST_CASE("basis weights match the product definition") {
  const PQContext ctx(PQParams(0.9, 0.8), 20);
  for (std::size_t n : {1, 4, 12}) {
    for (const double x : {0.05, 0.37, 0.8, 0.99}) {
      const auto b = basis_weights(ctx, n, x);
      for (std::size_t k = 0; k <= n; ++k) {
        const double expected = double(oracle::basis_product(0.9L, 0.8L, n, k, x));
        CHECK(std::abs(b.w[k] - expected) <= 1e-13 + 1e-12 * std::abs(expected));
      }
    }
  }
}

TEST_CASE("no underflow to NaN at large degree") {
  const PQContext ctx(PQParams(0.999, 0.99), kMaxDegree);
  const auto b = basis_weights(ctx, kMaxDegree, 0.5);
  for (const double w : b.w) {
    CHECK(std::isfinite(w));
    CHECK(w >= 0.0);
  }
  CHECK_THROWS_AS(KantorovichOperator(PQContext(PQParams(0.999, 0.99), kMaxDegree + 1),
                                      kMaxDegree + 1, kOne),
                  std::length_error);
}

TEST_CASE("cells tile bit-exactly and start at 0") {
  for (const auto& [p, q] : {std::pair{1.0, 0.9}, {0.9, 0.8}, {0.99, 0.95}}) {
    const PQContext ctx(PQParams(p, q), 100);
    for (std::size_t n = 1; n <= 100; ++n) {
      const auto cells = kantorovich_cells(ctx, n);
      REQUIRE(cells.size() == n + 1);
      CHECK(cells.front().lower == 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(cells[k].upper == cells[k + 1].lower);
        CHECK(cells[k].lower < cells[k].upper);
      }
      CHECK(kantorovich_support_end(ctx, n) == cells.back().upper / p);
    }
  }
}

TEST_CASE("operator oracle values") {
  const PQContext ctx(PQParams(0.9, 0.8), 10);
  CHECK(kantorovich_apply(ctx, 3, kTSq, 0.5) == doctest::Approx(0.58884318771601535).epsilon(1e-12));
  CHECK(kantorovich_apply(ctx, 5, kSin7, 0.3) == doctest::Approx(1.0721257226800092).epsilon(1e-12));
  CHECK(kantorovich_apply(ctx, 4, kAbsHalf, 0.7) ==
        doctest::Approx(0.38967879957603698).epsilon(1e-12));
}

TEST_CASE("operator agrees with the literal long double formula") {
  const auto sin7 = [](long double t) { return 1 + std::sin(7 * t); };
  for (const auto& [p, q] : {std::pair{0.9, 0.8}, {1.0, 0.9}}) {
    const PQContext ctx(PQParams(p, q), 10);
    for (std::size_t n : {1, 3, 6}) {
      const KantorovichOperator op(ctx, n, kSin7);
      for (const double x : {0.0, 0.2, 0.55, 1.0}) {
        const double expected = double(oracle::kantorovich_direct(sin7, p, q, n, x, 4000));
        CHECK(std::abs(op(x) - expected) <= 1e-11);
      }
    }
  }
}

TEST_CASE("operator on e0, e1 and endpoint values") {
  const PQContext ctx(PQParams(0.95, 0.9), 60);
  for (std::size_t n : {1, 5, 20, 60}) {
    const KantorovichOperator one(ctx, n, kOne);
    const KantorovichOperator t(ctx, n, kT);
    const double shift = ctx.p_pow(n) / (pq_int(ctx, 2) * pq_int(ctx, n));
    for (const double x : unit_grid(21)) {
      CHECK(std::abs(one(x) - 1.0) <= 1e-12);
      CHECK(std::abs(t(x) - x - shift) <= 1e-12);
    }
    // At x = 0 and x = 1 only the first or last cell contributes.
    const KantorovichOperator sin7(ctx, n, kSin7);
    CHECK(sin7(0.0) == sin7.cell_means().front());
    CHECK(sin7(1.0) == sin7.cell_means().back());
  }
}

TEST_CASE("operator linearity") {
  const PQContext ctx(PQParams(0.9, 0.8), 20);
  const auto combo = FunctionSpec::tabulated(
      [] {
        std::vector<double> ts;
        for (int i = 0; i <= 2000; ++i) ts.push_back(i / 1000.0);
        return ts;
      }(),
      [] {
        std::vector<double> vs;
        for (int i = 0; i <= 2000; ++i) {
          const double t = i / 1000.0;
          vs.push_back(2.0 * t * t - 3.0 * t + 0.5);
        }
        return vs;
      }());
  // Piecewise-linear interpolation is not exactly quadratic, so compare
  // catalog combinations instead and keep the table as a smoke test.
  for (const double x : {0.1, 0.5, 0.9}) {
    const double lhs = 2.0 * kantorovich_apply(ctx, 12, kTSq, x) -
                       3.0 * kantorovich_apply(ctx, 12, kT, x) +
                       0.5 * kantorovich_apply(ctx, 12, kOne, x);
    CHECK(std::abs(kantorovich_apply(ctx, 12, combo, x) - lhs) < 1e-5);
  }
}

TEST_CASE("operator rejects functions that do not cover the support") {
  const PQContext ctx(PQParams(0.9, 0.8), 10);
  const auto narrow = FunctionSpec::tabulated({0.0, 1.0}, {0.0, 1.0});
  CHECK_THROWS_AS(KantorovichOperator(ctx, 5, narrow), std::domain_error);
  const KantorovichOperator op(ctx, 5, kT);
  CHECK_THROWS_AS(op(1.5), std::domain_error);
}

TEST_CASE("grid evaluation preserves order") {
  const PQContext ctx(PQParams(0.9, 0.8), 10);
  const auto xs = unit_grid(11);
  const auto curve = kantorovich_eval_grid(ctx, 6, kSin7, xs);
  REQUIRE(curve.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(curve[i].x == xs[i]);
    CHECK(curve[i].value == kantorovich_apply(ctx, 6, kSin7, xs[i]));
  }
  const std::vector<double> bad = {0.2, 1.3};
  CHECK_THROWS_AS(kantorovich_eval_grid(ctx, 6, kSin7, bad), std::domain_error);
  CHECK_THROWS_AS(unit_grid(1), std::invalid_argument);
  CHECK(unit_grid(2) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("p = 1, q -> 1 limit on e1 is x + 1/(2n)") {
  // Cells [k]/[n] rather than k/(n+1), so the limit is not the classical operator.
  const PQContext ctx(PQParams(1.0, 0.9999), 10);
  for (const double x : {0.0, 0.3, 1.0}) {
    const double value = kantorovich_apply(ctx, 10, kT, x);
    CHECK(std::abs(value - (x + 0.05)) < 1e-3);
    CHECK(std::abs(value - double(oracle::classical_kantorovich_t(10, x))) > 1e-3);
  }
}

TEST_CASE("q-Kantorovich operator") {
  CHECK(q_kantorovich_apply(1, 0.5, kT, 0.0) == doctest::Approx(4.0 / 9.0).epsilon(1e-13));
  CHECK(q_kantorovich_apply(10, 0.9999, kT, 0.3) ==
        doctest::Approx(0.31822045897751701).epsilon(1e-10));
  CHECK(std::abs(q_kantorovich_apply(10, 0.9999, kT, 0.3) - 7.0 / 22.0) < 1e-2);
  CHECK(q_kantorovich_apply(3, 0.7, kSin7, 0.4) ==
        doctest::Approx(0.98403566746207361).epsilon(1e-12));
  for (const double q : {0.5, 0.9, 0.99}) {
    const QKantorovichOperator op(15, q, kOne);
    for (const double x : unit_grid(21)) CHECK(std::abs(op(x) - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(QKantorovichOperator(5, 1.0, kOne), std::invalid_argument);
}

TEST_CASE("revised Bernstein operator reproduces constants and interpolates at 0") {
  const PQContext ctx(PQParams(0.9, 0.8), 20);
  for (const double x : unit_grid(11)) {
    CHECK(std::abs(pq_bernstein_apply(ctx, 10, kOne, x) - 1.0) <= 1e-12);
  }
  CHECK(pq_bernstein_apply(ctx, 10, kSin7, 0.0) == kSin7(0.0));
}
