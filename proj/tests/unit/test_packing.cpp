#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "lipent/errors.hpp"
#include "lipent/packing.hpp"
#include "oracles.hpp"

using namespace lipent;

namespace {

// f_sigma(u) straight from the definition.
double hat_value(const FiniteMetricSpace& k, const IndexSet& centers, double eps, std::uint64_t sigma, std::size_t u) {
  double s = 0.0;
  for (std::size_t j = 0; j < centers.size(); ++j)
    if ((sigma >> j) & 1U) s += std::max(3 * eps - k(u, centers[j]), 0.0);
  return s;
}

int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

}  // namespace

TEST_CASE("hat family on two points") {
  const auto line2 = FiniteMetricSpace::line(2);
  const double eps = 1.0 / 6.0;
  const HatFamily f = build_hat_family(line2, eps);
  CHECK(f.center_count() == 2);
  CHECK(f.size() == 4);
  // sigma = (1, 0) is member 1
  CHECK(f.evaluate(1)[0] == doctest::Approx(0.5));
  CHECK(f.evaluate(1)[1] == doctest::Approx(0.0));
  CHECK(f.sup_distance(1, 0) == doctest::Approx(0.5));
  for (std::uint64_t s = 0; s < 4; ++s) CHECK(f.sup_distance(s, s) == 0.0);
  const auto v = verify_hat_family(f, line2);
  CHECK(v.ok);
  CHECK(v.exhaustive);
  CHECK(v.pairs_checked == 6);
}

TEST_CASE("hat family on the 8-point circle") {
  const auto circle = FiniteMetricSpace::circle(8, 8.0);
  const double eps = 1.0 / 6.0;
  const HatFamily f = build_hat_family(circle, eps);
  CHECK(f.center_count() == 8);
  CHECK(f.size() == 256);
  // independent enumeration of all pairs from the definition
  double min_pair = INFINITY, max_lip = 0.0;
  for (std::uint64_t a = 0; a < 256; ++a) {
    for (std::size_t u = 0; u < 8; ++u) {
      CHECK(f.evaluate(a)[u] == doctest::Approx(hat_value(circle, f.centers(), eps, a, u)).epsilon(1e-14));
      for (std::size_t w = u + 1; w < 8; ++w)
        max_lip = std::max(max_lip, std::abs(hat_value(circle, f.centers(), eps, a, u) -
                                             hat_value(circle, f.centers(), eps, a, w)) /
                                        circle(u, w));
    }
    for (std::uint64_t b = a + 1; b < 256; ++b) {
      double d = 0.0;
      for (std::size_t u = 0; u < 8; ++u)
        d = std::max(d, std::abs(hat_value(circle, f.centers(), eps, a, u) - hat_value(circle, f.centers(), eps, b, u)));
      min_pair = std::min(min_pair, d);
    }
  }
  CHECK(min_pair >= 0.5 - 1e-12);
  CHECK(max_lip <= 1.0 + 1e-12);
  const auto v = verify_hat_family(f, circle);
  CHECK(v.ok);
  CHECK(v.exhaustive);
  CHECK(v.min_pair_distance == doctest::Approx(min_pair));
  // certificate: log2(size) = N >= H(K; 6 eps)
  const auto cover = exact_covering_number(circle, circle.all(), circle.all(), 6 * eps);
  CHECK(cover.count == 3);
  CHECK(std::log2(static_cast<double>(f.size())) >= std::log2(3.0));
}

TEST_CASE("hat family errors and sampled verification") {
  const auto line = FiniteMetricSpace::line(3, 0.1);
  CHECK_THROWS_AS(build_hat_family(line, 1.0 / 6.0), Error);
  try {
    build_hat_family(line, 1.0 / 6.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPacking);
  }
  CHECK_THROWS_AS(build_hat_family(FiniteMetricSpace::line(3), 0.5), Error);
  const auto big = FiniteMetricSpace::line(17);
  try {
    build_hat_family(big, 1.0 / 6.0);
    FAIL("expected FamilyTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FamilyTooLarge);
  }
  // 12 centers: 4096 members, sampled pairs
  const auto line12 = FiniteMetricSpace::line(12);
  const auto f = build_hat_family(line12, 1.0 / 6.0);
  CHECK(f.size() == 4096);
  const auto v = verify_hat_family(f, line12, 5);
  CHECK_FALSE(v.exhaustive);
  CHECK(v.pairs_checked == 1000);
  CHECK(v.ok);
}

TEST_CASE("hat family: random spaces satisfy the invariants") {
  std::mt19937_64 gen(4242);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + trial % 8;
    const auto d = oracle::random_graph_metric(n, gen);
    const auto space = oracle::make_space(d);
    const double eps = 0.1 / 6.0 * (1 + trial % 4);
    CAPTURE(trial);
    try {
      const HatFamily f = build_hat_family(space, eps);
      const auto v = verify_hat_family(f, space, trial);
      CHECK(v.ok);
      CHECK(v.max_sup <= 3 * eps + 1e-12);
      CHECK(f.center_count() >= exact_covering_number(space, space.all(), space.all(), 6 * eps).count);
      CHECK(f.center_count() == oracle::packing(d, oracle::iota(n), 6 * eps));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoPacking);
      CHECK(oracle::packing(d, oracle::iota(n), 6 * eps) < 2);
    }
  }
}

TEST_CASE("entropy lower bound") {
  CHECK(entropy_lower_bound_uniform(0.0) == 1.0);
  CHECK(entropy_lower_bound_uniform(3.0) == 8.0);
}

TEST_CASE("Gilbert-Varshamov codes") {
  const SignCode c8 = gilbert_varshamov(8);
  CHECK(c8.required_distance == 2);
  CHECK(c8.target_size == 3);
  CHECK(c8.words.size() >= 3);
  CHECK(c8.words.front() == 0);  // all +1
  for (int i = 0; i < 8; ++i) CHECK(c8.sign(0, i) == 1);
  const SignCode c16 = gilbert_varshamov(16);
  CHECK(c16.required_distance == 4);
  CHECK(c16.target_size == 8);
  CHECK(c16.words.size() >= 8);
  for (int n : {1, 2, 3, 4, 5, 7, 8, 12, 16, 20, 24, 28, 32}) {
    CAPTURE(n);
    const SignCode c = gilbert_varshamov(n);
    CHECK(c.required_distance == static_cast<int>(std::ceil(n / 4.0)));
    CHECK(c.target_size == static_cast<std::uint64_t>(std::ceil(std::exp(n / 8.0))));
    CHECK(c.words.size() >= c.target_size);
    int dmin = n + 1;
    for (std::size_t a = 0; a < c.words.size(); ++a) {
      CHECK(c.words[a] < (std::uint64_t{1} << n));
      for (std::size_t b = a + 1; b < c.words.size(); ++b) dmin = std::min(dmin, hamming(c.words[a], c.words[b]));
    }
    CHECK(dmin >= c.required_distance);
    CHECK(c.min_distance() == dmin);
    // lexicographic greedy: every skipped word below the last kept one conflicts with an earlier word
    for (std::uint64_t x = 0; x < c.words.back() && x < 4096; ++x) {
      const bool kept = std::find(c.words.begin(), c.words.end(), x) != c.words.end();
      if (kept) continue;
      bool conflict = false;
      for (std::uint64_t w : c.words)
        if (w < x && hamming(w, x) < c.required_distance) conflict = true;
      CHECK(conflict);
    }
  }
  CHECK_THROWS_AS(gilbert_varshamov(0), Error);
  CHECK_THROWS_AS(gilbert_varshamov(kMaxCodeLength + 1), Error);
}

TEST_CASE("bump family in one dimension") {
  const BumpFamily f = build_bump_family(1, 2, 8, gilbert_varshamov(2));
  CHECK(f.lambda() == 0.5);
  CHECK(f.size() == 2);
  CHECK(f.separation_bound() == doctest::Approx(1.0 / (8 * std::numbers::e * 2)));
  CHECK(f.separation_bound() == doctest::Approx(0.02299).epsilon(1e-3));
  // members differ on one subcube: 2 * amplitude * |phi|_1 / N
  const double expected = 2 * f.amplitude() * (1 - f.lambda() / 2) / 2;
  CHECK(f.l1_distance(0, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(f.l1_distance(0, 1) == doctest::Approx(0.09375));
  CHECK(f.l1_distance(1, 1) == 0.0);
  CHECK(f.bump_l1_quadrature() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(bump_l1_closed_form(1, 0.5) == doctest::Approx(0.75));
  const auto v = verify_bump_family(f);
  CHECK(v.ok);
  CHECK(v.max_lipschitz <= 1 + 1e-9);
  CHECK(v.max_sup <= 1.0);
  CHECK(v.min_pair_l1 >= v.separation_bound);
}

TEST_CASE("bump family grid alignment") {
  CHECK_THROWS_AS(build_bump_family(1, 2, 6, gilbert_varshamov(2)), Error);
  try {
    build_bump_family(2, 2, 10, gilbert_varshamov(4));
    FAIL("expected GridMisaligned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMisaligned);
  }
  CHECK_NOTHROW(build_bump_family(2, 2, 12, gilbert_varshamov(4)));
  CHECK_THROWS_AS(build_bump_family(1, 2, 8, gilbert_varshamov(3)), Error);
}

TEST_CASE("bump family closed forms and fine-quadrature oracle") {
  for (int d = 1; d <= 3; ++d) {
    const double lambda = 1.0 / (1 + d);
    // ||phi||_1 = integral over t of P(min_a g(x_a) > t) = integral of (1 - lambda t)^d dt
    double riemann = 0.0;
    const int steps = 200000;
    for (int i = 0; i < steps; ++i) riemann += std::pow(1 - lambda * (i + 0.5) / steps, d) / steps;
    CHECK(bump_l1_closed_form(d, lambda) == doctest::Approx(riemann).epsilon(1e-9));
    CHECK(bump_l1_closed_form(d, lambda) >= std::pow(1 - lambda, d));
  }
  // d = 2: midpoint on the aligned grid vs the closed form (second-order error)
  const BumpFamily f2 = build_bump_family(2, 2, 48, gilbert_varshamov(4));
  CHECK(f2.bump_l1_quadrature() == doctest::Approx(bump_l1_closed_form(2, 1.0 / 3)).epsilon(1e-3));
  double dmin = INFINITY;
  for (std::size_t a = 0; a < f2.size(); ++a)
    for (std::size_t b = a + 1; b < f2.size(); ++b) {
      const int cubes = hamming(f2.code().words[a], f2.code().words[b]);
      const double exact = cubes * 2 * f2.amplitude() * bump_l1_closed_form(2, 1.0 / 3) / 4;
      CHECK(f2.l1_distance(a, b) == doctest::Approx(exact).epsilon(1e-3));
      dmin = std::min(dmin, f2.l1_distance(a, b));
    }
  CHECK(dmin >= f2.separation_bound());
}

TEST_CASE("bump family members are in the unit Lipschitz ball") {
  for (auto [d, N, grid] : {std::tuple{1, 2, 8}, std::tuple{1, 4, 16}, std::tuple{2, 2, 12}, std::tuple{1, 8, 32},
                            std::tuple{3, 2, 16}}) {
    CAPTURE(d);
    CAPTURE(N);
    int length = 1;
    for (int a = 0; a < d; ++a) length *= N;
    const BumpFamily f = build_bump_family(d, N, grid, gilbert_varshamov(length));
    const auto v = verify_bump_family(f);
    CHECK(v.ok);
    CHECK(v.max_sup <= 1.0);
    CHECK(v.max_lipschitz <= 1.0 + 1e-9);
    CHECK(v.min_pair_l1 >= v.separation_bound - 1e-9);
    CHECK(v.bump_l1 >= v.bump_l1_lower);
    // exact pointwise evaluation: random point pairs respect Lipschitz 1 in l_inf
    std::mt19937_64 gen(d * 100 + N);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> x(d), y(d);
      double dist = 0.0;
      for (int a = 0; a < d; ++a) {
        x[a] = u(gen);
        y[a] = std::clamp(x[a] + 0.05 * (u(gen) - 0.5), 0.0, 1.0);
        dist = std::max(dist, std::abs(x[a] - y[a]));
      }
      if (dist > 0) CHECK(std::abs(f.evaluate(1 % f.size(), x) - f.evaluate(1 % f.size(), y)) <= dist * (1 + 1e-9));
    }
  }
}

TEST_CASE("embedding dimension selection") {
  const auto c = select_embedding_dimension(1.0, 2.0, 1.0, 1.0);
  CHECK(c.d == 1);
  CHECK(c.beta == doctest::Approx(std::log(2.0)));
  CHECK(select_embedding_dimension(1.0, 3.0, 1.0, 0.5).d == 1);  // eps = c2
  const auto c10 = select_embedding_dimension(0.01, 2.0, 1.0, 1.0);
  CHECK(c10.d == 10);
  CHECK(c10.lower_inequality);
  CHECK(c10.upper_inequality);
  CHECK_THROWS_AS(select_embedding_dimension(1.5, 2.0, 1.0, 1.0), Error);
  try {
    select_embedding_dimension(1.5, 2.0, 1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EpsilonTooLarge);
  }
  // direct scan oracle over a lattice of parameters
  for (double alpha : {0.5, 1.0, 2.0})
    for (double c2 : {0.25, 1.0})
      for (double eps : {1e-4, 3e-3, 0.02, 0.1, 0.2}) {
        if (eps > c2) continue;
        const auto r = select_embedding_dimension(eps, 2.0, c2, alpha);
        int best = 1;
        for (int d = 1; d < 100000; ++d)
          if (eps * std::pow(d, 1 + alpha) <= c2) best = d;
        CAPTURE(alpha);
        CAPTURE(eps);
        CHECK(r.d == best);
        CHECK(r.lower_inequality);
        CHECK(r.upper_inequality);
        CHECK(r.dd1);
        CHECK(r.dd2);
        CHECK(r.dd3);
      }
}
