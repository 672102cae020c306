#include <doctest.h>

#include <random>

#include "lipent/errors.hpp"
#include "lipent/metricspace.hpp"
#include "lipent/packing.hpp"
#include "oracles.hpp"

using namespace lipent;

TEST_CASE("construction validates the metric") {
  CHECK_NOTHROW(oracle::make_space({{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(oracle::make_space({{0, 1}, {2, 0}}), Error);              // asymmetric
  CHECK_THROWS_AS(oracle::make_space({{1, 1}, {1, 0}}), Error);              // nonzero diagonal
  CHECK_THROWS_AS(oracle::make_space({{0, -1}, {-1, 0}}), Error);            // negative
  CHECK_THROWS_AS(oracle::make_space({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}), Error);  // triangle
  try {
    oracle::make_space({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("json round trip and strict keys") {
  const auto space = FiniteMetricSpace::circle(5, 5.0);
  const auto back = FiniteMetricSpace::from_json(space.to_json());
  REQUIRE(back.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(back(i, j) == space(i, j));
  auto j = space.to_json();
  j["extra"] = 1;
  CHECK_THROWS_AS(FiniteMetricSpace::from_json(j), Error);
}

TEST_CASE("line examples") {
  const auto line3 = FiniteMetricSpace::line(3);
  const auto cover = exact_covering_number(line3, line3.all(), line3.all(), 1.0);
  CHECK(cover.count == 1);
  CHECK(cover.centers == IndexSet{1});
  CHECK(exact_packing_number(line3, line3.all(), 1.0).count == 3);
  CHECK(exact_packing_number(line3, line3.all(), 3.0).count == 1);
  const auto s = sandwich_check(line3, line3.all(), line3.all(), 1.0);
  CHECK(s.packing_3eps == 1);
  CHECK(s.covering == 1);
  CHECK(s.packing == 3);
  CHECK(s.holds);

  const auto line4 = FiniteMetricSpace::line(4);
  CHECK(exact_covering_number(line4, line4.all(), line4.all(), 0.5).count == 4);
  const auto r = minimax_code_length(line4, line4.all(), line4.all(), 0.5);
  CHECK(r.covering == 4);
  CHECK(r.bits == 2);

  const auto g = greedy_covering(line3, line3.all(), line3.all(), 1.0);
  CHECK(g.count >= 1);
  CHECK(g.count <= 2);
  CHECK(covers(line3, line3.all(), g.centers, 1.0));
}

TEST_CASE("closed balls: boundary ties count as covered and separated") {
  const auto line2 = FiniteMetricSpace::line(2);
  CHECK(exact_covering_number(line2, line2.all(), line2.all(), 1.0).count == 1);
  CHECK(exact_packing_number(line2, line2.all(), 1.0).count == 2);
}

TEST_CASE("degenerate radii") {
  const auto space = FiniteMetricSpace::random_plane(9, 3);
  const double diam = space.diameter();
  CHECK(exact_covering_number(space, space.all(), space.all(), diam).count == 1);
  CHECK(greedy_covering(space, space.all(), space.all(), diam).count == 1);
  const auto s = sandwich_check(space, space.all(), space.all(), diam);
  CHECK(s.packing_3eps == 1);
  CHECK(s.covering == 1);
  CHECK(s.packing == 2);  // the diameter pair is exactly diam apart
  CHECK(exact_packing_number(space, space.all(), diam * 1.001).count == 1);
  CHECK(minimax_code_length(space, space.all(), space.all(), diam).bits == 0);
  CHECK(greedy_covering(space, IndexSet{4}, space.all(), 1e-6).count == 1);
  double min_pos = INFINITY;
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = i + 1; j < space.size(); ++j) min_pos = std::min(min_pos, space(i, j));
  CHECK(exact_packing_number(space, space.all(), min_pos / 2).count == space.size());
}

TEST_CASE("seeded plane instance of the sandwich") {
  const auto space = FiniteMetricSpace::random_plane(10, 7);
  CHECK(sandwich_check(space, space.all(), space.all(), 0.3).holds);
}

TEST_CASE("size limit on exact search") {
  const auto space = FiniteMetricSpace::random_plane(21, 1);
  CHECK_THROWS_AS(exact_covering_number(space, space.all(), space.all(), 0.1), Error);
  CHECK_THROWS_AS(exact_packing_number(space, space.all(), 0.1), Error);
  try {
    exact_packing_number(space, space.all(), 0.1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeLimitExceeded);
  }
  CHECK(covers(space, space.all(), greedy_covering(space, space.all(), space.all(), 0.1).centers, 0.1));
}

TEST_CASE("bits_for and code length with three codewords") {
  CHECK(bits_for(1) == 0);
  CHECK(bits_for(2) == 1);
  CHECK(bits_for(3) == 2);
  CHECK(bits_for(4) == 2);
  CHECK(bits_for(5) == 3);
  // the 8-point circle of circumference 8 needs three unit balls
  const auto circle = FiniteMetricSpace::circle(8, 8.0);
  const auto r = minimax_code_length(circle, circle.all(), circle.all(), 1.0);
  CHECK(r.covering == 3);
  CHECK(r.bits == 2);
  CHECK(r.bits == oracle::bits(oracle::covering(
                      [&] {
                        oracle::Matrix d(8, std::vector<double>(8));
                        for (std::size_t i = 0; i < 8; ++i)
                          for (std::size_t j = 0; j < 8; ++j) d[i][j] = circle(i, j);
                        return d;
                      }(),
                      oracle::iota(8), oracle::iota(8), 1.0)));
}

TEST_CASE("exact search matches brute force on random spaces") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + trial % 9;
    const oracle::Matrix d = trial % 2 ? oracle::random_graph_metric(n, gen) : oracle::random_euclidean(n, 2, gen);
    const auto space = oracle::make_space(d);
    const double eps = eps_dist(gen);
    const auto all = oracle::iota(n);
    // A is the even-indexed half, V the whole space
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < n; i += 2) a.push_back(i);
    CAPTURE(trial);
    CAPTURE(eps);

    const auto cover = exact_covering_number(space, all, all, eps);
    CHECK(cover.count == oracle::covering(d, all, all, eps));
    CHECK(covers(space, all, cover.centers, eps));
    CHECK(cover.centers.size() == cover.count);
    CHECK(exact_covering_number(space, a, all, eps).count == oracle::covering(d, a, all, eps));
    CHECK(exact_covering_number(space, a, a, eps).count == oracle::covering(d, a, a, eps));

    const auto pack = exact_packing_number(space, all, eps);
    CHECK(pack.count == oracle::packing(d, all, eps));
    CHECK(is_packing(space, pack.members, eps));

    const auto code = minimax_code_length(space, a, all, eps);
    CHECK(code.bits == oracle::bits(oracle::covering(d, a, all, eps)));
    CHECK(code.bits_restricted == oracle::bits(oracle::covering(d, a, a, eps)));
    CHECK(code.bits_restricted >= code.bits);
    CHECK(static_cast<double>(code.bits) >= code.entropy);
  }
}

TEST_CASE("properties: sandwich, greedy bounds, monotonicity") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const oracle::Matrix d = trial % 3 == 0 ? oracle::random_graph_metric(n, gen) : oracle::random_euclidean(n, 3, gen);
    const auto space = oracle::make_space(d);
    const auto all = space.all();
    double prev_cover = INFINITY, prev_pack = INFINITY;
    for (double eps : {0.05, 0.1, 0.2, 0.35, 0.5, 0.8, 1.5}) {
      CAPTURE(trial);
      CAPTURE(eps);
      const auto s = sandwich_check(space, all, all, eps);
      CHECK(s.holds);
      CHECK(s.packing_3eps <= s.covering);
      CHECK(s.covering <= s.packing);
      const auto g = greedy_covering(space, all, all, eps);
      CHECK(covers(space, all, g.centers, eps));
      CHECK(g.count >= s.covering);
      const auto gp = greedy_packing(space, all, eps);
      CHECK(is_packing(space, gp.members, eps));
      CHECK(gp.count <= s.packing);
      CHECK(static_cast<double>(s.covering) <= prev_cover);
      CHECK(static_cast<double>(s.packing) <= prev_pack);
      prev_cover = static_cast<double>(s.covering);
      prev_pack = static_cast<double>(s.packing);
    }
  }
}

TEST_CASE("greedy covering is deterministic with lowest-index ties") {
  const auto line = FiniteMetricSpace::line(5);
  const auto a = greedy_covering(line, line.all(), line.all(), 1.0);
  const auto b = greedy_covering(line, line.all(), line.all(), 1.0);
  CHECK(a.centers == b.centers);
  // point 1 covers {0,1,2} first (ties with 2 and 3 go to the lowest index)
  REQUIRE(!a.centers.empty());
  CHECK(a.centers.front() == 1);
}

TEST_CASE("dictionary minimax error") {
  const SampledFunctional f{"S", {0.0, 1.0, 2.0}};
  const SampledFunctional g{"S", {0.5, 1.5, 2.5}};
  const std::vector<SampledFunctional> cls{f, g};
  CHECK(dictionary_minimax_error(cls, cls, FunctionNorm::sup()) == 0.0);
  const std::vector<SampledFunctional> shifted{{"S", {0.25, 1.25, 2.25}}};
  const std::vector<SampledFunctional> just_f{f};
  CHECK(dictionary_minimax_error(just_f, shifted, FunctionNorm::sup()) == doctest::Approx(0.25));
  // enlarging the dictionary never increases the error
  std::vector<SampledFunctional> bigger = shifted;
  bigger.push_back(g);
  CHECK(dictionary_minimax_error(cls, bigger, FunctionNorm::sup()) <=
        dictionary_minimax_error(cls, shifted, FunctionNorm::sup()));
  const std::vector<SampledFunctional> other{{"T", {0.0, 1.0, 2.0}}};
  CHECK_THROWS_AS(dictionary_minimax_error(cls, other, FunctionNorm::sup()), Error);

  // four hats on two points against the zero function: error 3 eps
  const auto line2 = FiniteMetricSpace::line(2);
  const double eps = 1.0 / 6.0;
  const HatFamily family = build_hat_family(line2, eps);
  std::vector<SampledFunctional> hats;
  for (std::uint64_t s = 0; s < family.size(); ++s) hats.push_back(family.member(s));
  const std::vector<SampledFunctional> zero{{"K", {0.0, 0.0}}};
  CHECK(dictionary_minimax_error(hats, zero, FunctionNorm::sup()) == doctest::Approx(3 * eps));
}

TEST_CASE("weighted lp distance") {
  const FunctionNorm l1 = FunctionNorm::lp(1.0, {0.5, 0.5});
  CHECK(l1.distance(std::vector<double>{0, 0}, std::vector<double>{1, 3}) == doctest::Approx(2.0));
  const FunctionNorm l2 = FunctionNorm::lp(2.0, {1.0, 1.0});
  CHECK(l2.distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(5.0));
}
