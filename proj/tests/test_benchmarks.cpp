#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "windplan/benchmarks.hpp"

using namespace windplan;

namespace {

Vec random_point(const bench::BenchmarkSpec& s, Rng& rng) {
  Vec x(s.dim);
  for (std::size_t d = 0; d < s.dim; ++d) x[d] = rng.uniform(s.bounds.lower(d), s.bounds.upper(d));
  return x;
}

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("suite layout") {
  const auto& all = bench::suite();
  REQUIRE(all.size() == 16);
  for (int id = 1; id <= 16; ++id) CHECK(all[static_cast<std::size_t>(id - 1)].id == id);
  CHECK(bench::spec(1).dim == 30);
  CHECK(bench::spec(12).dim == 2);
  CHECK(bench::spec(13).dim == 6);
  CHECK(bench::spec(14).dim == 4);
  CHECK(bench::spec(7).bounds.lower(0) == -100);
  CHECK(bench::spec(5).bounds.upper(3) == 30);
  CHECK(bench::spec(13).bounds.upper(0) == 1);
  CHECK(bench::spec(14).bounds.upper(0) == 10);
  CHECK(bench::spec(6).noisy);
  CHECK_FALSE(bench::spec(7).noisy);
  CHECK(bench::spec(3).kind == bench::Kind::unimodal);
  CHECK(bench::spec(9).kind == bench::Kind::multimodal);
  CHECK_THROWS_AS(bench::spec(0), std::invalid_argument);
  CHECK_THROWS_AS(bench::spec(17), std::invalid_argument);
}

TEST_CASE("id parsing") {
  CHECK(bench::parse_id("F7") == 7);
  CHECK(bench::parse_id("f16") == 16);
  CHECK(bench::id_name(3) == "F3");
  CHECK_THROWS(bench::parse_id("F17"));
  CHECK_THROWS(bench::parse_id("7"));
  CHECK_THROWS(bench::parse_id("Fx"));
  CHECK_THROWS(bench::parse_id(""));
}

TEST_CASE("every function agrees with the formula oracle at 1000 points") {
  Rng rng(2024);
  for (const auto& s : bench::suite()) {
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec x = random_point(s, rng);
      double mine;
      if (s.noisy) {
        // Subtract the noise term by replaying the same stream.
        Rng noise(static_cast<std::uint64_t>(i)), replay(static_cast<std::uint64_t>(i));
        mine = bench::evaluate(s.id, x, &noise) - replay.uniform();
      } else {
        mine = bench::evaluate(s.id, x);
      }
      if (!close_rel(mine, oracle::f(s.id, x), 1e-9)) ++bad;
    }
    INFO("F" << s.id);
    CHECK(bad == 0);
  }
}

TEST_CASE("zero at the known minimizers") {
  CHECK(bench::evaluate(1, Vec(30, 0.0)) == 0.0);
  CHECK(bench::evaluate(5, Vec(30, 1.0)) == 0.0);
  CHECK(bench::evaluate(7, Vec(30, 0.0)) == 0.0);
  CHECK(bench::evaluate(2, Vec(30, 0.0)) == 0.0);
  CHECK(bench::evaluate(3, Vec(30, 0.0)) == 0.0);
  CHECK(bench::evaluate(4, Vec(30, 0.0)) == 0.0);
}

TEST_CASE("tabulated minimizers hit the tabulated minima") {
  for (const auto& s : bench::suite()) {
    if (!s.argmin || s.noisy) continue;
    INFO("F" << s.id);
    CHECK(s.argmin->size() == s.dim);
    CHECK(bench::evaluate(s.id, *s.argmin) == doctest::Approx(s.known_min).epsilon(1e-3));
  }
  CHECK(bench::evaluate(12, Vec{0.08984201368301331, -0.7126564032704135}) == doctest::Approx(-1.0316284534898774));
  CHECK(bench::evaluate(14, Vec{4, 4, 4, 4}) == doctest::Approx(-10.1532).epsilon(1e-4));
  CHECK(bench::evaluate(16, Vec{4, 4, 4, 4}) == doctest::Approx(-10.5364).epsilon(1e-4));
}

TEST_CASE("F6 needs a noise stream and adds uniform noise") {
  const Vec x(30, 0.0);
  CHECK_THROWS_AS(bench::evaluate(6, x), std::invalid_argument);
  Rng noise(1);
  for (int i = 0; i < 200; ++i) {
    const double v = bench::evaluate(6, x, &noise);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  // Same seed, same sequence of values.
  auto a = bench::make_objective(6, 9);
  auto b = bench::make_objective(6, 9);
  for (int i = 0; i < 5; ++i) CHECK(a(x) == b(x));
}

TEST_CASE("penalty term") {
  const bench::PenaltyParams p{10, 100, 4};
  CHECK(bench::penalty(0.0, p) == 0.0);
  CHECK(bench::penalty(10.0, p) == 0.0);
  CHECK(bench::penalty(-10.0, p) == 0.0);
  CHECK(bench::penalty(12.0, p) == doctest::Approx(1600.0));
  CHECK(bench::penalty(-12.0, p) == doctest::Approx(1600.0));
}

TEST_CASE("wrong dimension is rejected") {
  CHECK_THROWS_AS(bench::evaluate(1, Vec(29, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(bench::evaluate(12, Vec(3, 0.0)), std::invalid_argument);
}
