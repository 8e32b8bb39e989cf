#include <catch2/catch_amalgamated.hpp>

#include "sensbounds/errors.hpp"
#include "sensbounds/step_cdf.hpp"
#include "support/generators.hpp"

using namespace sensbounds;
using Catch::Matchers::WithinAbs;

namespace {

const StepCdf bern = StepCdf::from_masses({0.0, 1.0}, {0.5, 0.5});
const StepCdf uniform4 = StepCdf::from_masses({1, 2, 3, 4}, {0.25, 0.25, 0.25, 0.25});

}  // namespace

TEST_CASE("construction merges, sorts and validates") {
  const auto f = StepCdf::from_masses({2.0, 1.0, 2.0 + 1e-14, 3.0}, {0.25, 0.25, 0.25, 0.25});
  REQUIRE(f.size() == 3);
  CHECK(f.support()[1] == 2.0);
  CHECK(f.masses()[1] == 0.5);
  CHECK(f.cum().back() == 1.0);

  const auto zero = StepCdf::from_masses({0.0, 1.0, 2.0}, {0.5, 0.0, 0.5});
  CHECK(zero.size() == 2);

  CHECK_THROWS_AS(StepCdf::from_masses({0.0}, {0.9}), InputError);
  CHECK_THROWS_AS(StepCdf::from_masses({0.0, 1.0}, {1.2, -0.2}), InputError);
  CHECK_THROWS_AS(StepCdf::from_masses({}, {}), InputError);
  CHECK_THROWS_AS(StepCdf::from_cumulative({0.0, 1.0}, {0.6, 0.5}), InputError);
  CHECK_THROWS_AS(StepCdf::from_cumulative({1.0, 0.0}, {0.5, 1.0}), InputError);

  // Within the normalisation tolerance the total is snapped to 1.
  const auto snapped = StepCdf::from_masses({0.0, 1.0}, {0.5, 0.5 + 5e-10});
  CHECK(snapped.cum().back() == 1.0);
}

TEST_CASE("evaluation and left limits") {
  CHECK(bern.eval(0.0) == 0.5);
  CHECK(bern.eval(-1.0) == 0.0);
  CHECK(bern.eval(1.0) == 1.0);
  CHECK(bern(0.3) == 0.5);

  CHECK(bern.left_limit(0.0) == 0.0);
  CHECK(bern.left_limit(0.5) == 0.5);
  CHECK(bern.left_limit(1.0) == 0.5);
  CHECK(bern.mass_at(1.0) == 0.5);
  CHECK(bern.mass_at(0.5) == 0.0);
}

TEST_CASE("left-inverse quantile") {
  CHECK(bern.quantile(0.5) == 0.0);
  CHECK(bern.quantile(0.51) == 1.0);
  CHECK(uniform4.quantile(0.25) == 1.0);
  CHECK_THROWS_AS(bern.quantile(0.0), InputError);
  CHECK_THROWS_AS(bern.quantile(1.0), InputError);
}

TEST_CASE("mixtures") {
  CHECK(mix(bern, uniform4, 1.0).eval(0.5) == bern.eval(0.5));
  CHECK(mix(bern, uniform4, 1.0).eval(3.0) == bern.eval(3.0));
  const auto same = mix(uniform4, uniform4, 0.3);
  for (double y : {0.0, 1.0, 2.5, 4.0}) CHECK_THAT(same.eval(y), WithinAbs(uniform4.eval(y), 1e-15));
  const auto m = mix(StepCdf::point_mass(0.0), StepCdf::point_mass(1.0), 0.5);
  CHECK(m.eval(0.0) == 0.5);
  CHECK(m.eval(1.0) == 1.0);
  CHECK(m.support().size() == 2);
}

TEST_CASE("means and truncated means") {
  CHECK(bern.mean() == 0.5);
  CHECK(StepCdf::point_mass(3.0).mean() == 3.0);
  CHECK(uniform4.mean() == 2.5);

  auto t = bern.truncated_means(0.5);
  CHECK(t.lower_mean == 0.0);
  CHECK(t.upper_mean == 1.0);
  CHECK(t.mass_at_or_below == 0.5);
  CHECK(t.cutoff == 0.0);
  CHECK_FALSE(t.upper_empty);

  t = uniform4.truncated_means(0.5);
  CHECK(t.lower_mean == 1.5);
  CHECK(t.upper_mean == 3.5);
  CHECK(t.mass_at_or_below == 0.5);
  CHECK(t.cutoff == 2.0);

  t = StepCdf::point_mass(3.0).truncated_means(0.4);
  CHECK(t.lower_mean == 3.0);
  CHECK(t.upper_mean == 0.0);
  CHECK(t.upper_empty);
  CHECK(t.mass_at_or_below == 1.0);
  CHECK(t.cutoff == 3.0);

  CHECK_THROWS_AS(bern.truncated_means(1.0), InputError);
}

TEST_CASE("partial quantile integral") {
  CHECK_THAT(bern.partial_quantile_integral(0.5), WithinAbs(0.0, 1e-15));
  CHECK_THAT(bern.partial_quantile_integral(0.75), WithinAbs(0.25, 1e-15));
  CHECK_THAT(StepCdf::point_mass(2.5).partial_quantile_integral(0.3), WithinAbs(0.75, 1e-15));
  CHECK_THROWS_AS(bern.partial_quantile_integral(0.0), InputError);
}

TEST_CASE("weighted averages") {
  const StepCdf parts[] = {bern, StepCdf::point_mass(0.0)};
  const double w[] = {0.5, 0.5};
  const auto avg = StepCdf::weighted_average(parts, w);
  CHECK(avg.eval(0.0) == 0.75);
  CHECK(avg.eval(1.0) == 1.0);
  const double bad[] = {0.5, 0.6};
  CHECK_THROWS_AS(StepCdf::weighted_average(parts, bad), InputError);
}

TEST_CASE("snapped evaluation of shifted values") {
  const auto f = StepCdf::from_masses({0.1, 0.3}, {0.5, 0.5});
  const double t = 0.7 - 0.4;  // 0.29999999999999993
  CHECK(f.eval(t) == 0.5);
  CHECK(eval_snapped(f, t) == 1.0);
  CHECK(left_limit_snapped(f, t) == 0.5);
  CHECK(eval_snapped(f, 0.2) == 0.5);
}

TEST_CASE("properties on random step cdfs") {
  sbtest::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto f = sbtest::random_cdf(rng, 8, trial % 2 == 0);
    const auto g = sbtest::random_cdf(rng, 8, trial % 3 == 0);
    const double eps = sbtest::uniform(rng, 0.0, 1.0);

    for (int k = 0; k < 20; ++k) {
      const double tau = sbtest::uniform(rng, 1e-6, 1.0 - 1e-6);
      const double q = f.quantile(tau);
      // Galois property and its consequences.
      CHECK(f.eval(q) >= tau);
      CHECK(f.left_limit(q) <= tau);
      for (double y : f.support()) CHECK((q <= y) == (tau <= f.eval(y)));
      const double y = sbtest::uniform(rng, -6.0, 17.0);
      CHECK((q <= y) == (tau <= f.eval(y)));
    }

    const auto m = mix(f, g, eps);
    for (double y : m.support())
      CHECK_THAT(m.eval(y), WithinAbs(eps * f.eval(y) + (1.0 - eps) * g.eval(y), 1e-15));
    CHECK_THAT(m.mean(), WithinAbs(eps * f.mean() + (1.0 - eps) * g.mean(), 1e-12));

    const double a = sbtest::uniform(rng, 0.01, 0.99);
    const double pqi = f.partial_quantile_integral(a);
    // Direct integration of the step quantile function: Q(u) = y_i on
    // (F(y_{i-1}), F(y_i)].
    double direct = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double top = std::min(f.cum()[i], a);
      if (top > prev) direct += f.support()[i] * (top - prev);
      prev = std::max(prev, f.cum()[i]);
    }
    CHECK_THAT(pqi, WithinAbs(direct, 1e-9));
    CHECK_THAT(pqi + (f.mean() - pqi), WithinAbs(f.mean(), 1e-15));

    const auto tm = f.truncated_means(a);
    CHECK_THAT(tm.lower_mean * tm.mass_at_or_below + tm.upper_mean * (1.0 - tm.mass_at_or_below),
               WithinAbs(f.mean(), 1e-10));
    CHECK(tm.cutoff == f.quantile(a));
  }
}
