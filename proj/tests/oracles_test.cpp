#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "lmq/oracles.hpp"
#include "lmq/rng.hpp"

using namespace lmq;

namespace {
Example ex(std::initializer_list<int> coords) { return Example(std::vector<int>(coords)); }
}  // namespace

TEST_CASE("draw_sample basics") {
  DnfFormula f(2, {Term::of({{1, false}})});
  auto target = [&](const Example& x) { return eval_dnf(f, x); };

  Rng rng(41);
  ExplicitDistribution point = ExplicitDistribution::point_mass(ex({1, -1}));
  LabeledSample empty = draw_sample(point, target, 0, rng);
  REQUIRE(empty.empty());

  LabeledSample copies = draw_sample(point, target, 5, rng);
  REQUIRE(copies.size() == 5);
  for (const auto& [x, y] : copies) {
    REQUIRE(x == ex({1, -1}));
    REQUIRE(y == 1);
  }

  ExplicitDistribution uniform = ExplicitDistribution::uniform_cube(2);
  Rng a(99), b(99);
  LabeledSample s1 = draw_sample(uniform, target, 50, a);
  LabeledSample s2 = draw_sample(uniform, target, 50, b);
  REQUIRE(s1.pairs() == s2.pairs());
}

TEST_CASE("labeled sample validation") {
  auto target = [](const Example& x) { return x.coordinate(1) == 1 ? 1 : 0; };
  std::vector<std::pair<Example, Label>> good{{ex({1, 1}), 1}, {ex({-1, 1}), 0}};
  REQUIRE_NOTHROW(LabeledSample(2, good, target));

  std::vector<std::pair<Example, Label>> bad{{ex({1, 1}), 0}};
  REQUIRE_THROWS_AS(LabeledSample(2, bad, target), consistency_error);

  REQUIRE_THROWS_AS(LabeledSample(2, {{ex({1, 1, 1}), 1}}), std::invalid_argument);
  REQUIRE_THROWS_AS(LabeledSample(2, {{ex({1, 1}), 2}}), std::invalid_argument);

  LabeledSample s(3, {{ex({1, 1, 1}), 1}, {ex({-1, 1, 1}), 0}, {ex({1, -1, 1}), 1}});
  REQUIRE(s.positive_count() == 2);
  REQUIRE(s.examples().size() == 3);
}

TEST_CASE("oracle answers 1-local queries and meters them") {
  auto target = [](const Example& x) { return x.coordinate(1) == 1 ? 1 : 0; };
  Example s = ex({1, 1, 1});
  LocalMembershipOracle oracle(3, target, {s}, 1);

  REQUIRE(oracle.meter() == 0);
  REQUIRE(oracle.query(flip(s, 1)) == 0);  // distance exactly 1
  REQUIRE(oracle.query(flip(s, 3)) == 1);
  REQUIRE(oracle.query(s) == 1);  // distance 0
  REQUIRE(oracle.meter() == 3);
}

TEST_CASE("oracle rejects non-local queries without metering") {
  auto target = [](const Example&) { return 1; };
  Example s = ex({1, 1, 1, 1});
  LocalMembershipOracle oracle(4, target, {s}, 1);

  Example far = flip(flip(s, 1), 2);
  try {
    oracle.query(far);
    FAIL("expected non_local_query_error");
  } catch (const non_local_query_error& e) {
    REQUIRE(e.distance() == 2);
    REQUIRE(e.radius() == 1);
  }
  REQUIRE(oracle.meter() == 0);

  REQUIRE_THROWS_AS(oracle.query(ex({1, 1})), std::invalid_argument);
  REQUIRE(oracle.meter() == 0);
}

TEST_CASE("radius boundaries") {
  auto target = [](const Example&) { return 0; };
  Example s = ex({1, 1, 1});

  LocalMembershipOracle strict(3, target, {s}, 0);
  REQUIRE_NOTHROW(strict.query(s));  // q = 0 answers only reference points
  REQUIRE_THROWS_AS(strict.query(flip(s, 1)), non_local_query_error);

  LocalMembershipOracle open(3, target, {s}, 3);  // q = n accepts everything
  for (const Example& x : enumerate_cube(3)) REQUIRE_NOTHROW(open.query(x));
  REQUIRE(open.meter() == 8);
}

TEST_CASE("extend_reference grows the local region") {
  auto target = [](const Example&) { return 0; };
  Example s = ex({1, 1, 1, 1});
  LocalMembershipOracle oracle(4, target, {s}, 1);

  Example far = flip(flip(s, 1), 2);
  REQUIRE_THROWS_AS(oracle.query(far), non_local_query_error);
  REQUIRE(oracle.reference_size() == 1);

  std::vector<Example> more{flip(s, 1)};
  oracle.extend_reference(more);
  REQUIRE(oracle.reference_size() == 2);
  REQUIRE_NOTHROW(oracle.query(far));  // now at distance 1 from the new point
  REQUIRE(oracle.meter() == 1);
}
