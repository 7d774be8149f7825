#include "choquet/capacity.hpp"
#include "choquet/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace choquet;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

Region rect(Rational x0, Rational x1, Rational y0, Rational y1) {
  std::vector<Rect> r{{x0, x1, y0, y1}};
  return Region(RectUnion::from_rects(r));
}

Region atoms(int n, std::initializer_list<int> m) {
  std::vector<int> v(m);
  return Region(AtomSet::from_members(n, v));
}

Capacity sample_table() { return Capacity::explicit_table(2, {0, q(7, 10), q(7, 10), 1}); }

}  // namespace

TEST_CASE("evaluation") {
  Capacity ps = Capacity::product_section();
  CHECK(ps(rect(0, q(1, 4), 0, 1)) == doctest::Approx(0.5));
  CHECK(ps(Region::empty(Universe::square())) == 0.0);
  Capacity mu = sample_table();
  CHECK(mu(atoms(2, {0})) == doctest::Approx(0.7));
  CHECK(*mu.exact(atoms(2, {0})) == q(7, 10));
  CHECK_THROWS_AS(mu(rect(0, 1, 0, 1)), Error);
}

TEST_CASE("explicit tables are validated") {
  CHECK_THROWS_AS(Capacity::explicit_table(2, {0, 1, 1}), Error);
  CHECK_THROWS_AS(Capacity::explicit_table(2, {q(1, 10), 1, 1, 1}), Error);
  CHECK_THROWS_AS(Capacity::explicit_table(2, {0, q(8, 10), q(1, 10), q(7, 10)}), Error);
}

TEST_CASE("conjugate") {
  Capacity mu = sample_table();
  Capacity bar = mu.conjugate();
  CHECK(*bar.exact(atoms(2, {0})) == q(3, 10));
  CHECK(bar.total_mass() == mu.total_mass());
  Capacity add = Capacity::additive({q(1, 3), q(1, 6), q(1, 2)});
  for (std::uint64_t m = 0; m < 8; ++m) {
    Region r(AtomSet(3, m));
    CHECK(*add.conjugate().exact(r) == *add.exact(r));
  }
  // Involution, sampled on the square.
  Capacity ps = Capacity::product_section();
  Capacity twice = Capacity::partitioned({Region::full(Universe::square())}, {ps.conjugate()}).conjugate();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    Region r = random_region(rng, Universe::square());
    CHECK(ps.conjugate().conjugate()(r) == doctest::Approx(ps(r)).epsilon(1e-12));
    CHECK(twice(r) == doctest::Approx(ps(r)).epsilon(1e-12));
  }
}

TEST_CASE("property checks on explicit tables") {
  Capacity mu = sample_table();
  Verdict v = check_property(mu, Property::submodular);
  CHECK(v.passed());
  CHECK(check_property(mu, Property::monotone).passed());
  CHECK(check_property(mu, Property::subadditive).passed());

  Capacity super = Capacity::explicit_table(2, {0, q(1, 5), q(1, 5), 1});
  Verdict s = check_property(super, Property::subadditive);
  REQUIRE(s.status == Status::fail);
  REQUIRE(s.witness.size() == 2);
  // Witness is the pair of singletons, in either order.
  CHECK((s.witness[0].second | s.witness[1].second) == Region::full(Universe::finite(2)));
  CHECK((s.witness[0].second & s.witness[1].second).empty());
  CHECK(check_property(super, Property::submodular).status == Status::fail);
}

TEST_CASE("zero sets") {
  // Atom 2 is null, atoms 0 and 1 are not.
  Capacity mu = Capacity::additive({q(1, 2), q(1, 2), 0});
  CHECK(check_property(mu, Property::zero_sets_union_stable).passed());
  // Two zero singletons whose union is positive.
  Capacity bad = Capacity::explicit_table(2, {0, 0, 0, 1});
  CHECK(check_property(bad, Property::zero_sets_union_stable).status == Status::fail);
  CHECK(check_property(Capacity::product_section(), Property::zero_sets_union_stable).passed());
}

TEST_CASE("null sets") {
  Capacity mu = sample_table();
  CHECK(is_null_set(mu, Region::empty(Universe::finite(2))).passed());
  Verdict v = is_null_set(mu, atoms(2, {0}));
  CHECK(v.status == Status::fail);
  CHECK(is_null_set(Capacity::product_section(), Region(RectUnion{})).passed());
  // Subadditive capacity: every zero-capacity set is null.
  Capacity add = Capacity::additive({q(1, 2), q(1, 2), 0});
  CHECK(is_null_set(add, atoms(3, {2})).passed());
}

TEST_CASE("product section capacity is submodular on sampled pairs") {
  Capacity ps = Capacity::product_section();
  CheckOptions opts;
  opts.samples = 1000;
  Verdict v = check_property(ps, Property::submodular, opts);
  CHECK(v.passed());
  CHECK(v.seed == opts.seed);
  CHECK(check_property(ps, Property::monotone, opts).passed());
  Region a = rect(0, q(1, 2), 0, 1), b = rect(q(1, 4), q(3, 4), 0, 1);
  double lhs = ps(a | b) + ps(a & b), rhs = ps(a) + ps(b);
  CHECK(lhs == doctest::Approx(std::sqrt(0.75) + 0.5).epsilon(1e-14));
  CHECK(rhs == doctest::Approx(2 * std::sqrt(0.5)).epsilon(1e-14));
  CHECK(lhs <= rhs);
}

TEST_CASE("chains are monotone") {
  std::mt19937_64 rng(5);
  Capacity ps = Capacity::product_section();
  for (int k = 0; k < 100; ++k) {
    Region a = random_region(rng, Universe::square());
    Region b = a | random_region(rng, Universe::square());
    Region c = b | random_region(rng, Universe::square());
    CHECK(ps(a) <= ps(b));
    CHECK(ps(b) <= ps(c));
  }
}

TEST_CASE("split") {
  Capacity ps = Capacity::product_section();
  Region a = rect(0, q(1, 4), 0, 1);
  Region half = split(ps, a, 0.5);
  CHECK(half == rect(0, q(1, 4), 0, q(1, 2)));
  CHECK(ps(half) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(split(ps, a, 0.0).empty());
  CHECK(split(ps, a, 1.0) == a);
  Region third = split(ps, Region::full(Universe::square()), 1.0 / 3.0);
  CHECK(std::abs(ps(third) - 1.0 / 3.0) <= split_tolerance);
  CHECK_THROWS_AS(split(sample_table(), atoms(2, {0}), 0.5), Error);
  CHECK_THROWS_AS(split(ps, a, 1.5), Error);
}

TEST_CASE("split family is nested and additive") {
  Capacity ps = Capacity::product_section();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Region a = random_region(rng, Universe::square());
    double t1 = unit(rng), t2 = unit(rng);
    if (t1 > t2) std::swap(t1, t2);
    Region at1 = split(ps, a, t1), at2 = split(ps, a, t2);
    CHECK(is_subset(at1, at2));
    CHECK(std::abs(ps(at2 - at1) - (t2 - t1) * ps(a)) <= 2 * split_tolerance);
    CHECK(std::abs(ps(a - at1) - (1 - t1) * ps(a)) <= split_tolerance);
  }
}

TEST_CASE("nested split") {
  Capacity ps = Capacity::product_section();
  Region a = rect(0, q(1, 4), 0, 1);
  Region b = Region::full(Universe::square());
  Region at = split(ps, a, 0.5);
  Region bt = nested_split(ps, a, b, 0.5, at);
  CHECK((bt & a) == at);
  CHECK(std::abs(ps(bt) - 0.5 * ps(b)) <= split_tolerance);
  CHECK(nested_split(ps, a, a, 0.5, at) == at);
  CHECK(nested_split(ps, a, b, 1.0, split(ps, a, 1.0)) == b);
  CHECK_THROWS_AS(nested_split(ps, b, a, 0.5, at), Error);
}

TEST_CASE("partitioned capacity is additive across blocks") {
  std::vector<Region> blocks{rect(0, q(1, 3), 0, 1), rect(q(1, 3), q(2, 3), 0, 1), rect(q(2, 3), 1, 0, 1)};
  std::vector<Capacity> parts{Capacity::product_section(), Capacity::product_section(ConcaveFunction::power(0.3), 2.0),
                              Capacity::product_section(ConcaveFunction::linear(1.0))};
  Capacity mu = Capacity::partitioned(blocks, parts);
  CHECK(mu.semiconvex_constructive());
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    Region a = random_region(rng, Universe::square());
    double acc = 0.0;
    Region prefix = Region::empty(Universe::square());
    for (const auto& blk : blocks) {
      acc += mu(a & blk);
      prefix = prefix | blk;
      CHECK(mu(a & prefix) == doctest::Approx(acc).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(Capacity::partitioned({blocks[0], blocks[0]}, {parts[0], parts[0]}), Error);
  CHECK_THROWS_AS(Capacity::partitioned({blocks[0]}, {parts[0]}), Error);
}

TEST_CASE("pseudometric") {
  Capacity mu = sample_table();
  Region e = atoms(2, {0}), f = atoms(2, {1});
  CHECK(pseudometric(mu, e, e) == 0.0);
  CHECK(pseudometric(mu, e, f) == doctest::Approx(1.0));
  CHECK(pseudometric(mu, e, f) >= std::abs(mu(e) - mu(f)));
}

TEST_CASE("half-subset probe on finite capacities") {
  Capacity add = Capacity::additive({q(1, 4), q(1, 4), q(1, 2)});
  CHECK(find_half_subset(add, Region::full(Universe::finite(3)), 1e-12).has_value());
  CHECK_FALSE(find_half_subset(sample_table(), Region::full(Universe::finite(2)), 1e-3).has_value());
}
