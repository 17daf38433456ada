#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "crplab/ocrp.hpp"
#include "crplab/partition.hpp"
#include "crplab/rng.hpp"

using namespace crplab;

namespace {

// Direct evaluation of the covering radius on the point sets.
double naive_hausdorff(const IntervalPartition& a, const IntervalPartition& b) {
  auto ga = a.partition_points();
  auto gb = b.partition_points();
  auto radius = [](const std::vector<double>& from, const std::vector<double>& to) {
    double r = 0.0;
    for (double x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : to) best = std::min(best, std::abs(x - y));
      r = std::max(r, best);
    }
    return r;
  };
  return std::max(radius(ga, gb), radius(gb, ga));
}

IntervalPartition random_partition(Rng& rng) {
  std::uniform_int_distribution<int> k(0, 6);
  std::vector<Block> blocks;
  double x = 0.0;
  for (int i = k(rng); i > 0; --i) {
    double gap = uniform01(rng) < 0.3 ? uniform01(rng) : 0.0;
    double len = 0.05 + uniform01(rng);
    blocks.push_back({x + gap, x + gap + len});
    x += gap + len;
  }
  return IntervalPartition(blocks, x + (uniform01(rng) < 0.3 ? uniform01(rng) : 0.0));
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("hausdorff examples") {
    IntervalPartition a({{0, 1}}, 1), b({{0, 2}}, 2), c({{0, 1}, {1.5, 2}}, 2);
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(1.0));
    // The point 1 is at distance 1 from both 0 and 2.
    CHECK(hausdorff_distance(c, b) == doctest::Approx(1.0));
    CHECK(naive_hausdorff(c, b) == doctest::Approx(1.0));
  }

  TEST_CASE("hausdorff metric properties") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      auto a = random_partition(rng), b = random_partition(rng), c = random_partition(rng);
      double ab = hausdorff_distance(a, b), bc = hausdorff_distance(b, c), ac = hausdorff_distance(a, c);
      CHECK(ab == doctest::Approx(naive_hausdorff(a, b)));
      CHECK(ab == hausdorff_distance(b, a));
      CHECK(ac <= ab + bc + 1e-12);
      double s = 0.1 + 3.0 * uniform01(rng);
      CHECK(hausdorff_distance(scale(s, a), scale(s, b)) == doctest::Approx(s * ab));
      CHECK((ab == 0.0) == (a.partition_points() == b.partition_points()));
    }
  }

  TEST_CASE("scale") {
    IntervalPartition b({{0, 1}, {1, 3}}, 3);
    CHECK(scale(1.0, b) == b);
    CHECK(scale(2.0, IntervalPartition({{0, 1}}, 1)) == IntervalPartition({{0, 2}}, 2));
    CHECK(scale(0.5, b) == IntervalPartition({{0, 0.5}, {0.5, 1.5}}, 1.5));
    CHECK_THROWS_AS(scale(0.0, b), std::invalid_argument);
    CHECK_THROWS_AS(scale(-1.0, b), std::invalid_argument);
  }

  TEST_CASE("concatenate") {
    IntervalPartition a({{0, 1}}, 1), b({{0, 2}}, 2);
    CHECK(concatenate(std::vector<IntervalPartition>{}).empty());
    CHECK(concatenate({a, b}) == IntervalPartition({{0, 1}, {1, 3}}, 3));
    CHECK(concatenate({IntervalPartition{}, b}) == b);
    CHECK(concatenate({b, IntervalPartition{}}) == b);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      auto x = random_partition(rng), y = random_partition(rng), z = random_partition(rng);
      auto l = concatenate({concatenate({x, y}), z});
      auto r = concatenate({x, concatenate({y, z})});
      CHECK(hausdorff_distance(l, r) < 1e-12);
      CHECK(l.total_mass() == doctest::Approx(x.total_mass() + y.total_mass() + z.total_mass()));
    }
  }

  TEST_CASE("reverse") {
    CHECK(reverse(IntervalPartition{}).empty());
    IntervalPartition b({{0, 1}, {1, 3}}, 3);
    CHECK(reverse(b) == IntervalPartition({{0, 2}, {2, 3}}, 3));
    CHECK(reverse(reverse(b)) == b);
    CHECK(reverse(Composition{2, 1, 4}) == Composition{4, 1, 2});
  }

  TEST_CASE("composition embedding") {
    CHECK(composition_to_partition(Composition{2, 1}) == IntervalPartition({{0, 2}, {2, 3}}, 3));
    CHECK(composition_to_partition(Composition{}).empty());
    CHECK(composition_to_partition(Composition{5}) == IntervalPartition({{0, 5}}, 5));
    for (int n = 1; n <= 8; ++n) {
      auto all = compositions_of(n);
      std::vector<std::vector<double>> images;
      for (auto& c : all) {
        auto p = composition_to_partition(c);
        CHECK(p.total_mass() == n);
        images.push_back(p.partition_points());
      }
      std::sort(images.begin(), images.end());
      CHECK(std::adjacent_find(images.begin(), images.end()) == images.end());
    }
  }

  TEST_CASE("ranked masses") {
    IntervalPartition b({{0, 1}, {1, 3}}, 3);
    CHECK(ranked_masses(b, 2) == std::vector<double>{2, 1});
    CHECK(ranked_masses(IntervalPartition{}, 3) == std::vector<double>{0, 0, 0});
    CHECK(ranked_masses(IntervalPartition({{0, 2}, {2, 4}}, 4), 1) == std::vector<double>{2});
    CHECK_THROWS(ranked_masses(b, 0));
  }

  TEST_CASE("validation") {
    CHECK_THROWS(IntervalPartition({{0, 1}, {0.5, 2}}, 2));
    CHECK_THROWS(IntervalPartition({{1, 1}}, 2));
    CHECK_THROWS(IntervalPartition({{0, 3}}, 2));
    CHECK_THROWS(Composition({1, 0}));
    CHECK(Composition{}.n() == 0);
  }

  TEST_CASE("refinement") {
    CHECK(refines(Composition{1, 1, 2}, Composition{2, 2}));
    CHECK_FALSE(refines(Composition{1, 2, 1}, Composition{2, 2}));
  }

  TEST_CASE("json round trip") {
    IntervalPartition b({{0, 1}, {1.5, 3}}, 4);
    nlohmann::json j = b;
    CHECK(j.get<IntervalPartition>() == b);
    IntervalPartition c({{0, 1}, {1, 3}}, 3);
    nlohmann::json jc = c;
    CHECK(jc.dump() == "[[0.0,1.0],[1.0,3.0]]");
    CHECK(jc.get<IntervalPartition>() == c);
    nlohmann::json k = Composition{3, 1};
    CHECK(k.dump() == "[3,1]");
    CHECK(k.get<Composition>() == Composition{3, 1});
    CHECK(Composition::parse("3|1") == Composition{3, 1});
    CHECK(Composition::parse("").empty());
    CHECK(Composition{3, 1}.to_string() == "3|1");
  }
}
