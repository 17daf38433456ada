#include <doctest.h>

#include <cmath>

#include "crplab/nested.hpp"
#include "crplab/pcrp.hpp"
#include "helpers.hpp"

using namespace crplab;
using testing_helpers::Tally;
using testing_helpers::compare_tallies;
using testing_helpers::gof_against_law;

namespace {

const CrpParams kCoarse{0.25, 0.3, 0.25};
const CrpParams kFine{0.5, 0.0, 0.25};

}  // namespace

TEST_SUITE("nested") {
  TEST_CASE("frag basics") {
    Rng rng(1);
    IntervalPartition b({{0, 0.3}, {0.3, 0.5}, {0.6, 1.0}}, 1.0);
    CHECK(frag(b, {0.5, 0.0, 0.0}, 1000, rng) == b);
    for (int i = 0; i < 200; ++i) {
      auto f = frag(b, {0.5, 0.3, 0.7}, 1000, rng);
      CHECK(f.total_mass() == b.total_mass());
      CHECK(NestedPartitions{b, f}.valid());
      double covered = 0.0;
      for (double l : f.lengths()) covered += l;
      CHECK(covered == doctest::Approx(0.9));
    }
    auto g = structural_pdip(kCoarse, 2000, rng);
    auto h = frag(g, kFine, 2000, rng);
    CHECK(NestedPartitions{g, h}.valid());
    CHECK(frag(IntervalPartition{}, kFine, 100, rng).empty());
  }

  TEST_CASE("nested pairs validity") {
    CHECK(NestedCompositions{Composition{3, 2}, Composition{1, 2, 2}}.valid());
    CHECK_FALSE(NestedCompositions{Composition{3, 2}, Composition{2, 2, 1}}.valid());
    CHECK_FALSE(NestedCompositions{Composition{3}, Composition{1, 1}}.valid());
    CHECK_FALSE(NestedPartitions{IntervalPartition({{0, 0.5}, {0.5, 1}}, 1), IntervalPartition({{0, 1}}, 1)}.valid());
  }

  TEST_CASE("nested oCRP marginals") {
    Rng rng(2);
    const CrpParams target{kFine.alpha, kFine.theta1 + kCoarse.theta1, kFine.theta2 + kCoarse.theta2};
    for (int n = 2; n <= 5; ++n) {
      std::map<Composition, double> fine, coarse;
      for (int i = 0; i < 100000; ++i) {
        auto pr = nested_ocrp(n, kCoarse, kFine, rng);
        CHECK(pr.valid());
        fine[pr.fine] += 1;
        coarse[pr.coarse] += 1;
      }
      CAPTURE(n);
      CHECK(gof_against_law(fine, exact_law(n, target)).p_value > 0.01);
      CHECK(gof_against_law(coarse, exact_law(n, kCoarse)).p_value > 0.01);
    }
    CHECK_THROWS(nested_ocrp(5, kCoarse, {0.5, 0.1, 0.25}, rng));
  }

  TEST_CASE("nested pcrp paths") {
    Rng rng(3);
    NestedPcrpParams p{0.25, 0.3, kFine};
    auto path = nested_pcrp({Composition{3, 1}, Composition{2, 1, 1}}, p, 5.0, rng);
    for (auto& e : path.events) {
      CHECK(e.state.valid());
      CHECK(e.state.coarse.n() == e.state.fine.n());
    }
    CHECK_THROWS(nested_pcrp({Composition{3}, Composition{3}}, {0.25, 0.3, {0.5, 0.1, 0.25}}, 1.0, rng));
    CHECK_THROWS(nested_pcrp({Composition{3}, Composition{2, 2}}, p, 1.0, rng));
  }

  TEST_CASE("nested pcrp marginals") {
    Rng rng(4);
    NestedPcrpParams p{0.25, 0.3, kFine};
    const CrpParams fine_target{kFine.alpha, kFine.theta1 + p.theta_bar, kFine.theta2 + p.alpha_bar};
    Tally fa{6, {}}, fb{6, {}}, ca{6, {}}, cb{6, {}};
    for (int i = 0; i < 100000; ++i) {
      auto pr = nested_pcrp_state_at({Composition{3}, Composition{2, 1}}, p, 0.5, rng);
      fa.add(pr.fine);
      ca.add(pr.coarse);
      fb.add(pcrp_state_at(Composition{2, 1}, fine_target, 0.5, rng));
      cb.add(pcrp_state_at(Composition{3}, p.coarse(), 0.5, rng));
    }
    CHECK(compare_tallies(fa, fb).p_value > 0.01);
    CHECK(compare_tallies(ca, cb).p_value > 0.01);
  }

  TEST_CASE("fragmentation identity") {
    auto r = check_fragmentation_identity(kCoarse, kFine, 3000, 3000, 11);
    REQUIRE(r.size() == 2);
    for (auto& x : r) CHECK(x.p_value > 0.01);
    // Degenerate fragmentation: theta1 = theta2 = 0 forces alpha_bar = alpha.
    auto d = check_fragmentation_identity({0.5, 0.3, 0.25}, {0.5, 0.0, 0.0}, 2000, 2000, 12);
    for (auto& x : d) CHECK(x.p_value > 0.01);
    CHECK_THROWS(check_fragmentation_identity(kCoarse, {0.5, 0.1, 0.25}, 10, 10, 1));
  }

  TEST_CASE("nested oCRP limit matches frag of pdip") {
    auto r = check_nested_limit(kCoarse, kFine, 3000, 3000, 13);
    REQUIRE(r.size() == 3);
    for (auto& x : r) CHECK(x.p_value > 0.01);
  }
}
