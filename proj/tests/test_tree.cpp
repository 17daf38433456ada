#include <doctest.h>

#include <map>

#include "crplab/ocrp.hpp"
#include "crplab/tree.hpp"
#include "crplab/updown.hpp"
#include "helpers.hpp"

using namespace crplab;
using testing_helpers::Tally;
using testing_helpers::compare_tallies;
using testing_helpers::gof_against_law;

namespace {

int max_degree(const LabeledTree& t) {
  int d = 0;
  for (std::size_t i = 1; i < t.nodes().size(); ++i)
    d = std::max(d, int(t.nodes()[i].children.size()) + 1);
  return d;
}

}  // namespace

TEST_SUITE("tree") {
  TEST_CASE("two leaves") {
    Rng rng(1);
    auto t = grow_tree(LabeledTree::single_leaf(), 0.5, 0.2, rng);
    t.validate();
    CHECK(t.leaf_count() == 2);
    auto [c, f] = spinal_decomposition(t);
    CHECK(c == Composition{1});
    CHECK(f == Composition{1});
    CHECK_THROWS(spinal_decomposition(LabeledTree::single_leaf()));
  }

  TEST_CASE("weights") {
    Rng rng(2);
    for (double a : {0.3, 0.5, 0.8})
      for (double g : {0.0, a / 2, a}) {
        auto t = LabeledTree::single_leaf();
        for (int k = 1; k < 25; ++k) {
          double total = 0.0;
          auto sites = t.growth_sites(a, g);
          for (auto& s : sites) {
            CHECK(s.weight >= -1e-12);
            total += s.weight;
            if (s.kind == LabeledTree::Site::Vertex) {
              double d = double(t.nodes()[s.node].children.size()) + 1;
              CHECK(s.weight == doctest::Approx((d - 2) * a - g));
            }
          }
          CHECK(total == doctest::Approx(k - a));
          t = grow_tree(t, a, g, rng);
          t.validate();
        }
      }
    CHECK_THROWS(grow_tree(LabeledTree::single_leaf(), 0.5, 0.6, rng));
  }

  TEST_CASE("alpha = gamma = 1/2 stays binary") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      auto t = grow_tree_to(30, 0.5, 0.5, rng);
      CHECK(max_degree(t) == 3);
      CHECK(t.nodes().size() == std::size_t(2 * 30));
    }
  }

  TEST_CASE("insert then delete") {
    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
      auto t = grow_tree_to(2 + i % 10, 0.6, 0.3, rng);
      auto u = grow_tree(t, 0.6, 0.3, rng);
      u.delete_leaf(u.leaf_count());
      u.validate();
      CHECK(u.to_json() == t.to_json());
    }
    auto t = grow_tree_to(4, 0.6, 0.3, rng);
    CHECK_THROWS(t.delete_leaf(1));
  }

  TEST_CASE("relabelling on deletion") {
    Rng rng(5);
    auto t = grow_tree_to(6, 0.6, 0.3, rng);
    auto u = t;
    u.delete_leaf(3);
    u.validate();
    CHECK(u.leaf_count() == 5);
    CHECK(u.nodes()[u.node_of_label(3)].parent >= 0);
    CHECK_THROWS(u.node_of_label(6));
  }

  TEST_CASE("up-down chain keeps invariants") {
    Rng rng(6);
    for (double g : {0.0, 0.25, 0.5}) {
      auto t = grow_tree_to(3, 0.5, g, rng);
      for (int s = 0; s < 3000; ++s) {
        auto st = tree_updown_step(t, 0.5, g, rng);
        st.tree.validate();
        CHECK(st.holding_time > 0.0);
        CHECK(st.tree.leaf_count() == t.leaf_count() + (st.inserted ? 1 : -1));
        CHECK(st.tree.nodes()[st.tree.node_of_label(1)].label == 1);
        t = std::move(st.tree);
      }
    }
  }

  TEST_CASE("leaf count is a shifted up-down chain") {
    Rng rng(7);
    const double a = 0.5, g = 0.4, horizon = 0.7;
    Tally x{12, {}}, y{12, {}};
    for (int i = 0; i < 20000; ++i) {
      auto t = grow_tree_to(3, a, g, rng);
      double time = 0.0;
      for (;;) {
        auto st = tree_updown_step(t, a, g, rng);
        time += st.holding_time;
        if (time > horizon) break;
        t = std::move(st.tree);
      }
      x.add(t.leaf_count() > 1 ? Composition{t.leaf_count() - 1} : Composition{});
      int m = updown_marginal_sample(2, 1.0 - a, horizon, rng);
      y.add(m > 0 ? Composition{m} : Composition{});
    }
    CHECK(compare_tallies(x, y).p_value > 0.01);
  }

  TEST_CASE("spinal laws") {
    Rng rng(8);
    for (auto [a, g] : {std::pair{0.5, 0.4}, std::pair{0.7, 0.2}, std::pair{0.4, 0.0}}) {
      for (int n = 3; n <= 5; ++n) {
        std::map<Composition, double> c, f;
        for (int i = 0; i < 40000; ++i) {
          auto [cc, ff] = spinal_decomposition(grow_tree_to(n, a, g, rng));
          CHECK(refines(ff, cc));
          c[cc] += 1;
          f[ff] += 1;
        }
        CAPTURE(a);
        CAPTURE(g);
        CAPTURE(n);
        CHECK(gof_against_law(c, exact_law(n - 1, {g, 1 - a, g})).p_value > 0.01);
        CHECK(gof_against_law(f, exact_law(n - 1, {a, 1 - a, a})).p_value > 0.01);
      }
    }
  }

  TEST_CASE("json") {
    auto t = LabeledTree::single_leaf();
    CHECK(t.to_json().dump() == R"({"children":[{"label":1}],"label":0})");
  }
}
