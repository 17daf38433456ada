#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crplab/ocrp.hpp"
#include "crplab/pcrp.hpp"
#include "crplab/stats.hpp"
#include "helpers.hpp"

using namespace crplab;
using testing_helpers::gof_against_law;

namespace {

// Law after j further seatings from c, by iterating the one-step law.
Law seat_iterate(const Composition& c, const CrpParams& p, int j) {
  Law cur{{c, 1.0}};
  for (int s = 0; s < j; ++s) {
    Law next;
    for (auto& [x, w] : cur)
      for (auto& [y, v] : seat_distribution(x, p)) next[y] += w * v;
    cur = std::move(next);
  }
  return cur;
}

bool is_one_move(const Composition& a, const Composition& b, const CrpParams& p) {
  if (a.empty()) return b == Composition{1};
  if (b.n() == a.n() + 1) return seat_distribution(a, p).count(b) > 0;
  if (b.n() == a.n() - 1) return down_distribution(a).count(b) > 0;
  return false;
}

}  // namespace

TEST_SUITE("pcrp") {
  TEST_CASE("total rate is 2n + theta along paths") {
    Rng rng(1);
    for (auto p : testing_helpers::parameter_grid()) {
      PcrpState s(Composition{2, 1}, p, false);
      for (int i = 0; i < 300; ++i) {
        if (s.mass() > 0) CHECK(s.total_rate() == doctest::Approx(2.0 * s.mass() + p.theta()).epsilon(1e-14));
        if (!s.step(rng)) break;
      }
    }
  }

  TEST_CASE("path invariants") {
    Rng rng(2);
    for (auto p : testing_helpers::parameter_grid()) {
      for (bool killed : {false, true}) {
        auto path = simulate_pcrp(Composition{1, 2}, p, 20.0, killed, rng);
        Composition prev = path.initial;
        double t = 0.0;
        for (auto& e : path.events) {
          CHECK(e.time > t);
          CHECK(is_one_move(prev, e.state, p));
          prev = e.state;
          t = e.time;
        }
        if (killed && path.extinction_time()) CHECK(path.events.back().state.empty());
      }
    }
  }

  TEST_CASE("empty start") {
    Rng rng(3);
    auto a = simulate_pcrp(Composition{}, {0.5, 0.0, 0.3}, 5.0, false, rng);
    CHECK(a.events.empty());
    auto b = simulate_pcrp(Composition{}, {0.5, 0.2, 0.3}, 5.0, false, rng);
    CHECK(b.events.empty());
    auto c = simulate_pcrp(Composition{}, {0.5, 1.0, 0.3}, 50.0, false, rng);
    REQUIRE_FALSE(c.events.empty());
    CHECK(c.events.front().state == Composition{1});
    std::ostringstream os;
    a.write_csv(os);
    CHECK(os.str() == "time,composition\n0,\n");
  }

  TEST_CASE("up-jump law equals the seating rule") {
    Rng rng(4);
    CrpParams p{0.5, 0.3, 0.7};
    Composition c{2, 1, 3};
    std::map<Composition, double> counts;
    int ups = 0;
    while (ups < 100000) {
      PcrpState s(c, p, false);
      s.step(rng);
      if (s.mass() == c.n() + 1) {
        counts[s.composition()] += 1;
        ++ups;
      }
    }
    auto law = seat_distribution(c, p);
    std::vector<double> obs, probs;
    for (auto& [k, v] : law) {
      obs.push_back(counts[k]);
      probs.push_back(v);
    }
    CHECK(counts.size() == law.size());
    CHECK(chi_square_gof(obs, probs).p_value > 0.01);
  }

  TEST_CASE("mass process is the up-down chain") {
    Rng rng(5);
    CrpParams p{0.5, 0.3, 0.7};
    std::vector<double> a, b;
    for (int i = 0; i < 10000; ++i) {
      a.push_back(pcrp_state_at(Composition{2, 1}, p, 1.0, rng).n());
      b.push_back(updown_state_at(3, p.theta(), 1.0, rng));
    }
    CHECK(ks_two_sample(a, b).p_value > 0.01);
  }

  TEST_CASE("pseudo-stationarity of the oCRP laws") {
    Rng rng(6);
    CrpParams p{0.5, 0.3, 0.7};
    auto start = exact_law(4, p);
    std::map<int, std::map<Composition, double>> by_mass;
    for (int i = 0; i < 100000; ++i) {
      auto c = pcrp_state_at(sample_from_law(start, rng), p, 0.5, rng);
      if (c.n() >= 1 && c.n() <= 6) by_mass[c.n()][c] += 1;
    }
    std::vector<TestReport> parts;
    for (auto& [m, counts] : by_mass) {
      if (m == 1) continue;  // a single composition
      parts.push_back(gof_against_law(counts, exact_law(m, p)));
    }
    CHECK(combine_chi_square(parts).p_value > 0.01);
  }

  TEST_CASE("embedded construction") {
    Rng rng(7);
    CrpParams p{0.5, 0.3, 0.7};
    auto z = simulate_updown(3, p.theta(), 10.0, rng);
    auto path = simulate_pcrp_embedded(z, p, Composition{1, 2}, rng);
    REQUIRE(path.events.size() == z.events.size());
    for (std::size_t i = 0; i < z.events.size(); ++i) {
      CHECK(path.events[i].state.n() == z.events[i].state);
      CHECK(path.events[i].time == z.events[i].time);
    }
    CHECK_THROWS(simulate_pcrp_embedded(z, p, Composition{1}, rng));
  }

  TEST_CASE("embedding without down-jumps continues the oCRP") {
    Rng rng(8);
    CrpParams p{0.5, 0.3, 0.7};
    std::map<Composition, double> counts;
    int kept = 0;
    while (kept < 40000) {
      auto z = simulate_updown(2, p.theta(), 0.4, rng);
      if (z.final_state() != 4) continue;
      bool monotone = true;
      int last = 2;
      for (auto& e : z.events) {
        monotone = monotone && e.state > last;
        last = e.state;
      }
      if (!monotone) continue;
      counts[simulate_pcrp_embedded(z, p, Composition{2}, rng).final_state()] += 1;
      ++kept;
    }
    ExactLaw law{4, seat_iterate(Composition{2}, p, 2)};
    CHECK(gof_against_law(counts, law).p_value > 0.01);
  }

  TEST_CASE("embedding and direct engine agree at a fixed time") {
    Rng rng(9);
    CrpParams p{0.25, 1.0, 0.3};
    testing_helpers::Tally a{5, {}}, b{5, {}};
    for (int i = 0; i < 40000; ++i) {
      a.add(pcrp_state_at(Composition{1, 1}, p, 0.7, rng));
      auto z = simulate_updown(2, p.theta(), 0.7, rng);
      b.add(simulate_pcrp_embedded(z, p, Composition{1, 1}, rng).final_state());
    }
    CHECK(testing_helpers::compare_tallies(a, b).p_value > 0.01);
  }

  TEST_CASE("alpha zero only opens tables at the ends") {
    Rng rng(10);
    CrpParams p{0.0, 0.6, 0.9};
    auto path = simulate_pcrp(Composition{3, 2}, p, 30.0, false, rng);
    Composition prev = path.initial;
    for (auto& e : path.events) {
      if (e.state.n() == prev.n() + 1 && e.state.size() == prev.size() + 1) {
        bool left = std::equal(prev.parts().begin(), prev.parts().end(), e.state.parts().begin() + 1);
        bool right = std::equal(prev.parts().begin(), prev.parts().end(), e.state.parts().begin());
        CHECK((left || right));
      }
      prev = e.state;
    }
  }

  TEST_CASE("excursions") {
    Rng rng(11);
    for (auto p : {CrpParams{0.5, 0.3, 0.7}, CrpParams{0.5, 0.0, 0.0}, CrpParams{0.25, 0.0, 0.3}}) {
      for (int i = 0; i < 200; ++i) {
        // Heavy-tailed lifetimes; long excursions are censored.
        auto e = sample_excursion(p, rng, 1000.0);
        auto zeta = e.extinction_time();
        for (std::size_t j = 0; j + 1 < e.events.size(); ++j) CHECK(e.events[j].state.n() > 0);
        auto m = e.mass_path();
        CHECK(m.initial_state == 1);
        if (zeta) {
          CHECK(*zeta > 0.0);
          CHECK(m.final_state() == 0);
        }
      }
    }
  }

  TEST_CASE("rescaling") {
    Rng rng(12);
    CrpParams p{0.5, 0.3, 0.7};
    auto path = simulate_pcrp(Composition{3, 1}, p, 10.0, false, rng);
    auto r1 = rescale_pcrp(path, 1);
    for (double t : {0.1, 0.7, 2.2, 4.9}) CHECK(r1.state_at(t) == composition_to_partition(path.state_at(2 * t)));
    const int n = 4;
    auto r = rescale_pcrp(path, n);
    auto masses = rescale_chain(path.mass_path(), n);
    for (double t : {0.0, 0.3, 0.9}) CHECK(r.state_at(t).total_mass() == doctest::Approx(masses.value_at(t)));
    IntervalPartition prev = r.initial;
    for (auto& e : r.events) {
      CHECK(hausdorff_distance(prev, e.state) <= 1.0 / n + 1e-12);
      prev = e.state;
    }
  }

  TEST_CASE("de-Poissonisation") {
    IpPath unit{IntervalPartition({{0, 1}}, 1), 3.0, {{1.0, IntervalPartition({{0, 0.5}, {0.5, 1}}, 1)}}};
    auto u = depoissonise(unit);
    CHECK(u.horizon == doctest::Approx(3.0));
    CHECK(u.events.front().time == doctest::Approx(1.0));
    IpPath two{IntervalPartition({{0, 2}}, 2), 3.0, {{1.0, IntervalPartition({{0, 1}, {1, 2}}, 2)}}};
    auto v = depoissonise(two);
    CHECK(v.horizon == doctest::Approx(1.5));
    CHECK(v.events.front().time == doctest::Approx(0.5));
    CHECK(v.state_at(1.0).total_mass() == doctest::Approx(1.0));
    CHECK(v.initial.total_mass() == doctest::Approx(1.0));
    CHECK_THROWS(depoissonise(two, 2.0));
    IpPath dies{IntervalPartition({{0, 1}}, 1), 5.0, {{2.0, IntervalPartition{}}}};
    CHECK(depoissonise(dies).horizon == doctest::Approx(2.0));
    CHECK_THROWS(depoissonise(dies, 2.5));
    Rng rng(13);
    auto path = rescale_pcrp(simulate_pcrp(Composition{5, 3}, {0.5, 0.3, 0.7}, 5.0, false, rng), 8);
    for (auto& e : depoissonise(path).events) CHECK(e.state.total_mass() == doctest::Approx(1.0));
  }

  TEST_CASE("budget guard") {
    Rng rng(14);
    CHECK_THROWS_AS(simulate_pcrp(Composition{5}, {0.5, 0.3, 0.7}, 1e6, false, rng, 100), BudgetExceeded);
  }
}
