#pragma once

#include <map>
#include <string>
#include <vector>

#include "crplab/ocrp.hpp"
#include "crplab/stats.hpp"

namespace testing_helpers {

using crplab::Composition;

// Counts per composition, with everything of mass above `max_mass` lumped.
struct Tally {
  int max_mass;
  std::map<Composition, double> counts;
  double overflow = 0.0;
  void add(const Composition& c) {
    if (c.n() > max_mass)
      overflow += 1.0;
    else
      counts[c] += 1.0;
  }
};

inline crplab::TestReport compare_tallies(const Tally& a, const Tally& b) {
  std::map<Composition, int> keys;
  for (auto& [k, v] : a.counts) keys[k];
  for (auto& [k, v] : b.counts) keys[k];
  std::vector<double> x, y;
  for (auto& [k, v] : keys) {
    auto ia = a.counts.find(k);
    auto ib = b.counts.find(k);
    x.push_back(ia == a.counts.end() ? 0.0 : ia->second);
    y.push_back(ib == b.counts.end() ? 0.0 : ib->second);
  }
  x.push_back(a.overflow);
  y.push_back(b.overflow);
  return crplab::chi_square_two_sample(x, y);
}

inline crplab::TestReport gof_against_law(const std::map<Composition, double>& counts, const crplab::ExactLaw& law) {
  std::vector<double> obs, probs;
  for (auto& [c, p] : law.table) {
    auto it = counts.find(c);
    obs.push_back(it == counts.end() ? 0.0 : it->second);
    probs.push_back(p);
  }
  for (auto& [c, v] : counts)
    if (!law.table.count(c)) {
      obs.push_back(v);
      probs.push_back(0.0);
    }
  return crplab::chi_square_gof(obs, probs);
}

inline std::vector<crplab::CrpParams> parameter_grid() {
  std::vector<crplab::CrpParams> out;
  for (double a : {0.25, 0.5, 0.75})
    for (double t1 : {0.0, 0.3, 1.0})
      for (double t2 : {0.0, 0.3, 1.0}) out.push_back({a, t1, t2});
  return out;
}

}  // namespace testing_helpers
