#pragma once

#include <cstdint>
#include <vector>

#include "crplab/ocrp.hpp"
#include "crplab/partition.hpp"
#include "crplab/rng.hpp"
#include "crplab/stats.hpp"
#include "crplab/updown.hpp"

namespace crplab {

struct NestedCompositions {
  Composition coarse;
  Composition fine;
  bool valid() const { return coarse.n() == fine.n() && refines(fine, coarse); }
};

struct NestedPartitions {
  IntervalPartition coarse;
  IntervalPartition fine;
  bool valid(double tol = 1e-9) const { return refines(fine, coarse, tol); }
};

// Each block is split by an independent structural PDIP sample whose oCRP
// components use about `resolution` customers per unit of relative mass.
IntervalPartition frag(const IntervalPartition& beta, const CrpParams& p, int resolution, Rng& rng);

// Requires fine.theta1 + fine.theta2 + coarse.alpha == fine.alpha.
NestedCompositions nested_ocrp(int n, const CrpParams& coarse, const CrpParams& fine, Rng& rng);

// Coarse PCRP with parameters (alpha_bar, theta_bar, alpha_bar); the fine rule
// must satisfy theta1 + theta2 - alpha = -alpha_bar.
struct NestedPcrpParams {
  double alpha_bar = 0.25;
  double theta_bar = 0.0;
  CrpParams fine;
  CrpParams coarse() const { return {alpha_bar, theta_bar, alpha_bar}; }
  void validate() const;
};

class NestedPcrpState {
 public:
  NestedPcrpState(const NestedCompositions& c0, const NestedPcrpParams& p);
  bool step(Rng& rng);
  double time() const { return time_; }
  int mass() const { return n_; }
  NestedCompositions pair() const;
  const std::vector<std::vector<int>>& clusters() const { return clusters_; }

 private:
  NestedPcrpParams p_;
  std::vector<std::vector<int>> clusters_;
  std::vector<int> cluster_mass_;
  int n_ = 0;
  double time_ = 0.0;
};

struct NestedPathEvent {
  double time;
  NestedCompositions state;
};

struct NestedPath {
  NestedCompositions initial;
  double horizon = 0.0;
  std::vector<NestedPathEvent> events;
};

NestedPath nested_pcrp(const NestedCompositions& c0, const NestedPcrpParams& p, double horizon, Rng& rng,
                       std::uint64_t budget = kDefaultEventBudget);
NestedCompositions nested_pcrp_state_at(const NestedCompositions& c0, const NestedPcrpParams& p, double t, Rng& rng,
                                        std::uint64_t budget = kDefaultEventBudget);

// Largest-block and first-block two-sample KS tests of frag(PDIP(coarse))
// against PDIP(alpha, theta1 + coarse.theta1, theta2 + coarse.theta2).
std::vector<TestReport> check_fragmentation_identity(const CrpParams& coarse, const CrpParams& fine, std::size_t reps,
                                                     int resolution, std::uint64_t seed);

// Rescaled nested oCRP pairs against (PDIP(coarse), frag of it): two-sample KS
// on the coarse largest block, fine largest block and fine first block.
std::vector<TestReport> check_nested_limit(const CrpParams& coarse, const CrpParams& fine, std::size_t reps,
                                           int resolution, std::uint64_t seed);

}  // namespace crplab
