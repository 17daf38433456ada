#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "crplab/ocrp.hpp"
#include "crplab/partition.hpp"
#include "crplab/rng.hpp"
#include "crplab/updown.hpp"

namespace crplab {

struct PcrpEvent {
  double time;
  Composition state;
};

struct PcrpPath {
  Composition initial;
  CrpParams params;
  bool killed = false;
  double horizon = 0.0;
  std::vector<PcrpEvent> events;

  const Composition& state_at(double t) const;
  const Composition& final_state() const { return events.empty() ? initial : events.back().state; }
  ChainPath mass_path() const;
  std::optional<double> extinction_time() const;
  void write_csv(std::ostream& os) const;
};

class PcrpState {
 public:
  PcrpState(const Composition& c0, const CrpParams& p, bool killed);
  // Advances one event; returns false when no further event can occur.
  bool step(Rng& rng);
  double time() const { return time_; }
  int mass() const { return n_; }
  const std::vector<int>& parts() const { return parts_; }
  Composition composition() const { return Composition(parts_); }
  // Exact total jump rate at the current state, summed rule by rule.
  double total_rate() const;

 private:
  CrpParams p_;
  bool killed_;
  std::vector<int> parts_;
  int n_;
  double time_ = 0.0;
};

PcrpPath simulate_pcrp(const Composition& c0, const CrpParams& p, double horizon, bool killed, Rng& rng,
                       std::uint64_t budget = kDefaultEventBudget);

// State at time t without recording the path.
Composition pcrp_state_at(const Composition& c0, const CrpParams& p, double t, Rng& rng,
                          std::uint64_t budget = kDefaultEventBudget);

PcrpPath simulate_pcrp_embedded(const ChainPath& z, const CrpParams& p, const Composition& c0, Rng& rng);

PcrpPath sample_excursion(const CrpParams& p, Rng& rng,
                          double horizon = std::numeric_limits<double>::infinity(),
                          std::uint64_t budget = kDefaultEventBudget);

struct IpEvent {
  double time;
  IntervalPartition state;
};

struct IpPath {
  IntervalPartition initial;
  double horizon = 0.0;
  std::vector<IpEvent> events;
  const IntervalPartition& state_at(double t) const;
};

IpPath rescale_pcrp(const PcrpPath& path, int n);

// Time change by the inverse of t -> int_0^t ds / mass(s), then unit mass.
// The output stops where the mass first vanishes or at the horizon; asking
// for u_max beyond that is an error.
IpPath depoissonise(const IpPath& path, std::optional<double> u_max = std::nullopt);

}  // namespace crplab
