#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "crplab/partition.hpp"
#include "crplab/rng.hpp"
#include "crplab/updown.hpp"

namespace crplab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A pi_m(-alpha) path run to absorption, or only up to `lifetime` when censored.
struct Spindle {
  ChainPath path;
  double lifetime = 0.0;
  bool censored = false;
  int value_at(double u) const;
};

Spindle sample_spindle(int m, double alpha, double horizon, Rng& rng, std::uint64_t budget = kDefaultEventBudget);

struct SpindleAtom {
  double time;
  Spindle spindle;
};

struct SpindleMeasure {
  std::vector<SpindleAtom> atoms;
};

// X(time-) = left, X(time) = value; linear from one node's value to the next node's left.
struct ScaffoldNode {
  double time;
  double left;
  double value;
};

// Piecewise-linear cadlag path with upward jumps. Jumps are truncated at
// `censor_level` when it is finite.
struct Scaffolding {
  std::vector<ScaffoldNode> nodes;
  double censor_level = kInf;

  double value_at(double t) const;
  double left_limit(double t) const;
  double start_time() const { return nodes.front().time; }
  double end_time() const { return nodes.back().time; }
  double end_value() const { return nodes.back().value; }
  double infimum() const;
  // First time the path is at or below `level` (+inf if never).
  double first_passage(double level) const;
  Scaffolding shifted(double c) const;
};

// X(t) = start - t + sum of lifetimes of atoms at times <= t, on [0, end_time].
Scaffolding scaffolding_of(const SpindleMeasure& d, double start, double end_time);

Composition skewer(const SpindleMeasure& d, const Scaffolding& x, double y);
std::vector<Composition> skewer_levels(const SpindleMeasure& d, const Scaffolding& x, const std::vector<double>& levels);

struct Clade {
  SpindleMeasure measure;
  Scaffolding scaffolding;  // includes the initial jump, ends at 0
};

struct CladeOptions {
  double level_cap = kInf;  // skewers are exact at levels <= level_cap
  std::uint64_t budget = kDefaultEventBudget;
};

Clade sample_clade(int m, double alpha, Rng& rng, const CladeOptions& opts = {});

struct LevelPath {
  std::vector<double> levels;
  std::vector<Composition> states;
};

// Independent clades per part, skewered on `levels` and concatenated. When
// `censored`, every clade is cut at the highest requested level.
LevelPath pcrp_via_clades(const Composition& gamma, double alpha, const std::vector<double>& levels, Rng& rng,
                          bool censored = true, std::uint64_t budget = kDefaultEventBudget);

// J + (1 - alpha/theta1) l with l(t) = -inf_{u<=t} J(u).
Scaffolding modified_scaffolding(const Scaffolding& j, double theta1, double alpha);

struct ImmigrationSample {
  SpindleMeasure measure;
  Scaffolding scaffolding;  // j + J_theta1, ends at 0
};

// Uncensored route: J_D run until J_theta1 reaches -j, then shifted by j.
ImmigrationSample sample_immigration(double theta1, double alpha, int j, Rng& rng,
                                     std::uint64_t budget = kDefaultEventBudget);
// Level-censored route, exact for skewers at levels <= cap <= j.
ImmigrationSample sample_immigration_censored(double theta1, double alpha, double cap, Rng& rng,
                                              std::uint64_t budget = kDefaultEventBudget);

struct ImmigrationOptions {
  bool censored = true;
  std::uint64_t budget = kDefaultEventBudget;
};

LevelPath pcrp_left_immigration(double theta1, double alpha, int j, const std::vector<double>& levels, Rng& rng,
                                const ImmigrationOptions& opts = {});

nlohmann::json clade_to_json(const SpindleMeasure& d, const Scaffolding& x);

}  // namespace crplab
