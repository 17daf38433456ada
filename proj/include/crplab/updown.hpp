#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "crplab/rng.hpp"

namespace crplab {

inline constexpr std::uint64_t kDefaultEventBudget = 100'000'000;

struct ChainEvent {
  double time;
  int state;
};

// Piecewise-constant integer path; state is initial_state before the first event.
struct ChainPath {
  int initial_state = 0;
  double horizon = 0.0;
  std::vector<ChainEvent> events;

  int state_at(double t) const;
  int final_state() const { return events.empty() ? initial_state : events.back().state; }
  // Time of the first visit to 0 (0 if the path starts there), if any.
  std::optional<double> hitting_time_zero() const;
  int supremum() const;
  void write_csv(std::ostream& os) const;
};

struct UpDownOptions {
  bool killed = false;  // stop at the first visit to 0 even when theta > 0
  std::uint64_t event_budget = kDefaultEventBudget;
};

// Minimal stepping engine, shared by the path simulator and the fast helpers.
class UpDownChain {
 public:
  UpDownChain(int state, double theta);
  int state() const { return state_; }
  double time() const { return time_; }
  // Advances one event. Returns false if the chain is absorbed (no event).
  bool step(Rng& rng);
  double theta() const { return theta_; }

 private:
  int state_;
  double theta_;
  double time_ = 0.0;
};

ChainPath simulate_updown(int k, double theta, double horizon, Rng& rng, const UpDownOptions& opts = {});

// Whether the chain from `start` reaches `upper` before 0.
bool updown_hits_before_zero(int start, int upper, double theta, Rng& rng,
                             std::uint64_t budget = kDefaultEventBudget);

// First hitting time of 0, censored at `horizon` (returns +inf if not reached).
double updown_zero_time(int start, double theta, double horizon, Rng& rng,
                        std::uint64_t budget = kDefaultEventBudget);

// State at time t (no killing).
int updown_state_at(int start, double theta, double t, Rng& rng, std::uint64_t budget = kDefaultEventBudget);

// Exact draw of Z(t) for theta >= 0: the chain is a linear birth-death
// process with immigration, so surviving lineages are geometric and the
// immigrant families negative binomial.
int updown_marginal_sample(int k, double theta, double t, Rng& rng);

double scale_function(int k, double theta);
double hit_probability_exact(int k, double theta);

struct RealEvent {
  double time;
  double value;
};

struct RealPath {
  double initial_value = 0.0;
  double horizon = 0.0;
  std::vector<RealEvent> events;
  double value_at(double t) const;
  double supremum() const;
};

RealPath rescale_chain(const ChainPath& path, int n);

struct GammaLaw {
  double shape;
  double rate;
  double mean() const { return shape / rate; }
  double cdf(double x) const;
  double sample(Rng& rng) const;
};

GammaLaw besq_gamma_marginal(double theta, double t);
double besq_hitting_time_sample(double mass, double theta, Rng& rng);
double besq_hitting_time_cdf(double x, double mass, double theta);

// Euler-Maruyama for dZ = delta dt + 2 sqrt(|Z|) dB; absorbed at 0 when delta <= 0.
double besq_euler(double x, double delta, double t, double dt, Rng& rng);
// Absorption time of the Euler scheme (delta <= 0), censored at tmax.
double besq_euler_absorption_time(double x, double delta, double dt, double tmax, Rng& rng);

}  // namespace crplab
