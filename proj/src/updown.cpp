#include "crplab/updown.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "crplab/stats.hpp"

namespace crplab {

int ChainPath::state_at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double v, const ChainEvent& e) { return v < e.time; });
  return it == events.begin() ? initial_state : std::prev(it)->state;
}

std::optional<double> ChainPath::hitting_time_zero() const {
  if (initial_state == 0) return 0.0;
  for (const auto& e : events)
    if (e.state == 0) return e.time;
  return std::nullopt;
}

int ChainPath::supremum() const {
  int m = initial_state;
  for (const auto& e : events) m = std::max(m, e.state);
  return m;
}

void ChainPath::write_csv(std::ostream& os) const {
  os << "time,state\n0," << initial_state << '\n';
  for (const auto& e : events) os << e.time << ',' << e.state << '\n';
}

UpDownChain::UpDownChain(int state, double theta) : state_(state), theta_(theta) {
  if (state < 0) throw std::invalid_argument("UpDownChain: negative state");
  if (!(theta > -1.0)) throw std::invalid_argument("UpDownChain: theta must exceed -1");
}

bool UpDownChain::step(Rng& rng) {
  if (state_ == 0) {
    if (theta_ <= 0.0) return false;
    time_ += exponential(rng, theta_);
    state_ = 1;
    return true;
  }
  const double up = state_ + theta_;
  const double total = 2.0 * state_ + theta_;
  time_ += exponential(rng, total);
  if (uniform01(rng) * total < up)
    ++state_;
  else
    --state_;
  return true;
}

ChainPath simulate_updown(int k, double theta, double horizon, Rng& rng, const UpDownOptions& opts) {
  if (!(theta > -1.0)) throw std::invalid_argument("simulate_updown: theta must exceed -1");
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_updown: horizon must be positive");
  ChainPath path;
  path.initial_state = k;
  path.horizon = horizon;
  UpDownChain chain(k, theta);
  std::uint64_t count = 0;
  while (!(opts.killed && chain.state() == 0)) {
    UpDownChain next = chain;
    if (!next.step(rng) || next.time() > horizon) break;
    if (++count > opts.event_budget) throw BudgetExceeded("simulate_updown: event budget exceeded");
    chain = next;
    path.events.push_back({chain.time(), chain.state()});
  }
  return path;
}

bool updown_hits_before_zero(int start, int upper, double theta, Rng& rng, std::uint64_t budget) {
  // Holding times are irrelevant here, only the jump chain matters.
  int i = start;
  std::uint64_t count = 0;
  while (i > 0 && i < upper) {
    if (++count > budget) throw BudgetExceeded("updown_hits_before_zero: event budget exceeded");
    if (uniform01(rng) * (2.0 * i + theta) < i + theta)
      ++i;
    else
      --i;
  }
  return i >= upper;
}

double updown_zero_time(int start, double theta, double horizon, Rng& rng, std::uint64_t budget) {
  UpDownChain chain(start, theta);
  std::uint64_t count = 0;
  while (chain.state() > 0) {
    chain.step(rng);
    if (chain.time() > horizon) return std::numeric_limits<double>::infinity();
    if (++count > budget) throw BudgetExceeded("updown_zero_time: event budget exceeded");
  }
  return chain.time();
}

int updown_state_at(int start, double theta, double t, Rng& rng, std::uint64_t budget) {
  UpDownChain chain(start, theta);
  std::uint64_t count = 0;
  for (;;) {
    UpDownChain next = chain;
    if (!next.step(rng) || next.time() > t) return chain.state();
    if (++count > budget) throw BudgetExceeded("updown_state_at: event budget exceeded");
    chain = next;
  }
}

int updown_marginal_sample(int k, double theta, double t, Rng& rng) {
  if (!(theta >= 0.0)) throw std::invalid_argument("updown_marginal_sample: theta must be nonnegative");
  if (k < 0 || t < 0.0) throw std::invalid_argument("updown_marginal_sample: invalid arguments");
  if (t == 0.0) return k;
  const double q = 1.0 / (1.0 + t);
  int total = 0;
  if (k > 0) {
    const int survivors = std::binomial_distribution<int>(k, q)(rng);
    total += survivors;
    if (survivors > 0) total += std::negative_binomial_distribution<int>(survivors, q)(rng);
  }
  if (theta > 0.0) {
    const double lambda = sample_gamma(rng, theta, 1.0 / t);
    total += static_cast<int>(std::poisson_distribution<long>(lambda)(rng));
  }
  return total;
}

double scale_function(int k, double theta) {
  if (k < 0) throw std::invalid_argument("scale_function: k must be nonnegative");
  if (!(theta > -1.0)) throw std::invalid_argument("scale_function: theta must exceed -1");
  const double c = std::lgamma(1.0 + theta);
  double s = 0.0;
  for (int i = 1; i <= k; ++i) s += std::exp(std::lgamma(static_cast<double>(i)) + c - std::lgamma(i + theta));
  return s;
}

double hit_probability_exact(int k, double theta) {
  if (k < 2) throw std::invalid_argument("hit_probability_exact: k must be at least 2");
  return 1.0 / scale_function(k, theta);
}

double RealPath::value_at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double v, const RealEvent& e) { return v < e.time; });
  return it == events.begin() ? initial_value : std::prev(it)->value;
}

double RealPath::supremum() const {
  double m = initial_value;
  for (const auto& e : events) m = std::max(m, e.value);
  return m;
}

RealPath rescale_chain(const ChainPath& path, int n) {
  if (n < 1) throw std::invalid_argument("rescale_chain: n must be positive");
  RealPath out;
  out.initial_value = static_cast<double>(path.initial_state) / n;
  out.horizon = path.horizon / (2.0 * n);
  out.events.reserve(path.events.size());
  for (const auto& e : path.events) out.events.push_back({e.time / (2.0 * n), static_cast<double>(e.state) / n});
  return out;
}

double GammaLaw::cdf(double x) const { return gamma_cdf(x, shape, rate); }

double GammaLaw::sample(Rng& rng) const { return sample_gamma(rng, shape, rate); }

GammaLaw besq_gamma_marginal(double theta, double t) {
  if (!(theta > 0.0) || !(t > 0.0)) throw std::invalid_argument("besq_gamma_marginal: theta and t must be positive");
  return GammaLaw{theta, 1.0 / (2.0 * t)};
}

double besq_hitting_time_sample(double mass, double theta, Rng& rng) {
  if (!(theta < 1.0)) throw std::invalid_argument("besq_hitting_time_sample: theta must be below 1");
  if (!(mass > 0.0)) throw std::invalid_argument("besq_hitting_time_sample: mass must be positive");
  return mass / (2.0 * sample_gamma(rng, 1.0 - theta));
}

double besq_hitting_time_cdf(double x, double mass, double theta) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_q(1.0 - theta, mass / (2.0 * x));
}

namespace {

double euler_increment(double z, double delta, double h, Rng& rng, std::normal_distribution<double>& normal) {
  return z + delta * h + 2.0 * std::sqrt(std::abs(z)) * std::sqrt(h) * normal(rng);
}

}  // namespace

double besq_euler(double x, double delta, double t, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("besq_euler: dt must be positive");
  std::normal_distribution<double> normal;
  double z = x;
  double s = 0.0;
  while (s < t) {
    if (delta <= 0.0 && z <= 0.0) return 0.0;
    double h = std::min(dt, t - s);
    z = euler_increment(z, delta, h, rng, normal);
    if (delta > 0.0) z = std::abs(z);
    s += h;
  }
  return (delta <= 0.0 && z <= 0.0) ? 0.0 : z;
}

double besq_euler_absorption_time(double x, double delta, double dt, double tmax, Rng& rng) {
  if (delta > 0.0) throw std::invalid_argument("besq_euler_absorption_time: requires delta <= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("besq_euler_absorption_time: dt must be positive");
  std::normal_distribution<double> normal;
  double z = x;
  double s = 0.0;
  while (z > 0.0) {
    if (s >= tmax) return std::numeric_limits<double>::infinity();
    double prev = z;
    z = euler_increment(z, delta, dt, rng, normal);
    if (z <= 0.0) return s + dt * prev / (prev - z);  // linear interpolation of the crossing
    s += dt;
  }
  return s;
}

}  // namespace crplab
