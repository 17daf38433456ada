#include "crplab/pcrp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crplab {

const Composition& PcrpPath::state_at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double v, const PcrpEvent& e) { return v < e.time; });
  return it == events.begin() ? initial : std::prev(it)->state;
}

ChainPath PcrpPath::mass_path() const {
  ChainPath z;
  z.initial_state = initial.n();
  z.horizon = horizon;
  z.events.reserve(events.size());
  for (const auto& e : events) z.events.push_back({e.time, e.state.n()});
  return z;
}

std::optional<double> PcrpPath::extinction_time() const {
  if (initial.empty()) return 0.0;
  for (const auto& e : events)
    if (e.state.empty()) return e.time;
  return std::nullopt;
}

void PcrpPath::write_csv(std::ostream& os) const {
  os << "time,composition\n0," << initial.to_string() << '\n';
  for (const auto& e : events) os << e.time << ',' << e.state.to_string() << '\n';
}

PcrpState::PcrpState(const Composition& c0, const CrpParams& p, bool killed)
    : p_(p), killed_(killed), parts_(c0.parts()), n_(c0.n()) {
  p_.validate();
}

double PcrpState::total_rate() const {
  if (n_ == 0) return p_.theta() > 0.0 ? p_.theta() : 0.0;
  return seating_total(n_, parts_.size(), p_) + n_;
}

bool PcrpState::step(Rng& rng) {
  const double theta = p_.theta();
  if (n_ == 0) {
    if (killed_ || theta <= 0.0) return false;
    time_ += exponential(rng, theta);
    parts_.assign(1, 1);
    n_ = 1;
    return true;
  }
  const double rate = total_rate();
  if (std::abs(rate - (2.0 * n_ + theta)) > 1e-9 * rate)
    throw std::logic_error("PcrpState: total event rate differs from 2n + theta");
  time_ += exponential(rng, rate);
  if (uniform01(rng) * rate < n_ + theta) {
    apply_seat(parts_, choose_seat(parts_, n_, p_, rng));
    ++n_;
  } else {
    remove_uniform_customer(parts_, n_, rng);
    --n_;
  }
  return true;
}

PcrpPath simulate_pcrp(const Composition& c0, const CrpParams& p, double horizon, bool killed, Rng& rng,
                       std::uint64_t budget) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_pcrp: horizon must be positive");
  PcrpPath path{c0, p, killed, horizon, {}};
  PcrpState state(c0, p, killed);
  std::uint64_t count = 0;
  for (;;) {
    if (killed && state.mass() == 0) break;
    PcrpState next = state;
    if (!next.step(rng) || next.time() > horizon) break;
    if (++count > budget) throw BudgetExceeded("simulate_pcrp: event budget exceeded");
    state = std::move(next);
    path.events.push_back({state.time(), state.composition()});
  }
  return path;
}

Composition pcrp_state_at(const Composition& c0, const CrpParams& p, double t, Rng& rng, std::uint64_t budget) {
  PcrpState state(c0, p, false);
  std::uint64_t count = 0;
  for (;;) {
    PcrpState next = state;
    if (!next.step(rng) || next.time() > t) return state.composition();
    if (++count > budget) throw BudgetExceeded("pcrp_state_at: event budget exceeded");
    state = std::move(next);
  }
}

PcrpPath simulate_pcrp_embedded(const ChainPath& z, const CrpParams& p, const Composition& c0, Rng& rng) {
  p.validate();
  if (z.initial_state != c0.n()) throw std::invalid_argument("simulate_pcrp_embedded: mass mismatch");
  PcrpPath path{c0, p, false, z.horizon, {}};
  std::vector<int> parts = c0.parts();
  int n = c0.n();
  for (const auto& e : z.events) {
    if (e.state == n + 1) {
      if (parts.empty())
        parts.assign(1, 1);
      else
        apply_seat(parts, choose_seat(parts, n, p, rng));
    } else if (e.state == n - 1) {
      remove_uniform_customer(parts, n, rng);
    } else {
      throw std::invalid_argument("simulate_pcrp_embedded: mass path jumps by more than one");
    }
    n = e.state;
    path.events.push_back({e.time, Composition(parts)});
  }
  return path;
}

PcrpPath sample_excursion(const CrpParams& p, Rng& rng, double horizon, std::uint64_t budget) {
  return simulate_pcrp(Composition{1}, p, horizon, true, rng, budget);
}

const IntervalPartition& IpPath::state_at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double v, const IpEvent& e) { return v < e.time; });
  return it == events.begin() ? initial : std::prev(it)->state;
}

IpPath rescale_pcrp(const PcrpPath& path, int n) {
  if (n < 1) throw std::invalid_argument("rescale_pcrp: n must be positive");
  const double c = 1.0 / n;
  auto conv = [&](const Composition& x) { return x.empty() ? IntervalPartition{} : scale(c, composition_to_partition(x)); };
  IpPath out;
  out.initial = conv(path.initial);
  out.horizon = path.horizon / (2.0 * n);
  out.events.reserve(path.events.size());
  for (const auto& e : path.events) out.events.push_back({e.time / (2.0 * n), conv(e.state)});
  return out;
}

IpPath depoissonise(const IpPath& path, std::optional<double> u_max) {
  auto normalise = [](const IntervalPartition& b) { return scale(1.0 / b.total_mass(), b); };
  if (!(path.initial.total_mass() > 0.0)) {
    if (u_max && *u_max > 0.0) throw std::invalid_argument("depoissonise: mass is zero at time 0");
    return IpPath{};
  }
  IpPath out;
  out.initial = normalise(path.initial);
  double u = 0.0, t = 0.0;
  double mass = path.initial.total_mass();
  bool died = false;
  for (const auto& e : path.events) {
    if (e.time > path.horizon) break;
    u += (e.time - t) / mass;
    t = e.time;
    mass = e.state.total_mass();
    if (!(mass > 0.0)) {
      died = true;
      break;
    }
    out.events.push_back({u, normalise(e.state)});
  }
  if (!died && std::isfinite(path.horizon)) u += (path.horizon - t) / mass;
  out.horizon = u;
  if (u_max && *u_max > u) throw std::invalid_argument("depoissonise: mass hits 0 before requested time");
  return out;
}

}  // namespace crplab
