#include "crplab/scaffold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crplab {

namespace {

double tolerance(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

class EventCounter {
 public:
  explicit EventCounter(std::uint64_t budget) : budget_(budget) {}
  void add(std::uint64_t k, const char* where) {
    used_ += k;
    if (used_ > budget_) throw BudgetExceeded(std::string(where) + ": event budget exceeded");
  }
  std::uint64_t remaining() const { return budget_ - used_; }

 private:
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
};

}  // namespace

int Spindle::value_at(double u) const {
  if (u < 0.0) return 0;
  if (!censored && u >= lifetime) return 0;
  if (censored && u > lifetime) {
    if (u > lifetime + 1e-12 * std::max(1.0, lifetime))
      throw std::out_of_range("Spindle::value_at: beyond the censoring horizon");
    u = lifetime;
  }
  return path.state_at(u);
}

Spindle sample_spindle(int m, double alpha, double horizon, Rng& rng, std::uint64_t budget) {
  if (m < 1) throw std::invalid_argument("sample_spindle: m must be positive");
  Spindle s;
  if (!(horizon > 0.0)) {
    s.path.initial_state = m;
    s.lifetime = 0.0;
    s.censored = true;
    return s;
  }
  UpDownOptions opts;
  opts.killed = true;
  opts.event_budget = budget;
  s.path = simulate_updown(m, -alpha, horizon, rng, opts);
  if (s.path.final_state() == 0) {
    s.lifetime = s.path.events.back().time;
  } else {
    s.lifetime = horizon;
    s.censored = true;
  }
  return s;
}

double Scaffolding::value_at(double t) const {
  if (nodes.empty()) throw std::logic_error("Scaffolding: empty");
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t, [](double v, const ScaffoldNode& n) { return v < n.time; });
  if (it == nodes.begin()) return nodes.front().left;
  const ScaffoldNode& a = *std::prev(it);
  if (it == nodes.end() || a.time == t) return a.value;
  const ScaffoldNode& b = *it;
  return a.value + (b.left - a.value) * (t - a.time) / (b.time - a.time);
}

double Scaffolding::left_limit(double t) const {
  if (nodes.empty()) throw std::logic_error("Scaffolding: empty");
  auto it = std::lower_bound(nodes.begin(), nodes.end(), t, [](const ScaffoldNode& n, double v) { return n.time < v; });
  if (it == nodes.end()) return nodes.back().value;
  if (it->time == t || it == nodes.begin()) return it->left;
  const ScaffoldNode& a = *std::prev(it);
  return a.value + (it->left - a.value) * (t - a.time) / (it->time - a.time);
}

double Scaffolding::infimum() const {
  double m = kInf;
  for (const auto& n : nodes) m = std::min({m, n.left, n.value});
  return m;
}

double Scaffolding::first_passage(double level) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].left <= level) {
      if (i == 0) return nodes[0].time;
      const ScaffoldNode& a = nodes[i - 1];
      if (a.value <= level) return a.time;
      return a.time + (a.value - level) / (a.value - nodes[i].left) * (nodes[i].time - a.time);
    }
    if (nodes[i].value <= level) return nodes[i].time;
  }
  return kInf;
}

Scaffolding Scaffolding::shifted(double c) const {
  Scaffolding out = *this;
  for (auto& n : out.nodes) {
    n.left += c;
    n.value += c;
  }
  out.censor_level += c;
  return out;
}

Scaffolding scaffolding_of(const SpindleMeasure& d, double start, double end_time) {
  Scaffolding x;
  double t = 0.0, v = start;
  x.nodes.push_back({0.0, start, start});
  for (const auto& a : d.atoms) {
    if (a.time < t) throw std::invalid_argument("scaffolding_of: atom times must increase");
    if (a.time > end_time) break;
    const double left = v - (a.time - t);
    if (a.time == 0.0) {
      x.nodes.back().value += a.spindle.lifetime;
    } else {
      x.nodes.push_back({a.time, left, left + a.spindle.lifetime});
    }
    t = a.time;
    v = x.nodes.back().value;
  }
  if (end_time > t) x.nodes.push_back({end_time, v - (end_time - t), v - (end_time - t)});
  return x;
}

namespace {

std::vector<double> birth_levels(const SpindleMeasure& d, const Scaffolding& x) {
  std::vector<double> births;
  births.reserve(d.atoms.size());
  double prev = -kInf;
  for (const auto& a : d.atoms) {
    if (!(a.time > prev) && prev != -kInf) throw std::invalid_argument("skewer: atom times must strictly increase");
    prev = a.time;
    const double b = x.left_limit(a.time);
    const double jump = x.value_at(a.time) - b;
    const double expect = std::min(a.spindle.lifetime, x.censor_level - b);
    if (std::abs(jump - expect) > tolerance(b + expect))
      throw std::invalid_argument("skewer: scaffolding jump does not match spindle lifetime");
    births.push_back(b);
  }
  return births;
}

Composition skewer_with_births(const SpindleMeasure& d, const std::vector<double>& births, double y) {
  std::vector<int> parts;
  for (std::size_t i = 0; i < births.size(); ++i) {
    const int v = d.atoms[i].spindle.value_at(y - births[i]);
    if (v > 0) parts.push_back(v);
  }
  return Composition(std::move(parts));
}

}  // namespace

Composition skewer(const SpindleMeasure& d, const Scaffolding& x, double y) {
  if (d.atoms.empty()) return Composition{};
  return skewer_with_births(d, birth_levels(d, x), y);
}

std::vector<Composition> skewer_levels(const SpindleMeasure& d, const Scaffolding& x,
                                       const std::vector<double>& levels) {
  std::vector<Composition> out;
  out.reserve(levels.size());
  if (d.atoms.empty()) {
    out.resize(levels.size());
    return out;
  }
  auto births = birth_levels(d, x);
  for (double y : levels) out.push_back(skewer_with_births(d, births, y));
  return out;
}

Clade sample_clade(int m, double alpha, Rng& rng, const CladeOptions& opts) {
  if (m < 1) throw std::invalid_argument("sample_clade: m must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sample_clade: alpha must lie in (0,1)");
  const double cap = opts.level_cap;
  EventCounter counter(opts.budget);
  Clade clade;
  clade.scaffolding.censor_level = cap;
  Spindle first = sample_spindle(m, alpha, cap, rng, counter.remaining());
  counter.add(first.path.events.size(), "sample_clade");
  double x = std::min(first.lifetime, cap);
  clade.scaffolding.nodes.push_back({0.0, 0.0, x});
  clade.measure.atoms.push_back({0.0, std::move(first)});
  double s = 0.0;
  for (;;) {
    const double tau = exponential(rng, alpha);
    if (x - tau <= 0.0) {
      s += x;
      clade.scaffolding.nodes.push_back({s, 0.0, 0.0});
      break;
    }
    s += tau;
    x -= tau;
    Spindle f = sample_spindle(1, alpha, cap - x, rng, counter.remaining());
    counter.add(f.path.events.size() + 1, "sample_clade");
    const double jump = std::min(f.lifetime, cap - x);
    clade.scaffolding.nodes.push_back({s, x, x + jump});
    x += jump;
    clade.measure.atoms.push_back({s, std::move(f)});
  }
  return clade;
}

namespace {

void check_levels(const std::vector<double>& levels, double upper) {
  for (double y : levels)
    if (!(y >= 0.0) || y > upper) throw std::invalid_argument("level outside the allowed range");
}

}  // namespace

LevelPath pcrp_via_clades(const Composition& gamma, double alpha, const std::vector<double>& levels, Rng& rng,
                          bool censored, std::uint64_t budget) {
  if (gamma.empty()) throw std::invalid_argument("pcrp_via_clades: empty initial state");
  check_levels(levels, kInf);
  CladeOptions opts;
  opts.budget = budget;
  if (censored && !levels.empty()) opts.level_cap = *std::max_element(levels.begin(), levels.end());
  LevelPath out{levels, std::vector<Composition>(levels.size())};
  std::vector<std::vector<Composition>> per_part;
  for (int m : gamma.parts()) {
    Clade c = sample_clade(m, alpha, rng, opts);
    per_part.push_back(skewer_levels(c.measure, c.scaffolding, levels));
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::vector<Composition> pieces;
    for (auto& p : per_part) pieces.push_back(std::move(p[l]));
    out.states[l] = concatenate(pieces);
  }
  return out;
}

Scaffolding modified_scaffolding(const Scaffolding& j, double theta1, double alpha) {
  if (!(theta1 > 0.0)) throw std::invalid_argument("modified_scaffolding: theta1 must be positive");
  if (j.nodes.empty()) return j;
  const double c = 1.0 - alpha / theta1;
  Scaffolding out;
  out.censor_level = j.censor_level;
  double m = std::min(j.nodes[0].left, j.nodes[0].value);
  auto ell = [&] { return -m; };
  out.nodes.push_back({j.nodes[0].time, j.nodes[0].left + c * ell(), j.nodes[0].value + c * ell()});
  for (std::size_t i = 0; i + 1 < j.nodes.size(); ++i) {
    const ScaffoldNode& a = j.nodes[i];
    const ScaffoldNode& b = j.nodes[i + 1];
    if (b.left < m) {
      const double tc = a.value <= m ? a.time : a.time + (a.value - m) / (a.value - b.left) * (b.time - a.time);
      if (tc > a.time && tc < b.time) out.nodes.push_back({tc, m + c * ell(), m + c * ell()});
      m = b.left;
    }
    out.nodes.push_back({b.time, b.left + c * ell(), b.value + c * ell()});
  }
  // Pathwise identity: the running infimum of the output is -(alpha/theta1) l.
  double run = kInf;
  double inf_j = kInf;
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    run = std::min({run, out.nodes[i].left, out.nodes[i].value});
    inf_j = std::min({inf_j, j.left_limit(out.nodes[i].time), j.value_at(out.nodes[i].time)});
    if (i == 0) inf_j = std::min(inf_j, j.nodes[0].left);
    if (std::abs(run - (alpha / theta1) * inf_j) > tolerance(run))
      throw std::logic_error("modified_scaffolding: infimum identity violated");
  }
  return out;
}

ImmigrationSample sample_immigration(double theta1, double alpha, int j, Rng& rng, std::uint64_t budget) {
  if (!(theta1 > 0.0)) throw std::invalid_argument("sample_immigration: theta1 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sample_immigration: alpha must lie in (0,1)");
  if (j < 1) throw std::invalid_argument("sample_immigration: j must be positive");
  EventCounter counter(budget);
  const double target = -(theta1 / alpha) * j;
  Scaffolding jd;
  jd.nodes.push_back({0.0, 0.0, 0.0});
  ImmigrationSample out;
  double s = 0.0, x = 0.0;
  for (;;) {
    const double tau = exponential(rng, alpha);
    if (x - tau <= target) {
      s += x - target;
      jd.nodes.push_back({s, target, target});
      break;
    }
    s += tau;
    x -= tau;
    Spindle f = sample_spindle(1, alpha, kInf, rng, counter.remaining());
    counter.add(f.path.events.size() + 1, "sample_immigration");
    jd.nodes.push_back({s, x, x + f.lifetime});
    x += f.lifetime;
    out.measure.atoms.push_back({s, std::move(f)});
  }
  out.scaffolding = modified_scaffolding(jd, theta1, alpha).shifted(static_cast<double>(j));
  if (std::abs(out.scaffolding.end_value()) > tolerance(j))
    throw std::logic_error("sample_immigration: modified scaffolding does not end at -j");
  return out;
}

ImmigrationSample sample_immigration_censored(double theta1, double alpha, double cap, Rng& rng,
                                              std::uint64_t budget) {
  if (!(theta1 > 0.0)) throw std::invalid_argument("sample_immigration_censored: theta1 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sample_immigration_censored: alpha must lie in (0,1)");
  if (!(cap >= 0.0)) throw std::invalid_argument("sample_immigration_censored: cap must be nonnegative");
  EventCounter counter(budget);
  ImmigrationSample out;
  Scaffolding& x_path = out.scaffolding;
  x_path.censor_level = cap;
  x_path.nodes.push_back({0.0, cap, cap});
  // Above the running infimum the slope is -1, at the infimum -alpha/theta1.
  double s = 0.0, x = cap, inf = cap;
  while (x > 0.0) {
    const double tau = exponential(rng, alpha);
    if (x > inf) {
      const double d = x - inf;
      if (tau >= d) {
        s += d;
        x = inf;
        x_path.nodes.push_back({s, x, x});
        continue;
      }
      s += tau;
      x -= tau;
    } else {
      const double need = x * theta1 / alpha;
      if (tau >= need) {
        s += need;
        x_path.nodes.push_back({s, 0.0, 0.0});
        break;
      }
      s += tau;
      x -= tau * alpha / theta1;
      inf = x;
    }
    Spindle f = sample_spindle(1, alpha, cap - x, rng, counter.remaining());
    counter.add(f.path.events.size() + 1, "sample_immigration_censored");
    const double jump = std::min(f.lifetime, cap - x);
    x_path.nodes.push_back({s, x, x + jump});
    x += jump;
    out.measure.atoms.push_back({s, std::move(f)});
  }
  if (x_path.nodes.back().value != 0.0) x_path.nodes.push_back({s, 0.0, 0.0});
  return out;
}

LevelPath pcrp_left_immigration(double theta1, double alpha, int j, const std::vector<double>& levels, Rng& rng,
                                const ImmigrationOptions& opts) {
  check_levels(levels, static_cast<double>(j));
  ImmigrationSample sample;
  if (opts.censored) {
    const double cap = levels.empty() ? 0.0 : *std::max_element(levels.begin(), levels.end());
    sample = sample_immigration_censored(theta1, alpha, cap, rng, opts.budget);
  } else {
    sample = sample_immigration(theta1, alpha, j, rng, opts.budget);
  }
  return LevelPath{levels, skewer_levels(sample.measure, sample.scaffolding, levels)};
}

nlohmann::json clade_to_json(const SpindleMeasure& d, const Scaffolding& x) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : d.atoms) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : a.spindle.path.events) events.push_back({e.time, e.state});
    atoms.push_back({{"time", a.time},
                     {"initial", a.spindle.path.initial_state},
                     {"lifetime", a.spindle.lifetime},
                     {"censored", a.spindle.censored},
                     {"events", events}});
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : x.nodes) nodes.push_back({n.time, n.left, n.value});
  nlohmann::json out{{"atoms", atoms}, {"scaffolding", nodes}};
  if (std::isfinite(x.censor_level)) out["censor_level"] = x.censor_level;
  return out;
}

}  // namespace crplab
