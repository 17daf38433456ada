#include "crplab/ocrp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "crplab/stats.hpp"

namespace crplab {

void CrpParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("CrpParams: alpha must lie in [0,1)");
  if (!(theta1 >= 0.0) || !(theta2 >= 0.0)) throw std::invalid_argument("CrpParams: theta1, theta2 must be >= 0");
}

double ExactLaw::total() const {
  double s = 0.0;
  for (const auto& [c, v] : table) s += v;
  return s;
}

void ExactLaw::write_csv(std::ostream& os) const {
  os << "composition,probability\n";
  auto old = os.precision(17);
  for (const auto& [c, v] : table) os << c.to_string() << ',' << v << '\n';
  os.precision(old);
}

double seating_total(int n, std::size_t k, const CrpParams& p) {
  const double kk = static_cast<double>(k);
  return (n - kk * p.alpha) + p.theta1 + p.theta2 + (kk - 1.0) * p.alpha;
}

SeatChoice choose_seat(const std::vector<int>& parts, int n, const CrpParams& p, Rng& rng) {
  if (parts.empty()) throw std::invalid_argument("choose_seat: empty composition");
  const std::size_t k = parts.size();
  const double total = n + p.theta();
  if (std::abs(seating_total(n, k, p) - total) > 1e-9 * std::max(1.0, total))
    throw std::logic_error("choose_seat: seating weights do not sum to n + theta");
  double u = uniform01(rng) * total;
  SeatChoice last{false, 0};
  auto take = [&](double w, SeatChoice c) {
    if (w > 0.0) last = c;
    u -= w;
    return u < 0.0 && w > 0.0;
  };
  if (take(p.theta1, {false, 0})) return last;
  for (std::size_t i = 0; i < k; ++i) {
    if (take(parts[i] - p.alpha, {true, i})) return last;
    if (i + 1 < k && take(p.alpha, {false, i + 1})) return last;
  }
  if (take(p.theta2, {false, k})) return last;
  return last;
}

void apply_seat(std::vector<int>& parts, const SeatChoice& s) {
  if (s.join)
    ++parts[s.index];
  else
    parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(s.index), 1);
}

std::size_t remove_uniform_customer(std::vector<int>& parts, int n, Rng& rng) {
  if (parts.empty()) throw std::invalid_argument("remove_uniform_customer: empty composition");
  std::uniform_int_distribution<int> pick(0, n - 1);
  int u = pick(rng);
  std::size_t i = 0;
  while (u >= parts[i]) u -= parts[i++];
  if (--parts[i] == 0) parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
  return i;
}

Composition seat_next(const Composition& c, const CrpParams& p, Rng& rng) {
  if (c.empty()) throw std::invalid_argument("seat_next: empty composition");
  std::vector<int> parts = c.parts();
  apply_seat(parts, choose_seat(parts, c.n(), p, rng));
  return Composition(std::move(parts));
}

Composition down_step(const Composition& c, Rng& rng) {
  if (c.empty()) throw std::invalid_argument("down_step: empty composition");
  std::vector<int> parts = c.parts();
  remove_uniform_customer(parts, c.n(), rng);
  return Composition(std::move(parts));
}

Law seat_distribution(const Composition& c, const CrpParams& p) {
  if (c.empty()) throw std::invalid_argument("seat_distribution: empty composition");
  const int n = c.n();
  const double total = n + p.theta();
  Law out;
  auto add = [&](const SeatChoice& s, double w) {
    if (w <= 0.0) return;
    std::vector<int> parts = c.parts();
    apply_seat(parts, s);
    out[Composition(std::move(parts))] += w / total;
  };
  const std::size_t k = c.size();
  add({false, 0}, p.theta1);
  for (std::size_t i = 0; i < k; ++i) {
    add({true, i}, c[i] - p.alpha);
    if (i + 1 < k) add({false, i + 1}, p.alpha);
  }
  add({false, k}, p.theta2);
  return out;
}

Law down_distribution(const Composition& c) {
  if (c.empty()) throw std::invalid_argument("down_distribution: empty composition");
  const double n = c.n();
  Law out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::vector<int> parts = c.parts();
    if (--parts[i] == 0) parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
    out[Composition(std::move(parts))] += c[i] / n;
  }
  return out;
}

double decrement(int n, int m, double theta2, double alpha) {
  if (n < 1 || m < 1 || m > n) throw std::invalid_argument("decrement: need 1 <= m <= n");
  const double log_gamma_tail = std::lgamma(m - alpha) - std::lgamma(1.0 - alpha) - std::lgamma(n + theta2);
  if (m == n) return std::exp(std::lgamma(1.0 + theta2) + log_gamma_tail);
  const double factor = ((n - m) * alpha + m * theta2) / n;
  if (factor <= 0.0) return 0.0;
  const double log_binom = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
  return std::exp(log_binom + std::log(factor) + log_gamma_tail + std::lgamma(n - m + theta2));
}

double dirichlet_multinomial(int n, int n1, int n0, int n2, const CrpParams& p) {
  if (n0 < 1 || n1 < 0 || n2 < 0 || n1 + n0 + n2 != n)
    throw std::invalid_argument("dirichlet_multinomial: need n0 >= 1 and n1 + n0 + n2 = n");
  auto side = [](int k, double th) {
    // Gamma(k+th) / (Gamma(th) k!), equal to 1 when th = 0 and k = 0.
    if (th == 0.0) return k == 0 ? 0.0 : -INFINITY;
    return std::lgamma(k + th) - std::lgamma(th) - std::lgamma(k + 1.0);
  };
  const double a = p.alpha;
  double l = side(n1, p.theta1) + side(n2, p.theta2);
  if (std::isinf(l)) return 0.0;
  l += std::lgamma(1.0 - a + p.theta1 + p.theta2) - std::lgamma(1.0 - a);
  l += std::lgamma(static_cast<double>(n)) - std::lgamma(n - a + p.theta1 + p.theta2);
  l += std::lgamma(n0 - a) - std::lgamma(static_cast<double>(n0));
  return std::exp(l);
}

std::vector<Composition> compositions_of(int n) {
  std::vector<Composition> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  const unsigned cuts = static_cast<unsigned>(n - 1);
  for (unsigned mask = 0; mask < (1u << cuts); ++mask) {
    std::vector<int> parts;
    int run = 1;
    for (unsigned b = 0; b < cuts; ++b) {
      if (mask & (1u << b)) {
        parts.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    parts.push_back(run);
    out.emplace_back(std::move(parts));
  }
  return out;
}

ExactLaw exact_law(int n, const CrpParams& p) {
  p.validate();
  if (n < 1) throw std::invalid_argument("exact_law: n must be positive");
  if (n > kMaxExactN) throw std::invalid_argument("exact_law: n too large (max " + std::to_string(kMaxExactN) + ")");
  ExactLaw law;
  law.n = n;
  for (auto& c : compositions_of(n)) {
    const auto& v = c.parts();
    const std::size_t k = v.size();
    std::vector<int> prefix(k + 1, 0);
    for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + v[i];
    double prob = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const int left = prefix[i];
      const int right = n - prefix[i + 1];
      double term = dirichlet_multinomial(n, left, v[i], right, p);
      if (term == 0.0) continue;
      for (std::size_t j = 0; j < i; ++j) term *= decrement(prefix[j + 1], v[j], p.theta1, p.alpha);
      for (std::size_t j = i + 1; j < k; ++j) term *= decrement(n - prefix[j], v[j], p.theta2, p.alpha);
      prob += term;
    }
    law.table.emplace(std::move(c), prob);
  }
  return law;
}

ExactLaw enumerate_bruteforce_law(int n, const CrpParams& p) {
  p.validate();
  if (n < 1) throw std::invalid_argument("enumerate_bruteforce_law: n must be positive");
  if (n > kMaxBruteforceN)
    throw std::invalid_argument("enumerate_bruteforce_law: n too large (max " + std::to_string(kMaxBruteforceN) + ")");
  Law cur{{Composition{1}, 1.0}};
  for (int m = 1; m < n; ++m) {
    Law next;
    for (const auto& [c, w] : cur)
      for (const auto& [d, q] : seat_distribution(c, p)) next[d] += w * q;
    cur = std::move(next);
  }
  return ExactLaw{n, std::move(cur)};
}

double check_sampling_consistency(int n, const CrpParams& p) {
  if (n < 1) throw std::invalid_argument("check_sampling_consistency: n must be positive");
  auto upper = exact_law(n + 1, p);
  Law pushed;
  for (const auto& [c, w] : upper.table)
    for (const auto& [d, q] : down_distribution(c)) pushed[d] += w * q;
  return tv_distance(pushed, exact_law(n, p).table);
}

Composition sample_from_law(const ExactLaw& law, Rng& rng) {
  double u = uniform01(rng) * law.total();
  const Composition* last = nullptr;
  for (const auto& [c, w] : law.table) {
    if (w <= 0.0) continue;
    last = &c;
    u -= w;
    if (u < 0.0) return c;
  }
  if (!last) throw std::invalid_argument("sample_from_law: empty law");
  return *last;
}

OcrpSampler::OcrpSampler(const CrpParams& p, std::size_t reserve) : p_(p) {
  p_.validate();
  const double s = p.theta1 + p.theta2;
  right_share_ = s > 0.0 ? p.theta2 / s : 0.5;
  const double prop_right = right_share_ * p.alpha;
  const double prop_left = (1.0 - right_share_) * p.alpha;
  if (p.theta2 >= prop_right)
    extra_right_ = p.theta2 - prop_right;
  else
    accept_right_ = p.theta2 / prop_right;
  if (p.theta1 >= prop_left)
    extra_left_ = p.theta1 - prop_left;
  else
    accept_left_ = p.theta1 / prop_left;
  size_.reserve(reserve);
  next_.reserve(reserve);
  prev_.reserve(reserve);
  table_of_.reserve(reserve);
  head_ = tail_ = new_table(-1, -1);
}

int OcrpSampler::new_table(int before, int after) {
  const int id = static_cast<int>(size_.size());
  size_.push_back(1);
  prev_.push_back(before);
  next_.push_back(after);
  if (before >= 0) next_[before] = id;
  if (after >= 0) prev_[after] = id;
  if (before < 0) head_ = id;
  if (after < 0) tail_ = id;
  table_of_.push_back(id);
  ++tables_;
  return id;
}

void OcrpSampler::seat(Rng& rng) {
  const double n = static_cast<double>(table_of_.size());
  const double total = n + extra_left_ + extra_right_;
  for (;;) {
    const double u = uniform01(rng) * total;
    if (u >= n) {
      if (u < n + extra_left_)
        new_table(-1, head_);
      else
        new_table(tail_, -1);
      return;
    }
    const std::size_t c = std::min(static_cast<std::size_t>(u), table_of_.size() - 1);
    const int t = table_of_[c];
    if (uniform01(rng) * size_[t] >= p_.alpha) {
      ++size_[t];
      table_of_.push_back(t);
      return;
    }
    if (uniform01(rng) < right_share_) {
      if (t == tail_ && uniform01(rng) >= accept_right_) continue;
      new_table(t, next_[t]);
    } else {
      if (t == head_ && uniform01(rng) >= accept_left_) continue;
      new_table(prev_[t], t);
    }
    return;
  }
}

void OcrpSampler::grow_to(std::size_t n, Rng& rng) {
  while (table_of_.size() < n) seat(rng);
}

Composition OcrpSampler::composition() const {
  std::vector<int> parts;
  parts.reserve(tables_);
  for (int t = head_; t >= 0; t = next_[t]) parts.push_back(size_[t]);
  return Composition(std::move(parts));
}

Composition sample_ocrp(int n, const CrpParams& p, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_ocrp: n must be positive");
  OcrpSampler s(p, static_cast<std::size_t>(n));
  s.grow_to(static_cast<std::size_t>(n), rng);
  return s.composition();
}

IntervalPartition sample_pdip(const CrpParams& p, int resolution, Rng& rng) {
  if (resolution < 1) throw std::invalid_argument("sample_pdip: resolution must be positive");
  auto c = sample_ocrp(resolution, p, rng);
  return scale(1.0 / resolution, composition_to_partition(c));
}

IntervalPartition structural_pdip(const CrpParams& p, int resolution, Rng& rng) {
  p.validate();
  if (resolution < 1) throw std::invalid_argument("structural_pdip: resolution must be positive");
  // (B1, B0, B2) ~ Dir(theta1, 1 - alpha, theta2) drives a three-colour urn; the
  // first customer sits in the middle block, the other resolution - 1 are
  // multinomial given B. The outer parts are oCRP(theta1, alpha) and the
  // reversal of oCRP(theta2, alpha) at their urn counts.
  auto b = sample_dirichlet(rng, {p.theta1, 1.0 - p.alpha, p.theta2});
  int rest = resolution - 1;
  int n1 = 0, n2 = 0;
  if (rest > 0 && b[0] > 0.0) n1 = std::binomial_distribution<int>(rest, std::min(1.0, b[0]))(rng);
  rest -= n1;
  const double tail = b[1] + b[2];
  if (rest > 0 && b[2] > 0.0) n2 = std::binomial_distribution<int>(rest, std::min(1.0, b[2] / tail))(rng);
  const int n0 = resolution - n1 - n2;
  std::vector<Composition> parts;
  if (n1 > 0) parts.push_back(sample_ocrp(n1, {p.alpha, p.theta1, p.alpha}, rng));
  parts.push_back(Composition{n0});
  if (n2 > 0) parts.push_back(reverse(sample_ocrp(n2, {p.alpha, p.theta2, p.alpha}, rng)));
  return scale(1.0 / resolution, composition_to_partition(concatenate(parts)));
}

Composition paintbox(const IntervalPartition& gamma, int n, Rng& rng) {
  if (std::abs(gamma.total_mass() - 1.0) > 1e-9) throw std::invalid_argument("paintbox: total mass must be 1");
  if (n < 0) throw std::invalid_argument("paintbox: n must be nonnegative");
  const auto& blocks = gamma.blocks();
  // Keyed by position; points outside every block are singletons.
  std::map<double, int> counts;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    auto it = std::upper_bound(blocks.begin(), blocks.end(), u, [](double v, const Block& b) { return v < b.right; });
    if (it != blocks.end() && it->left <= u)
      ++counts[it->left];
    else
      counts[u] = 1;
  }
  std::vector<int> parts;
  for (const auto& [k, v] : counts) parts.push_back(v);
  return Composition(std::move(parts));
}

std::vector<double> sample_gem(double alpha, double theta, Rng& rng, double tol) {
  if (!(theta > -alpha)) throw std::invalid_argument("sample_gem: theta must exceed -alpha");
  std::vector<double> sticks;
  double residual = 1.0;
  for (int i = 1; residual >= tol; ++i) {
    const double w = sample_beta(rng, 1.0 - alpha, theta + i * alpha);
    sticks.push_back(residual * w);
    residual *= 1.0 - w;
  }
  return sticks;
}

std::vector<double> sample_pd_ranked(double alpha, double theta, std::size_t k, Rng& rng) {
  if (!(theta > -alpha)) throw std::invalid_argument("sample_pd_ranked: theta must exceed -alpha");
  if (k == 0) throw std::invalid_argument("sample_pd_ranked: k must be positive");
  std::vector<double> top(k, 0.0);  // decreasing
  double residual = 1.0;
  // Later sticks are bounded by the residual, so the top k are final once it
  // drops below the current k-th largest.
  for (int i = 1; residual >= 1e-8 && residual > top.back(); ++i) {
    const double w = sample_beta(rng, 1.0 - alpha, theta + i * alpha);
    const double stick = residual * w;
    residual *= 1.0 - w;
    if (stick > top.back()) {
      auto pos = std::upper_bound(top.begin(), top.end(), stick, std::greater<>());
      top.insert(pos, stick);
      top.pop_back();
    }
  }
  return top;
}

}  // namespace crplab
