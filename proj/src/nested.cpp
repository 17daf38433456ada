#include "crplab/nested.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace crplab {

namespace {

void require_identity(double lhs, double rhs, const char* what) {
  if (std::abs(lhs - rhs) > 1e-12) throw std::invalid_argument(what);
}

double largest_block(const IntervalPartition& b) { return ranked_masses(b, 1)[0]; }

double first_block(const IntervalPartition& b) { return b.blocks().empty() ? 0.0 : b.blocks().front().length(); }

}  // namespace

IntervalPartition frag(const IntervalPartition& beta, const CrpParams& p, int resolution, Rng& rng) {
  p.validate();
  if (resolution < 1) throw std::invalid_argument("frag: resolution must be positive");
  std::vector<Block> blocks;
  const double total = beta.total_mass();
  for (const auto& b : beta.blocks()) {
    const double len = b.length();
    const int r = std::max(1, static_cast<int>(std::lround(resolution * len / total)));
    IntervalPartition piece = structural_pdip(p, r, rng);
    const double pm = piece.total_mass();
    for (const auto& q : piece.blocks()) {
      const double l = b.left + len * q.left / pm;
      const double rr = q.right >= pm ? b.right : std::min(b.right, b.left + len * q.right / pm);
      // Pieces below double resolution inside a tiny block are dropped.
      if (rr > l && (blocks.empty() || l >= blocks.back().right)) blocks.push_back({l, rr});
    }
  }
  return IntervalPartition(std::move(blocks), total);
}

NestedCompositions nested_ocrp(int n, const CrpParams& coarse, const CrpParams& fine, Rng& rng) {
  coarse.validate();
  fine.validate();
  require_identity(fine.theta1 + fine.theta2 + coarse.alpha, fine.alpha,
                   "nested_ocrp: need theta1 + theta2 + alpha_bar = alpha");
  if (n < 1) throw std::invalid_argument("nested_ocrp: n must be positive");
  std::vector<int> sizes{1};
  std::vector<std::vector<int>> clusters{{1}};
  for (int m = 1; m < n; ++m) {
    SeatChoice s = choose_seat(sizes, m, coarse, rng);
    if (s.join) {
      auto& c = clusters[s.index];
      apply_seat(c, choose_seat(c, sizes[s.index], fine, rng));
    } else {
      clusters.insert(clusters.begin() + static_cast<std::ptrdiff_t>(s.index), std::vector<int>{1});
    }
    apply_seat(sizes, s);
  }
  std::vector<int> f;
  for (const auto& c : clusters) f.insert(f.end(), c.begin(), c.end());
  return {Composition(std::move(sizes)), Composition(std::move(f))};
}

void NestedPcrpParams::validate() const {
  coarse().validate();
  fine.validate();
  require_identity(fine.theta1 + fine.theta2 - fine.alpha, -alpha_bar,
                   "nested_pcrp: need theta1 + theta2 - alpha = -alpha_bar");
}

NestedPcrpState::NestedPcrpState(const NestedCompositions& c0, const NestedPcrpParams& p) : p_(p) {
  p_.validate();
  if (!c0.valid()) throw std::invalid_argument("nested_pcrp: fine state does not refine coarse state");
  std::size_t j = 0;
  for (int m : c0.coarse.parts()) {
    std::vector<int> cl;
    int acc = 0;
    while (acc < m) {
      acc += c0.fine[j];
      cl.push_back(c0.fine[j++]);
    }
    clusters_.push_back(std::move(cl));
    cluster_mass_.push_back(m);
  }
  n_ = c0.coarse.n();
}

bool NestedPcrpState::step(Rng& rng) {
  const CrpParams coarse = p_.coarse();
  const double theta = coarse.theta();
  if (n_ == 0) {
    if (theta <= 0.0) return false;
    time_ += exponential(rng, theta);
    clusters_.assign(1, std::vector<int>{1});
    cluster_mass_.assign(1, 1);
    n_ = 1;
    return true;
  }
  const double rate = 2.0 * n_ + theta;
  time_ += exponential(rng, rate);
  if (uniform01(rng) * rate < n_ + theta) {
    SeatChoice s = choose_seat(cluster_mass_, n_, coarse, rng);
    if (s.join) {
      auto& c = clusters_[s.index];
      apply_seat(c, choose_seat(c, cluster_mass_[s.index], p_.fine, rng));
    } else {
      clusters_.insert(clusters_.begin() + static_cast<std::ptrdiff_t>(s.index), std::vector<int>{1});
    }
    apply_seat(cluster_mass_, s);
    ++n_;
  } else {
    std::uniform_int_distribution<int> pick(0, n_ - 1);
    int u = pick(rng);
    std::size_t i = 0;
    while (u >= cluster_mass_[i]) u -= cluster_mass_[i++];
    remove_uniform_customer(clusters_[i], cluster_mass_[i], rng);
    if (--cluster_mass_[i] == 0) {
      clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(i));
      cluster_mass_.erase(cluster_mass_.begin() + static_cast<std::ptrdiff_t>(i));
    }
    --n_;
  }
  return true;
}

NestedCompositions NestedPcrpState::pair() const {
  std::vector<int> f;
  for (const auto& c : clusters_) f.insert(f.end(), c.begin(), c.end());
  return {Composition(cluster_mass_), Composition(std::move(f))};
}

NestedPath nested_pcrp(const NestedCompositions& c0, const NestedPcrpParams& p, double horizon, Rng& rng,
                       std::uint64_t budget) {
  if (!(horizon > 0.0)) throw std::invalid_argument("nested_pcrp: horizon must be positive");
  NestedPath path{c0, horizon, {}};
  NestedPcrpState state(c0, p);
  std::uint64_t count = 0;
  for (;;) {
    NestedPcrpState next = state;
    if (!next.step(rng) || next.time() > horizon) break;
    if (++count > budget) throw BudgetExceeded("nested_pcrp: event budget exceeded");
    state = std::move(next);
    path.events.push_back({state.time(), state.pair()});
  }
  return path;
}

NestedCompositions nested_pcrp_state_at(const NestedCompositions& c0, const NestedPcrpParams& p, double t, Rng& rng,
                                        std::uint64_t budget) {
  NestedPcrpState state(c0, p);
  std::uint64_t count = 0;
  for (;;) {
    NestedPcrpState next = state;
    if (!next.step(rng) || next.time() > t) return state.pair();
    if (++count > budget) throw BudgetExceeded("nested_pcrp_state_at: event budget exceeded");
    state = std::move(next);
  }
}

std::vector<TestReport> check_fragmentation_identity(const CrpParams& coarse, const CrpParams& fine, std::size_t reps,
                                                     int resolution, std::uint64_t seed) {
  require_identity(fine.theta1 + fine.theta2 + coarse.alpha, fine.alpha,
                   "check_fragmentation_identity: need theta1 + theta2 + alpha_bar = alpha");
  const CrpParams target{fine.alpha, fine.theta1 + coarse.theta1, fine.theta2 + coarse.theta2};
  auto fragged = run_replicates(reps, seed, "frag/fragmented", [&](std::size_t, Rng& rng) {
    auto b = frag(structural_pdip(coarse, resolution, rng), fine, resolution, rng);
    return std::pair{largest_block(b), first_block(b)};
  });
  auto direct = run_replicates(reps, seed, "frag/direct", [&](std::size_t, Rng& rng) {
    auto b = structural_pdip(target, resolution, rng);
    return std::pair{largest_block(b), first_block(b)};
  });
  std::vector<double> a1, a2, b1, b2;
  for (auto& [x, y] : fragged) {
    a1.push_back(x);
    a2.push_back(y);
  }
  for (auto& [x, y] : direct) {
    b1.push_back(x);
    b2.push_back(y);
  }
  auto r1 = ks_two_sample(a1, b1);
  auto r2 = ks_two_sample(a2, b2);
  r1.name = "fragmentation_largest_block";
  r2.name = "fragmentation_first_block";
  r1.seed = r2.seed = seed;
  return {r1, r2};
}

std::vector<TestReport> check_nested_limit(const CrpParams& coarse, const CrpParams& fine, std::size_t reps,
                                           int resolution, std::uint64_t seed) {
  auto nested = run_replicates(reps, seed, "nested/ocrp", [&](std::size_t, Rng& rng) {
    auto pr = nested_ocrp(resolution, coarse, fine, rng);
    const double c = 1.0 / resolution;
    auto bc = scale(c, composition_to_partition(pr.coarse));
    auto bf = scale(c, composition_to_partition(pr.fine));
    return std::array<double, 3>{largest_block(bc), largest_block(bf), first_block(bf)};
  });
  auto kernel = run_replicates(reps, seed, "nested/frag", [&](std::size_t, Rng& rng) {
    auto bc = structural_pdip(coarse, resolution, rng);
    auto bf = frag(bc, fine, resolution, rng);
    return std::array<double, 3>{largest_block(bc), largest_block(bf), first_block(bf)};
  });
  const char* names[3] = {"nested_limit_coarse_largest", "nested_limit_fine_largest", "nested_limit_fine_first"};
  std::vector<TestReport> out;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> x, y;
    for (auto& v : nested) x.push_back(v[k]);
    for (auto& v : kernel) y.push_back(v[k]);
    auto r = ks_two_sample(x, y);
    r.name = names[k];
    r.seed = seed;
    out.push_back(r);
  }
  return out;
}

}  // namespace crplab
