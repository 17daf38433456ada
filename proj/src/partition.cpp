#include "crplab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace crplab {

namespace {
constexpr double kTol = 1e-12;
}

IntervalPartition::IntervalPartition(std::vector<Block> blocks, double total_mass)
    : blocks_(std::move(blocks)), mass_(total_mass) {
  if (!(mass_ >= 0.0)) throw std::invalid_argument("IntervalPartition: negative total mass");
  double prev = 0.0;
  for (const auto& b : blocks_) {
    if (!(b.right - b.left > 0.0)) throw std::invalid_argument("IntervalPartition: empty block");
    if (b.left < prev - kTol) throw std::invalid_argument("IntervalPartition: blocks overlap or unordered");
    prev = b.right;
  }
  if (prev > mass_ + kTol * std::max(1.0, mass_))
    throw std::invalid_argument("IntervalPartition: block beyond total mass");
}

IntervalPartition IntervalPartition::from_lengths(const std::vector<double>& lengths) {
  std::vector<Block> blocks;
  blocks.reserve(lengths.size());
  double s = 0.0;
  for (double l : lengths) {
    if (l <= 0.0) continue;
    blocks.push_back({s, s + l});
    s += l;
  }
  return IntervalPartition(std::move(blocks), s);
}

std::vector<double> IntervalPartition::lengths() const {
  std::vector<double> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.length());
  return out;
}

std::vector<double> IntervalPartition::partition_points() const {
  std::vector<double> pts{0.0, mass_};
  for (const auto& b : blocks_) {
    pts.push_back(b.left);
    pts.push_back(b.right);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Composition::Composition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (int p : parts_)
    if (p < 1) throw std::invalid_argument("Composition: parts must be positive");
}

int Composition::n() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

std::string Composition::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(parts_[i]);
  }
  return s;
}

Composition Composition::parse(const std::string& s) {
  std::vector<int> parts;
  if (s.empty() || s == "empty") return Composition{};
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, '|')) {
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("Composition::parse: bad token '" + tok + "'");
    parts.push_back(v);
  }
  return Composition(std::move(parts));
}

namespace {

double directed_distance(const std::vector<double>& from, const std::vector<double>& to) {
  double d = 0.0;
  for (double x : from) {
    auto it = std::lower_bound(to.begin(), to.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != to.end()) best = *it - x;
    if (it != to.begin()) best = std::min(best, x - *(it - 1));
    d = std::max(d, best);
  }
  return d;
}

}  // namespace

double hausdorff_distance(const IntervalPartition& a, const IntervalPartition& b) {
  auto ga = a.partition_points();
  auto gb = b.partition_points();
  return std::max(directed_distance(ga, gb), directed_distance(gb, ga));
}

IntervalPartition scale(double c, const IntervalPartition& beta) {
  if (!(c > 0.0)) throw std::invalid_argument("scale: factor must be positive");
  std::vector<Block> blocks;
  blocks.reserve(beta.size());
  for (const auto& b : beta.blocks())
    if (c * b.right > c * b.left) blocks.push_back({c * b.left, c * b.right});
  return IntervalPartition(std::move(blocks), c * beta.total_mass());
}

IntervalPartition concatenate(const std::vector<IntervalPartition>& parts) {
  std::vector<Block> blocks;
  double offset = 0.0;
  for (const auto& p : parts) {
    // Blocks narrower than the spacing of doubles at `offset` vanish.
    for (const auto& b : p.blocks())
      if (offset + b.right > offset + b.left) blocks.push_back({offset + b.left, offset + b.right});
    offset += p.total_mass();
  }
  return IntervalPartition(std::move(blocks), offset);
}

IntervalPartition reverse(const IntervalPartition& beta) {
  const double m = beta.total_mass();
  std::vector<Block> blocks;
  blocks.reserve(beta.size());
  for (auto it = beta.blocks().rbegin(); it != beta.blocks().rend(); ++it)
    blocks.push_back({m - it->right, m - it->left});
  return IntervalPartition(std::move(blocks), m);
}

IntervalPartition composition_to_partition(const Composition& c) {
  std::vector<Block> blocks;
  blocks.reserve(c.size());
  double s = 0.0;
  for (int p : c.parts()) {
    blocks.push_back({s, s + p});
    s += p;
  }
  return IntervalPartition(std::move(blocks), s);
}

Composition concatenate(const std::vector<Composition>& parts) {
  std::vector<int> out;
  for (const auto& p : parts) out.insert(out.end(), p.parts().begin(), p.parts().end());
  return Composition(std::move(out));
}

Composition reverse(const Composition& c) {
  return Composition(std::vector<int>(c.parts().rbegin(), c.parts().rend()));
}

std::vector<double> ranked_masses(const IntervalPartition& beta, std::size_t k) {
  if (k == 0) throw std::invalid_argument("ranked_masses: k must be at least 1");
  auto len = beta.lengths();
  std::vector<double> out(k, 0.0);
  std::size_t m = std::min(k, len.size());
  std::partial_sort(len.begin(), len.begin() + m, len.end(), std::greater<>());
  std::copy(len.begin(), len.begin() + m, out.begin());
  return out;
}

bool refines(const IntervalPartition& fine, const IntervalPartition& coarse, double tol) {
  if (std::abs(fine.total_mass() - coarse.total_mass()) > tol) return false;
  auto gf = fine.partition_points();
  for (double x : coarse.partition_points()) {
    auto it = std::lower_bound(gf.begin(), gf.end(), x - tol);
    if (it == gf.end() || *it > x + tol) return false;
  }
  return true;
}

bool refines(const Composition& fine, const Composition& coarse) {
  return refines(composition_to_partition(fine), composition_to_partition(coarse), 0.0);
}

void to_json(nlohmann::json& j, const IntervalPartition& p) {
  j = nlohmann::json::array();
  for (const auto& b : p.blocks()) j.push_back({b.left, b.right});
  const double end = p.blocks().empty() ? 0.0 : p.blocks().back().right;
  if (end != p.total_mass())
    j = nlohmann::json{{"blocks", j}, {"total_mass", p.total_mass()}};
}

void from_json(const nlohmann::json& j, IntervalPartition& p) {
  const nlohmann::json& arr = j.is_object() ? j.at("blocks") : j;
  std::vector<Block> blocks;
  for (const auto& b : arr) blocks.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  double mass = j.is_object() ? j.at("total_mass").get<double>() : (blocks.empty() ? 0.0 : blocks.back().right);
  p = IntervalPartition(std::move(blocks), mass);
}

void to_json(nlohmann::json& j, const Composition& c) { j = c.parts(); }

void from_json(const nlohmann::json& j, Composition& c) { c = Composition(j.get<std::vector<int>>()); }

}  // namespace crplab
