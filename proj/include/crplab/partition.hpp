#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace crplab {

struct Block {
  double left = 0.0;
  double right = 0.0;
  double length() const { return right - left; }
  bool operator==(const Block&) const = default;
};

class IntervalPartition {
 public:
  IntervalPartition() = default;
  IntervalPartition(std::vector<Block> blocks, double total_mass);

  // Blocks laid end to end with the given lengths.
  static IntervalPartition from_lengths(const std::vector<double>& lengths);

  const std::vector<Block>& blocks() const { return blocks_; }
  double total_mass() const { return mass_; }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty() && mass_ == 0.0; }
  std::vector<double> lengths() const;

  // Block endpoints together with 0 and the total mass, sorted and deduplicated.
  std::vector<double> partition_points() const;

  bool operator==(const IntervalPartition&) const = default;

 private:
  std::vector<Block> blocks_;
  double mass_ = 0.0;
};

class Composition {
 public:
  Composition() = default;
  Composition(std::vector<int> parts);
  Composition(std::initializer_list<int> parts) : Composition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  std::vector<int>& mutable_parts() { return parts_; }
  int n() const;
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  int operator[](std::size_t i) const { return parts_[i]; }

  // "n1|n2|..." with "" for the empty composition.
  std::string to_string() const;
  static Composition parse(const std::string& s);

  auto operator<=>(const Composition&) const = default;
  bool operator==(const Composition&) const = default;

 private:
  std::vector<int> parts_;
};

double hausdorff_distance(const IntervalPartition& a, const IntervalPartition& b);
IntervalPartition scale(double c, const IntervalPartition& beta);
IntervalPartition concatenate(const std::vector<IntervalPartition>& parts);
IntervalPartition reverse(const IntervalPartition& beta);
IntervalPartition composition_to_partition(const Composition& c);
Composition concatenate(const std::vector<Composition>& parts);
Composition reverse(const Composition& c);
std::vector<double> ranked_masses(const IntervalPartition& beta, std::size_t k);

// Every partition point of `coarse` is a partition point of `fine` (within tol).
bool refines(const IntervalPartition& fine, const IntervalPartition& coarse, double tol = 1e-9);
bool refines(const Composition& fine, const Composition& coarse);

void to_json(nlohmann::json& j, const IntervalPartition& p);
void from_json(const nlohmann::json& j, IntervalPartition& p);
void to_json(nlohmann::json& j, const Composition& c);
void from_json(const nlohmann::json& j, Composition& c);

}  // namespace crplab
