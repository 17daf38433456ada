#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <vector>

#include "crplab/partition.hpp"
#include "crplab/rng.hpp"

namespace crplab {

struct CrpParams {
  double alpha = 0.5;
  double theta1 = 0.0;
  double theta2 = 0.0;

  double theta() const { return theta1 + theta2 - alpha; }
  void validate() const;
};

using Law = std::map<Composition, double>;

struct ExactLaw {
  int n = 0;
  Law table;
  double total() const;
  void write_csv(std::ostream& os) const;
};

// A seat is either an existing table (join) or a new table inserted before
// position `index` (0 = leftmost, size() = rightmost).
struct SeatChoice {
  bool join = false;
  std::size_t index = 0;
};

// n + theta computed term by term from the rule's weights.
double seating_total(int n, std::size_t k, const CrpParams& p);

SeatChoice choose_seat(const std::vector<int>& parts, int n, const CrpParams& p, Rng& rng);
void apply_seat(std::vector<int>& parts, const SeatChoice& s);
// Removes a uniform customer; returns the index of the table it left.
std::size_t remove_uniform_customer(std::vector<int>& parts, int n, Rng& rng);

Composition seat_next(const Composition& c, const CrpParams& p, Rng& rng);
Composition down_step(const Composition& c, Rng& rng);

// One-step transition laws.
Law seat_distribution(const Composition& c, const CrpParams& p);
Law down_distribution(const Composition& c);

double decrement(int n, int m, double theta2, double alpha);
double dirichlet_multinomial(int n, int n1, int n0, int n2, const CrpParams& p);

inline constexpr int kMaxExactN = 9;
inline constexpr int kMaxBruteforceN = 7;

std::vector<Composition> compositions_of(int n);
ExactLaw exact_law(int n, const CrpParams& p);
ExactLaw enumerate_bruteforce_law(int n, const CrpParams& p);
double check_sampling_consistency(int n, const CrpParams& p);
Composition sample_from_law(const ExactLaw& law, Rng& rng);

// O(1)-per-customer oCRP sampler: a uniform customer proposes its own table or
// an adjacent gap; end weights are corrected by rejection or an extra bucket.
class OcrpSampler {
 public:
  explicit OcrpSampler(const CrpParams& p, std::size_t reserve = 0);
  void seat(Rng& rng);
  void grow_to(std::size_t n, Rng& rng);
  std::size_t customers() const { return table_of_.size(); }
  std::size_t tables() const { return tables_; }
  Composition composition() const;

 private:
  int new_table(int before, int after);

  CrpParams p_;
  double right_share_;
  double accept_left_ = 1.0, accept_right_ = 1.0;
  double extra_left_ = 0.0, extra_right_ = 0.0;
  std::vector<int> size_, next_, prev_, table_of_;
  int head_ = -1, tail_ = -1;
  std::size_t tables_ = 0;
};

Composition sample_ocrp(int n, const CrpParams& p, Rng& rng);

IntervalPartition sample_pdip(const CrpParams& p, int resolution, Rng& rng);
IntervalPartition structural_pdip(const CrpParams& p, int resolution, Rng& rng);
Composition paintbox(const IntervalPartition& gamma, int n, Rng& rng);

// GEM(alpha, theta) sticks, stopped once the residual is below `tol`.
std::vector<double> sample_gem(double alpha, double theta, Rng& rng, double tol = 1e-8);
std::vector<double> sample_pd_ranked(double alpha, double theta, std::size_t k, Rng& rng);

}  // namespace crplab
