#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crplab/rng.hpp"

namespace crplab {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_samples = 0;
  double df = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string note;
};

void to_json(nlohmann::json& j, const TestReport& r);

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

TestReport ks_two_sample(std::vector<double> xs, std::vector<double> ys);
TestReport ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);
// sup over x <= upper only; values above `upper` (possibly +inf) count towards
// n but are never compared. The Kolmogorov p-value is conservative here.
TestReport ks_one_sample_restricted(std::vector<double> xs, const std::function<double(double)>& cdf, double upper);

// Pearson goodness of fit; categories with expected count below `min_expected`
// are pooled (smallest first) until every bin reaches it.
TestReport chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                          double min_expected = 5.0);

// Homogeneity test on a 2 x K contingency table, with the same pooling rule.
TestReport chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                 double min_expected = 5.0);

// Sum of independent Pearson statistics; df are added.
TestReport combine_chi_square(const std::vector<TestReport>& parts);

double chi_square_survival(double stat, double df);

template <class Key>
double tv_distance(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) s += std::abs(v);
  return 0.5 * s;
}

double sample_gamma(Rng& rng, double shape, double rate = 1.0);
// log of a Gamma(shape,1) variate; accurate for very small shapes.
double sample_log_gamma(Rng& rng, double shape);
double sample_beta(Rng& rng, double a, double b);
// Extended convention: zero parameters give zero coordinates.
std::vector<double> sample_dirichlet(Rng& rng, const std::vector<double>& params);

double gamma_cdf(double x, double shape, double rate);

}  // namespace crplab
