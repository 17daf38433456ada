#include "crplab/stats.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace crplab {

namespace {

constexpr double kDefaultFloor = 0.01;

struct Bin {
  double observed = 0.0;
  double expected = 0.0;
};

}  // namespace

void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"name", r.name},           {"statistic", r.statistic}, {"p_value", r.p_value},
                     {"n_samples", r.n_samples}, {"pass", r.pass},           {"seed", r.seed}};
  if (r.df > 0) j["df"] = r.df;
  if (!r.note.empty()) j["note"] = r.note;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestReport ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 10 || ys.size() < 10) throw std::invalid_argument("ks_two_sample: samples too small");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  TestReport r;
  r.name = "ks_two_sample";
  r.statistic = d;
  r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  r.n_samples = xs.size() + ys.size();
  r.pass = r.p_value > kDefaultFloor;
  return r;
}

TestReport ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.size() < 10) throw std::invalid_argument("ks_one_sample: sample too small");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  TestReport r;
  r.name = "ks_one_sample";
  r.statistic = d;
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  r.n_samples = xs.size();
  r.pass = r.p_value > kDefaultFloor;
  return r;
}

TestReport ks_one_sample_restricted(std::vector<double> xs, const std::function<double(double)>& cdf,
                                     double upper) {
  if (xs.size() < 10) throw std::invalid_argument("ks_one_sample_restricted: sample too small");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  for (; i < xs.size() && xs[i] <= upper; ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  if (std::isfinite(upper)) d = std::max(d, std::abs(cdf(upper) - i / n));
  const double sn = std::sqrt(n);
  TestReport r;
  r.name = "ks_one_sample_restricted";
  r.statistic = d;
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  r.n_samples = xs.size();
  r.pass = r.p_value > kDefaultFloor;
  return r;
}

double chi_square_survival(double stat, double df) {
  if (df <= 0) throw std::invalid_argument("chi_square_survival: df must be positive");
  if (!std::isfinite(stat)) return 0.0;
  if (stat <= 0) return 1.0;
  return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

namespace {

// Pools bins sorted by `weight` ascending until each reaches `threshold`.
std::vector<std::vector<std::size_t>> pool_categories(const std::vector<double>& weight, double threshold) {
  std::vector<std::size_t> order(weight.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weight[a] < weight[b]; });
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> cur;
  double acc = 0.0;
  for (auto k : order) {
    cur.push_back(k);
    acc += weight[k];
    if (acc >= threshold) {
      groups.push_back(std::move(cur));
      cur.clear();
      acc = 0.0;
    }
  }
  if (!cur.empty()) {
    if (groups.empty())
      groups.push_back(std::move(cur));
    else
      groups.back().insert(groups.back().end(), cur.begin(), cur.end());
  }
  return groups;
}

}  // namespace

TestReport chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                          double min_expected) {
  if (observed.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double psum = std::accumulate(probs.begin(), probs.end(), 0.0);
  TestReport r;
  r.name = "chi_square_gof";
  r.n_samples = static_cast<std::size_t>(total);
  std::vector<double> expected(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    expected[k] = total * probs[k] / psum;
    if (expected[k] <= 0.0 && observed[k] > 0.0) {
      r.statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
      r.note = "observation in a zero-probability category";
      return r;
    }
  }
  auto groups = pool_categories(expected, min_expected);
  if (groups.size() < 2) throw std::invalid_argument("chi_square_gof: degenerate pooling");
  double stat = 0.0;
  for (const auto& g : groups) {
    Bin b;
    for (auto k : g) {
      b.observed += observed[k];
      b.expected += expected[k];
    }
    stat += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  }
  r.statistic = stat;
  r.df = static_cast<double>(groups.size() - 1);
  r.p_value = chi_square_survival(stat, r.df);
  r.pass = r.p_value > kDefaultFloor;
  return r;
}

TestReport chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                 double min_expected) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  const double n = na + nb;
  std::vector<double> weight(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) weight[k] = (a[k] + b[k]) * std::min(na, nb) / n;
  auto groups = pool_categories(weight, min_expected);
  if (groups.size() < 2) throw std::invalid_argument("chi_square_two_sample: degenerate pooling");
  double stat = 0.0;
  for (const auto& g : groups) {
    double oa = 0.0, ob = 0.0;
    for (auto k : g) {
      oa += a[k];
      ob += b[k];
    }
    double t = oa + ob;
    double ea = t * na / n, eb = t * nb / n;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  TestReport r;
  r.name = "chi_square_two_sample";
  r.statistic = stat;
  r.df = static_cast<double>(groups.size() - 1);
  r.p_value = chi_square_survival(stat, r.df);
  r.n_samples = static_cast<std::size_t>(n);
  r.pass = r.p_value > kDefaultFloor;
  return r;
}

TestReport combine_chi_square(const std::vector<TestReport>& parts) {
  TestReport r;
  r.name = "chi_square_combined";
  for (const auto& p : parts) {
    r.statistic += p.statistic;
    r.df += p.df;
    r.n_samples += p.n_samples;
  }
  r.p_value = r.df > 0 ? chi_square_survival(r.statistic, r.df) : 1.0;
  r.pass = r.p_value > kDefaultFloor;
  return r;
}

double sample_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("sample_gamma: invalid parameters");
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

double sample_log_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_log_gamma: invalid shape");
  if (shape >= 1.0) return std::log(sample_gamma(rng, shape));
  return std::log(sample_gamma(rng, shape + 1.0)) + std::log(uniform_open(rng)) / shape;
}

double sample_beta(Rng& rng, double a, double b) {
  if (a < 0.0 || b < 0.0 || (a == 0.0 && b == 0.0)) throw std::invalid_argument("sample_beta: invalid parameters");
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 1.0;
  double la = sample_log_gamma(rng, a);
  double lb = sample_log_gamma(rng, b);
  return 1.0 / (1.0 + std::exp(lb - la));
}

std::vector<double> sample_dirichlet(Rng& rng, const std::vector<double>& params) {
  std::vector<double> logs(params.size(), -std::numeric_limits<double>::infinity());
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i] < 0.0) throw std::invalid_argument("sample_dirichlet: negative parameter");
    if (params[i] > 0.0) {
      logs[i] = sample_log_gamma(rng, params[i]);
      mx = std::max(mx, logs[i]);
      any = true;
    }
  }
  std::vector<double> out(params.size(), 0.0);
  if (!any) {
    // Dir(0) is the point mass at 1 in the single-coordinate case.
    if (params.size() == 1) out[0] = 1.0;
    else throw std::invalid_argument("sample_dirichlet: all parameters zero");
    return out;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i] > 0.0) {
      out[i] = std::exp(logs[i] - mx);
      s += out[i];
    }
  }
  for (auto& v : out) v /= s;
  return out;
}

double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, rate * x);
}

}  // namespace crplab
