#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "crplab/ocrp.hpp"
#include "crplab/stats.hpp"

using namespace crplab;

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
}

namespace {

template <class F>
void check_moments(F draw, double mean, double var, int n = 100000) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = draw();
    s += x;
    s2 += x * x;
  }
  double m = s / n;
  double v = s2 / n - m * m;
  CHECK(std::abs(m - mean) < 4.0 * std::sqrt(var / n));
  // Variance of the sample variance is bounded crudely by a 5% band here.
  CHECK(v == doctest::Approx(var).epsilon(0.05));
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("kolmogorov distribution reference values") {
    CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.2699996716).epsilon(1e-8));
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.0) == 1.0);
  }

  TEST_CASE("chi-square survival reference values") {
    CHECK(chi_square_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_survival(11.07049769351635, 5) == doctest::Approx(0.05).epsilon(1e-9));
  }

  TEST_CASE("ks two sample") {
    Rng rng(1);
    std::vector<double> x(10000), y(10000), z(10000);
    for (auto& v : x) v = uniform01(rng);
    for (auto& v : y) v = uniform01(rng);
    for (auto& v : z) v = 2.0 * uniform01(rng);
    CHECK(ks_two_sample(x, x).statistic == 0.0);
    CHECK(ks_two_sample(x, y).p_value > 0.001);
    CHECK(ks_two_sample(x, z).p_value < 1e-6);
    CHECK_THROWS(ks_two_sample({1, 2}, x));
  }

  TEST_CASE("ks p-values are uniform under the null") {
    Rng rng(2);
    std::vector<double> ps;
    for (int r = 0; r < 300; ++r) {
      std::vector<double> x(500), y(700);
      for (auto& v : x) v = uniform01(rng);
      for (auto& v : y) v = uniform01(rng);
      ps.push_back(ks_two_sample(x, y).p_value);
    }
    CHECK(ks_one_sample(ps, [](double p) { return std::clamp(p, 0.0, 1.0); }).p_value > 0.001);
  }

  TEST_CASE("chi-square goodness of fit") {
    std::vector<double> probs(6, 1.0 / 6.0);
    CHECK(chi_square_gof({100, 100, 100, 100, 100, 100}, probs).statistic == doctest::Approx(0.0));
    Rng rng(3);
    std::vector<double> fair(6, 0.0), biased(6, 0.0);
    for (int i = 0; i < 60000; ++i) {
      fair[std::uniform_int_distribution<int>(0, 5)(rng)] += 1;
      biased[uniform01(rng) < 0.2 ? 5 : std::uniform_int_distribution<int>(0, 5)(rng)] += 1;
    }
    CHECK(chi_square_gof(fair, probs).p_value > 0.001);
    CHECK(chi_square_gof(biased, probs).p_value < 1e-6);
    CHECK(chi_square_gof({5, 1}, {1.0, 0.0}).p_value == 0.0);
  }

  TEST_CASE("chi-square pooling and degenerate input") {
    auto r = chi_square_gof({50, 40, 1, 1, 0}, {0.5, 0.45, 0.02, 0.02, 0.01});
    CHECK(r.df == 1.0);
    CHECK_THROWS(chi_square_gof({3}, {1.0}));
  }

  TEST_CASE("chi-square two sample") {
    Rng rng(4);
    std::vector<double> a(4, 0), b(4, 0), c(4, 0);
    for (int i = 0; i < 20000; ++i) {
      a[std::uniform_int_distribution<int>(0, 3)(rng)] += 1;
      b[std::uniform_int_distribution<int>(0, 3)(rng)] += 1;
      c[uniform01(rng) < 0.1 ? 0 : std::uniform_int_distribution<int>(0, 3)(rng)] += 1;
    }
    CHECK(chi_square_two_sample(a, b).p_value > 0.001);
    CHECK(chi_square_two_sample(a, c).p_value < 1e-6);
    CHECK(chi_square_two_sample(a, a).statistic == 0.0);
  }

  TEST_CASE("tv distance") {
    Law p{{Composition{1}, 1.0}};
    Law q{{Composition{2}, 1.0}};
    CHECK(tv_distance(p, p) == 0.0);
    CHECK(tv_distance(p, q) == 1.0);
  }

  TEST_CASE("sampler moments") {
    Rng rng(5);
    check_moments([&] { return sample_gamma(rng, 2.5, 2.0); }, 1.25, 2.5 / 4.0);
    check_moments([&] { return sample_gamma(rng, 0.3, 1.0); }, 0.3, 0.3);
    check_moments([&] { return std::exp(sample_log_gamma(rng, 0.2)); }, 0.2, 0.2);
    check_moments([&] { return sample_beta(rng, 1.0, 1.0); }, 0.5, 1.0 / 12.0);
    check_moments([&] { return sample_beta(rng, 0.3, 2.0); }, 0.3 / 2.3, 0.3 * 2.0 / (2.3 * 2.3 * 3.3));
    check_moments([&] { return sample_dirichlet(rng, {0.5, 1.0, 1.5})[2]; }, 0.5, 0.5 * 1.5 / (9.0 * 4.0));
  }

  TEST_CASE("extended dirichlet convention") {
    Rng rng(6);
    CHECK(sample_dirichlet(rng, {1.0}) == std::vector<double>{1.0});
    CHECK(sample_dirichlet(rng, {0.0}) == std::vector<double>{1.0});
    for (int i = 0; i < 100; ++i) {
      auto d = sample_dirichlet(rng, {0.0, 0.5, 2.0});
      CHECK(d[0] == 0.0);
      CHECK(d[1] + d[2] == doctest::Approx(1.0));
    }
    CHECK(sample_beta(rng, 0.0, 1.0) == 0.0);
    CHECK(sample_beta(rng, 1.0, 0.0) == 1.0);
  }

  TEST_CASE("report json") {
    TestReport r{"x", 1.5, 0.2, 10, 0.0, true, 7, ""};
    nlohmann::json j = r;
    CHECK(j["p_value"] == 0.2);
    CHECK(j["pass"] == true);
    CHECK(j["seed"] == 7);
  }
}

TEST_SUITE("stats") {
  TEST_CASE("restricted ks") {
    Rng rng(7);
    std::vector<double> xs(20000);
    for (auto& v : xs) {
      v = exponential(rng, 1.0);
      if (v > 1.5) v = std::numeric_limits<double>::infinity();
    }
    auto cdf = [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); };
    CHECK(ks_one_sample_restricted(xs, cdf, 1.5).p_value > 0.001);
    auto wrong = [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-1.1 * x); };
    CHECK(ks_one_sample_restricted(xs, wrong, 1.5).p_value < 1e-6);
    // Unrestricted on an uncensored sample it agrees with the usual test.
    std::vector<double> ys(1000);
    for (auto& v : ys) v = exponential(rng, 1.0);
    CHECK(ks_one_sample_restricted(ys, cdf, kInfinity).statistic == ks_one_sample(ys, cdf).statistic);
  }
}
