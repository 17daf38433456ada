#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crplab/acceptance.hpp"
#include "crplab/nested.hpp"
#include "crplab/ocrp.hpp"
#include "crplab/pcrp.hpp"
#include "crplab/scaffold.hpp"
#include "crplab/tree.hpp"
#include "crplab/updown.hpp"

namespace py = pybind11;
using namespace crplab;

namespace {

using Parts = std::vector<int>;
using Blocks = std::vector<std::pair<double, double>>;

CrpParams params(double alpha, double theta1, double theta2) {
  CrpParams p{alpha, theta1, theta2};
  p.validate();
  return p;
}

py::dict law_dict(const ExactLaw& law) {
  py::dict out;
  for (const auto& [c, v] : law.table) out[py::tuple(py::cast(c.parts()))] = v;
  return out;
}

Blocks blocks(const IntervalPartition& b) {
  Blocks out;
  for (const auto& x : b.blocks()) out.emplace_back(x.left, x.right);
  return out;
}

IntervalPartition partition(const Blocks& b, double mass) {
  std::vector<Block> v;
  for (auto [l, r] : b) v.push_back({l, r});
  return IntervalPartition(std::move(v), mass);
}

py::dict report_dict(const TestReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["n_samples"] = r.n_samples;
  d["pass"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_crplab, m) {
  m.doc() = "two-sided ordered Chinese restaurant processes";

  m.def("exact_law", [](int n, double a, double t1, double t2) { return law_dict(exact_law(n, params(a, t1, t2))); },
        py::arg("n"), py::arg("alpha"), py::arg("theta1"), py::arg("theta2"));
  m.def(
      "bruteforce_law",
      [](int n, double a, double t1, double t2) { return law_dict(enumerate_bruteforce_law(n, params(a, t1, t2))); },
      py::arg("n"), py::arg("alpha"), py::arg("theta1"), py::arg("theta2"));
  m.def(
      "sampling_consistency",
      [](int n, double a, double t1, double t2) { return check_sampling_consistency(n, params(a, t1, t2)); },
      py::arg("n"), py::arg("alpha"), py::arg("theta1"), py::arg("theta2"));
  m.def(
      "sample_ocrp",
      [](int n, double a, double t1, double t2, std::uint64_t seed) {
        Rng rng(seed);
        return sample_ocrp(n, params(a, t1, t2), rng).parts();
      },
      py::arg("n"), py::arg("alpha"), py::arg("theta1"), py::arg("theta2"), py::arg("seed"));
  m.def(
      "sample_pdip",
      [](double a, double t1, double t2, int resolution, std::uint64_t seed, bool structural) {
        Rng rng(seed);
        auto p = params(a, t1, t2);
        return blocks(structural ? structural_pdip(p, resolution, rng) : sample_pdip(p, resolution, rng));
      },
      py::arg("alpha"), py::arg("theta1"), py::arg("theta2"), py::arg("resolution"), py::arg("seed"),
      py::arg("structural") = false);
  m.def(
      "hausdorff",
      [](const Blocks& a, double ma, const Blocks& b, double mb) {
        return hausdorff_distance(partition(a, ma), partition(b, mb));
      },
      py::arg("a"), py::arg("mass_a"), py::arg("b"), py::arg("mass_b"));
  m.def("scale_function", &scale_function, py::arg("k"), py::arg("theta"));
  m.def("hit_probability", &hit_probability_exact, py::arg("k"), py::arg("theta"));
  m.def(
      "simulate_updown",
      [](int k, double theta, double horizon, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::pair<double, int>> out{{0.0, k}};
        for (auto& e : simulate_updown(k, theta, horizon, rng).events) out.emplace_back(e.time, e.state);
        return out;
      },
      py::arg("k"), py::arg("theta"), py::arg("horizon"), py::arg("seed"));
  m.def(
      "simulate_pcrp",
      [](const Parts& start, double a, double t1, double t2, double horizon, std::uint64_t seed) {
        Rng rng(seed);
        auto path = simulate_pcrp(Composition(start), params(a, t1, t2), horizon, false, rng);
        std::vector<std::pair<double, Parts>> out{{0.0, start}};
        for (auto& e : path.events) out.emplace_back(e.time, e.state.parts());
        return out;
      },
      py::arg("start"), py::arg("alpha"), py::arg("theta1"), py::arg("theta2"), py::arg("horizon"), py::arg("seed"));
  m.def(
      "pcrp_via_clades",
      [](const Parts& start, double alpha, const std::vector<double>& levels, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<Parts> out;
        for (auto& c : pcrp_via_clades(Composition(start), alpha, levels, rng).states) out.push_back(c.parts());
        return out;
      },
      py::arg("start"), py::arg("alpha"), py::arg("levels"), py::arg("seed"));
  m.def(
      "nested_ocrp",
      [](int n, std::tuple<double, double, double> coarse, std::tuple<double, double, double> fine,
         std::uint64_t seed) {
        Rng rng(seed);
        auto [ca, c1, c2] = coarse;
        auto [fa, f1, f2] = fine;
        auto pr = nested_ocrp(n, params(ca, c1, c2), params(fa, f1, f2), rng);
        return std::pair{pr.coarse.parts(), pr.fine.parts()};
      },
      py::arg("n"), py::arg("coarse"), py::arg("fine"), py::arg("seed"));
  m.def(
      "fragmentation_identity",
      [](std::tuple<double, double, double> coarse, std::tuple<double, double, double> fine, std::size_t reps,
         int resolution, std::uint64_t seed) {
        auto [ca, c1, c2] = coarse;
        auto [fa, f1, f2] = fine;
        py::list out;
        for (auto& r : check_fragmentation_identity(params(ca, c1, c2), params(fa, f1, f2), reps, resolution, seed))
          out.append(report_dict(r));
        return out;
      },
      py::arg("coarse"), py::arg("fine"), py::arg("reps"), py::arg("resolution"), py::arg("seed"));
  m.def(
      "spinal_decomposition",
      [](int n, double alpha, double gamma, std::uint64_t seed) {
        Rng rng(seed);
        auto [c, f] = spinal_decomposition(grow_tree_to(n, alpha, gamma, rng));
        return std::pair{c.parts(), f.parts()};
      },
      py::arg("n"), py::arg("alpha"), py::arg("gamma"), py::arg("seed"));
  m.def(
      "acceptance",
      [](std::uint64_t seed, const std::vector<std::string>& only) {
        std::vector<CriterionResult> res;
        {
          py::gil_scoped_release release;
          res = run_full_acceptance({seed, only});
        }
        return summary_json(res).dump();
      },
      py::arg("seed"), py::arg("only") = std::vector<std::string>{});
}
