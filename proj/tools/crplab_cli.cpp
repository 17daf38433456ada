#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "crplab/acceptance.hpp"
#include "crplab/nested.hpp"
#include "crplab/ocrp.hpp"
#include "crplab/pcrp.hpp"
#include "crplab/scaffold.hpp"
#include "crplab/tree.hpp"
#include "crplab/updown.hpp"

using namespace crplab;
using nlohmann::json;

namespace {

struct Params {
  double alpha = 0.5, theta1 = 0.3, theta2 = 0.7;
  double coarse_alpha = 0.25, coarse_theta1 = 0.3, coarse_theta2 = 0.25;
  double theta = 0.5;  // updown chain
  double gamma = 0.4;  // tree growth
  double time = 0.5;
  double horizon = 1.0;
  double cap = 2.0;
  int n = 5;
  int resolution = 10000;
  int replicates = 10000;
  int steps = 100;
  std::uint64_t seed = 1;
  std::string process = "pcrp";
  std::string from = "1";
  std::string experiment = "mass";
  std::string output;
  std::vector<int> ns{16, 64, 256};
  std::vector<std::string> only;
  std::string json_path;
  bool check = false;

  CrpParams crp() const { return {alpha, theta1, theta2}; }
  CrpParams coarse() const { return {coarse_alpha, coarse_theta1, coarse_theta2}; }
};

// Config keys and how to apply them; option names match the keys with '_' -> '-'.
using Setter = std::function<void(Params&, const std::string&)>;

template <class T>
Setter scalar(T Params::*field) {
  return [field](Params& p, const std::string& v) {
    std::istringstream in(v);
    T x{};
    in >> x;
    if (!in || !(in >> std::ws).eof()) throw std::invalid_argument("invalid value '" + v + "'");
    p.*field = x;
  };
}

Setter text(std::string Params::*field) {
  return [field](Params& p, const std::string& v) { p.*field = v; };
}

const std::map<std::string, Setter>& config_keys() {
  static const std::map<std::string, Setter> keys = {
      {"alpha", scalar(&Params::alpha)},
      {"theta1", scalar(&Params::theta1)},
      {"theta2", scalar(&Params::theta2)},
      {"coarse_alpha", scalar(&Params::coarse_alpha)},
      {"coarse_theta1", scalar(&Params::coarse_theta1)},
      {"coarse_theta2", scalar(&Params::coarse_theta2)},
      {"theta", scalar(&Params::theta)},
      {"gamma", scalar(&Params::gamma)},
      {"time", scalar(&Params::time)},
      {"horizon", scalar(&Params::horizon)},
      {"cap", scalar(&Params::cap)},
      {"n", scalar(&Params::n)},
      {"resolution", scalar(&Params::resolution)},
      {"replicates", scalar(&Params::replicates)},
      {"steps", scalar(&Params::steps)},
      {"seed", scalar(&Params::seed)},
      {"process", text(&Params::process)},
      {"from", text(&Params::from)},
      {"experiment", text(&Params::experiment)},
      {"output", text(&Params::output)},
      {"json", text(&Params::json_path)},
      {"ns",
       [](Params& p, const std::string& v) {
         std::vector<int> out;
         std::string list = v;
         std::replace(list.begin(), list.end(), ',', ' ');
         std::istringstream in(list);
         int x;
         while (in >> x) out.push_back(x);
         if (!in.eof() || out.empty()) throw std::invalid_argument("invalid value '" + v + "'");
         p.ns = out;
       }},
      {"only",
       [](Params& p, const std::string& v) {
         std::istringstream in(v);
         std::string tok;
         p.only.clear();
         while (in >> tok) p.only.push_back(tok);
       }},
  };
  return keys;
}

std::string option_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int finish_reports(const std::vector<TestReport>& reports, Output& out) {
  json j = reports;
  out.os() << j.dump(2) << '\n';
  for (const auto& r : reports)
    if (!r.pass) return 1;
  return 0;
}

TestReport with_threshold(TestReport r, std::string name) {
  r.name = std::move(name);
  r.pass = r.p_value > 0.01;
  return r;
}

int cmd_exact_law(const Params& p, bool brute) {
  auto law = brute ? enumerate_bruteforce_law(p.n, p.crp()) : exact_law(p.n, p.crp());
  Output out(p.output);
  law.write_csv(out.os());
  return 0;
}

int cmd_simulate(const Params& p) {
  Rng rng(p.seed);
  Output out(p.output);
  auto& os = out.os();
  os.precision(17);
  const Composition start = p.from == "empty" ? Composition{} : Composition::parse(p.from);
  if (p.process == "pcrp") {
    simulate_pcrp(start, p.crp(), p.horizon, false, rng).write_csv(os);
  } else if (p.process == "ocrp") {
    p.crp().validate();
    Composition c = start;
    os << "customers,composition\n" << c.n() << ',' << c.to_string() << '\n';
    while (c.n() < p.n) {
      c = c.empty() ? Composition{1} : seat_next(c, p.crp(), rng);
      os << c.n() << ',' << c.to_string() << '\n';
    }
  } else if (p.process == "updown") {
    if (start.size() != 1) throw std::invalid_argument("simulate: updown needs --from <k>");
    simulate_updown(start[0], p.theta, p.horizon, rng).write_csv(os);
  } else if (p.process == "clade") {
    if (start.size() != 1) throw std::invalid_argument("simulate: clade needs --from <m>");
    CladeOptions opts;
    if (std::isfinite(p.cap)) opts.level_cap = p.cap;
    auto c = sample_clade(start[0], p.alpha, rng, opts);
    os << clade_to_json(c.measure, c.scaffolding).dump(2) << '\n';
  } else {
    throw std::invalid_argument("simulate: unknown process '" + p.process + "'");
  }
  return 0;
}

int cmd_converge(const Params& p) {
  Output out(p.output);
  auto& os = out.os();
  os.precision(10);
  if (p.experiment == "mass") {
    // Z(2nt)/n from n against the Euler scheme for BESQ(2 theta) from 1.
    os << "n,ks_statistic,p_value\n";
    auto euler = run_replicates(p.replicates, p.seed, "converge/euler", [&](std::size_t, Rng& rng) {
      return besq_euler(1.0, 2.0 * p.theta, p.time, 1e-4, rng);
    });
    for (int n : p.ns) {
      auto xs = run_replicates(p.replicates, p.seed, "converge/mass" + std::to_string(n), [&](std::size_t, Rng& rng) {
        return updown_state_at(n, p.theta, 2.0 * n * p.time, rng) / double(n);
      });
      auto r = ks_two_sample(xs, euler);
      os << n << ',' << r.statistic << ',' << r.p_value << '\n';
    }
  } else if (p.experiment == "excursion") {
    os << "n,scaled_tail,target\n";
    const double target =
        std::pow(p.time, p.theta - 1.0) / (std::pow(2.0, 1.0 - p.theta) * std::tgamma(2.0 - p.theta));
    for (int n : p.ns) {
      auto alive = run_replicates(p.replicates, p.seed, "converge/exc" + std::to_string(n), [&](std::size_t, Rng& rng) {
        return static_cast<int>(std::isinf(updown_zero_time(1, p.theta, 2.0 * n * p.time, rng)));
      });
      double hits = 0.0;
      for (int a : alive) hits += a;
      const double scaled =
          std::tgamma(1.0 + p.theta) / (1.0 - p.theta) * std::pow(n, 1.0 - p.theta) * hits / p.replicates;
      os << n << ',' << scaled << ',' << target << '\n';
    }
  } else if (p.experiment == "entrance") {
    os << "n,ks_statistic,p_value\n";
    const auto law = besq_gamma_marginal(p.crp().theta(), p.time);
    for (int n : p.ns) {
      auto xs = run_replicates(p.replicates, p.seed, "converge/entr" + std::to_string(n), [&](std::size_t, Rng& rng) {
        return pcrp_state_at(Composition{1}, p.crp(), 2.0 * n * p.time, rng).n() / double(n);
      });
      auto r = ks_one_sample(xs, [&](double x) { return law.cdf(x); });
      os << n << ',' << r.statistic << ',' << r.p_value << '\n';
    }
  } else {
    throw std::invalid_argument("converge: unknown experiment '" + p.experiment + "'");
  }
  return 0;
}

int cmd_pseudostat(const Params& p) {
  const auto start = exact_law(p.n, p.crp());
  auto states = run_replicates(p.replicates, p.seed, "pseudostat", [&](std::size_t, Rng& rng) {
    return pcrp_state_at(sample_from_law(start, rng), p.crp(), p.time, rng);
  });
  std::map<int, std::map<Composition, double>> by_mass;
  for (auto& c : states)
    if (c.n() >= 2 && c.n() <= kMaxExactN) by_mass[c.n()][c] += 1;
  std::vector<TestReport> parts, reports;
  for (auto& [m, counts] : by_mass) {
    const auto law = exact_law(m, p.crp());
    std::vector<double> obs, probs;
    for (auto& [c, q] : law.table) {
      auto it = counts.find(c);
      obs.push_back(it == counts.end() ? 0.0 : it->second);
      probs.push_back(q);
    }
    auto r = chi_square_gof(obs, probs);
    parts.push_back(r);
    reports.push_back(with_threshold(r, "mass_" + std::to_string(m)));
  }
  reports.push_back(with_threshold(combine_chi_square(parts), "combined"));
  Output out(p.output);
  return finish_reports(reports, out);
}

int cmd_pdip(const Params& p) {
  Output out(p.output);
  if (!p.check) {
    Rng rng(p.seed);
    out.os() << json(sample_pdip(p.crp(), p.resolution, rng)).dump(2) << '\n';
    return 0;
  }
  auto a = run_replicates(p.replicates, p.seed, "pdip/seq", [&](std::size_t, Rng& rng) {
    return ranked_masses(sample_pdip(p.crp(), p.resolution, rng), 1)[0];
  });
  auto b = run_replicates(p.replicates, p.seed, "pdip/struct", [&](std::size_t, Rng& rng) {
    return ranked_masses(structural_pdip(p.crp(), p.resolution, rng), 1)[0];
  });
  auto c = run_replicates(p.replicates, p.seed, "pdip/pd", [&](std::size_t, Rng& rng) {
    return sample_pd_ranked(p.alpha, p.crp().theta(), 1, rng)[0];
  });
  return finish_reports({with_threshold(ks_two_sample(a, b), "sequential_vs_structural_largest"),
                         with_threshold(ks_two_sample(a, c), "sequential_vs_pd_largest")},
                        out);
}

int cmd_frag(const Params& p) {
  Output out(p.output);
  std::vector<TestReport> reports;
  for (auto& r : check_fragmentation_identity(p.coarse(), p.crp(), p.replicates, p.resolution, p.seed))
    reports.push_back(with_threshold(r, r.name));
  if (p.check)
    for (auto& r : check_nested_limit(p.coarse(), p.crp(), p.replicates, p.resolution, p.seed))
      reports.push_back(with_threshold(r, r.name));
  return finish_reports(reports, out);
}

int cmd_nested(const Params& p) {
  Rng rng(p.seed);
  Output out(p.output);
  auto& os = out.os();
  if (p.process == "ocrp") {
    auto pr = nested_ocrp(p.n, p.coarse(), p.crp(), rng);
    os << json{{"coarse", pr.coarse.to_string()}, {"fine", pr.fine.to_string()}}.dump() << '\n';
  } else if (p.process == "pcrp") {
    // --from "coarse/fine", e.g. "3/2|1"
    const auto slash = p.from.find('/');
    if (slash == std::string::npos) throw std::invalid_argument("nested: --from must be coarse/fine");
    NestedCompositions c0{Composition::parse(p.from.substr(0, slash)), Composition::parse(p.from.substr(slash + 1))};
    NestedPcrpParams np{p.coarse_alpha, p.coarse_theta1, p.crp()};
    auto path = nested_pcrp(c0, np, p.horizon, rng);
    os.precision(17);
    os << "time,coarse,fine\n0," << c0.coarse.to_string() << ',' << c0.fine.to_string() << '\n';
    for (auto& e : path.events) os << e.time << ',' << e.state.coarse.to_string() << ',' << e.state.fine.to_string() << '\n';
  } else {
    throw std::invalid_argument("nested: unknown process '" + p.process + "'");
  }
  return 0;
}

int cmd_tree(const Params& p) {
  Rng rng(p.seed);
  auto t = grow_tree_to(p.n, p.alpha, p.gamma, rng);
  json steps = json::array();
  double clock = 0.0;
  for (int i = 0; i < p.steps && p.process == "updown"; ++i) {
    auto s = tree_updown_step(t, p.alpha, p.gamma, rng);
    clock += s.holding_time;
    t = std::move(s.tree);
    steps.push_back({{"time", clock}, {"leaves", t.leaf_count()}});
  }
  json j{{"tree", t.to_json()}, {"leaves", t.leaf_count()}};
  if (t.leaf_count() >= 2) {
    auto [c, f] = spinal_decomposition(t);
    j["coarse"] = c.to_string();
    j["fine"] = f.to_string();
  }
  if (!steps.empty()) j["steps"] = steps;
  Output out(p.output);
  out.os() << j.dump(2) << '\n';
  return 0;
}

int cmd_acceptance(const Params& p) {
  AcceptanceOptions opts{p.seed, p.only};
  auto results = run_full_acceptance(opts);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.pass;
  if (!p.json_path.empty()) std::ofstream(p.json_path) << summary_json(results).dump(2) << '\n';
  Output out(p.output);
  out.os() << summary_text(results);
  return ok ? 0 : 1;
}

void validate(const std::string& cmd, const Params& p) {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  if (cmd == "exact-law" || cmd == "bruteforce" || cmd == "pseudostat") {
    p.crp().validate();
    positive(p.n, "n");
  }
  if (cmd == "simulate" && p.process != "updown") p.crp().validate();
  if (cmd == "pdip" || cmd == "frag") {
    positive(p.resolution, "resolution");
    positive(p.replicates, "replicates");
  }
  if (cmd == "simulate" || cmd == "nested")
    if (!(p.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (cmd == "tree" && p.n < 1) throw std::invalid_argument("n must be at least 1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ordered Chinese restaurant process laboratory"};
  app.require_subcommand(0, 1);
  Params p;
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; command-line flags win");

  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  auto add = [&](CLI::App* sc, const std::string& key, auto& field, const std::string& help) {
    opts[sc->get_name()][key] = sc->add_option(option_name(key), field, help);
  };
  auto crp = [&](CLI::App* sc) {
    add(sc, "alpha", p.alpha, "alpha");
    add(sc, "theta1", p.theta1, "left parameter");
    add(sc, "theta2", p.theta2, "right parameter");
  };
  auto coarse = [&](CLI::App* sc) {
    add(sc, "coarse_alpha", p.coarse_alpha, "coarse alpha");
    add(sc, "coarse_theta1", p.coarse_theta1, "coarse theta1 (theta_bar for nested pcrp)");
    add(sc, "coarse_theta2", p.coarse_theta2, "coarse theta2");
  };
  auto common = [&](CLI::App* sc) {
    add(sc, "seed", p.seed, "seed");
    add(sc, "output", p.output, "output file (default stdout)");
  };

  auto* exact = app.add_subcommand("exact-law", "exact oCRP law as CSV");
  auto* brute = app.add_subcommand("bruteforce", "enumerated oCRP law as CSV");
  for (auto* sc : {exact, brute}) {
    crp(sc);
    add(sc, "n", p.n, "customers");
    add(sc, "output", p.output, "output file");
  }
  auto* sim = app.add_subcommand("simulate", "ocrp, pcrp, updown or clade paths");
  crp(sim);
  common(sim);
  add(sim, "process", p.process, "ocrp|pcrp|updown|clade");
  add(sim, "from", p.from, "start: 'empty' or 'n1|n2|...'");
  add(sim, "horizon", p.horizon, "time horizon");
  add(sim, "n", p.n, "ocrp: customers");
  add(sim, "theta", p.theta, "updown: theta");
  add(sim, "cap", p.cap, "clade: level cap (inf for none)");
  auto* conv = app.add_subcommand("converge", "scaling experiments");
  crp(conv);
  common(conv);
  add(conv, "experiment", p.experiment, "mass|excursion|entrance");
  add(conv, "theta", p.theta, "chain theta");
  add(conv, "time", p.time, "rescaled time");
  add(conv, "replicates", p.replicates, "replicates per n");
  opts["converge"]["ns"] = conv->add_option("--ns", p.ns, "values of n")->delimiter(',');
  auto* pseudo = app.add_subcommand("pseudostat", "PCRP from an oCRP law, conditional laws at a later time");
  crp(pseudo);
  common(pseudo);
  add(pseudo, "n", p.n, "initial customers");
  add(pseudo, "time", p.time, "time");
  add(pseudo, "replicates", p.replicates, "replicates");
  auto* pdip = app.add_subcommand("pdip", "PDIP samples and sampler checks");
  crp(pdip);
  common(pdip);
  add(pdip, "resolution", p.resolution, "customers per sample");
  add(pdip, "replicates", p.replicates, "replicates for --check");
  pdip->add_flag("--check", p.check, "compare samplers instead of printing one sample");
  auto* frag_cmd = app.add_subcommand("frag", "fragmentation identity (fine rule in --alpha/--theta1/--theta2)");
  crp(frag_cmd);
  coarse(frag_cmd);
  common(frag_cmd);
  add(frag_cmd, "resolution", p.resolution, "resolution");
  add(frag_cmd, "replicates", p.replicates, "replicates");
  frag_cmd->add_flag("--check", p.check, "also run the nested oCRP limit check");
  auto* nested = app.add_subcommand("nested", "nested oCRP pair or nested PCRP path");
  crp(nested);
  coarse(nested);
  common(nested);
  add(nested, "process", p.process, "ocrp|pcrp");
  add(nested, "n", p.n, "ocrp: customers");
  add(nested, "from", p.from, "pcrp: 'coarse/fine'");
  add(nested, "horizon", p.horizon, "pcrp: horizon");
  auto* tree = app.add_subcommand("tree", "alpha-gamma tree growth and up-down chain");
  common(tree);
  add(tree, "alpha", p.alpha, "alpha");
  add(tree, "gamma", p.gamma, "gamma");
  add(tree, "n", p.n, "leaves to grow");
  add(tree, "process", p.process, "grow|updown");
  add(tree, "steps", p.steps, "updown steps");
  auto* acc = app.add_subcommand("acceptance", "acceptance criteria A1-A14");
  add(acc, "seed", p.seed, "master seed (required)");
  add(acc, "output", p.output, "text summary file");
  add(acc, "json", p.json_path, "JSON summary file");
  opts["acceptance"]["only"] = acc->add_option("--only", p.only, "criterion ids");

  for (auto* sc : app.get_subcommands({})) sc->fallthrough();
  CLI11_PARSE(app, argc, argv);

  std::string cmd;
  if (auto subs = app.get_subcommands(); !subs.empty()) cmd = subs.front()->get_name();
  try {
    std::optional<cli::Config> cfg;
    if (!config_path.empty()) cfg = cli::Config::load(config_path);
    if (cfg && cfg->has("experiment") && cmd.empty()) {
      cmd = cfg->entries().at("experiment").value;
      if (!opts.count(cmd)) cfg->fail("experiment", "unknown experiment '" + cmd + "'");
    }
    if (cmd.empty()) {
      std::cerr << app.help();
      return 2;
    }
    bool seed_given = opts[cmd].count("seed") && opts[cmd]["seed"]->count() > 0;
    if (cfg) {
      for (const auto& [key, entry] : cfg->entries()) {
        if (key == "experiment") continue;
        auto setter = config_keys().find(key);
        if (setter == config_keys().end()) cfg->fail(key, "unknown key '" + key + "'");
        auto it = opts[cmd].find(key);
        if (it == opts[cmd].end()) cfg->fail(key, "key '" + key + "' does not apply to '" + cmd + "'");
        if (it->second->count() > 0) continue;
        try {
          setter->second(p, entry.value);
        } catch (const std::exception& e) {
          cfg->fail(key, std::string(e.what()) + " for key '" + key + "'");
        }
        if (key == "seed") seed_given = true;
      }
    }
    if (cmd == "acceptance" && !seed_given) {
      std::cerr << "acceptance: --seed is required\n";
      return 2;
    }
    validate(cmd, p);
    if (cmd == "exact-law") return cmd_exact_law(p, false);
    if (cmd == "bruteforce") return cmd_exact_law(p, true);
    if (cmd == "simulate") return cmd_simulate(p);
    if (cmd == "converge") return cmd_converge(p);
    if (cmd == "pseudostat") return cmd_pseudostat(p);
    if (cmd == "pdip") return cmd_pdip(p);
    if (cmd == "frag") return cmd_frag(p);
    if (cmd == "nested") return cmd_nested(p);
    if (cmd == "tree") return cmd_tree(p);
    if (cmd == "acceptance") return cmd_acceptance(p);
  } catch (const cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << cmd << ": " << e.what() << '\n';
    return 2;
  }
  return 2;
}
