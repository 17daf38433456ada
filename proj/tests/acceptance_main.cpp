#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "crplab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria A1-A14"};
  crplab::AcceptanceOptions opts;
  std::string json_path, summary_path;
  app.add_option("--seed", opts.seed, "master seed")->required();
  app.add_option("--only", opts.only, "criterion ids, e.g. A4 A9");
  app.add_option("--json", json_path, "write the JSON summary here");
  app.add_option("--summary", summary_path, "write the text summary here");
  CLI11_PARSE(app, argc, argv);

  std::vector<crplab::CriterionResult> results;
  try {
    results = crplab::run_full_acceptance(opts);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 2;
  }
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-4s %s  %s  (attempts %zu, %.1f s)\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.title.c_str(),
                r.attempts.size(), r.seconds);
    ok = ok && r.pass;
  }
  std::cout << '\n' << crplab::summary_text(results);
  if (!json_path.empty()) std::ofstream(json_path) << crplab::summary_json(results).dump(2) << '\n';
  if (!summary_path.empty()) std::ofstream(summary_path) << crplab::summary_text(results);
  return ok ? 0 : 1;
}
