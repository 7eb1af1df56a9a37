// Runs the analytic-vs-numeric acceptance battery and reports one line per
// criterion.  Exit 0 only if every selected criterion passes.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "fewcycle/validate.hpp"

int main(int argc, char** argv) {
  fewcycle::ValidateOptions opts;
  const std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const auto next = [&]() -> const std::string& {
      if (i + 1 >= args.size()) {
        std::cerr << "missing value for " << a << "\n";
        std::exit(2);
      }
      return args[++i];
    };
    if (a == "--criterion") {
      opts.only.push_back(std::atoi(next().c_str()));
    } else if (a == "--out") {
      opts.out_dir = next();
    } else if (a == "--steps-per-cycle") {
      opts.integrator.steps_per_cycle = std::atoi(next().c_str());
    } else if (a == "--parallel") {
      opts.workers = std::atoi(next().c_str());
    } else {
      std::cerr << "unknown flag: " << a
                << " (expected --criterion N, --out DIR, --steps-per-cycle N, "
                   "--parallel N)\n";
      return 2;
    }
  }
  const std::vector<fewcycle::CriterionResult> results =
      fewcycle::run_acceptance(opts);
  fewcycle::print_results(std::cout, results);
  return fewcycle::all_passed(results) ? 0 : 1;
}
