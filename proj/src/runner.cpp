#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <ostream>
#include <thread>

#include "thinspec/scenario.hpp"

namespace thinspec {

int run_manifest(const std::vector<Scenario>& scenarios, const RunOptions& opts, std::ostream& out,
                 std::ostream& err) {
  struct Result {
    std::optional<ScenarioOutput> output;
    std::string error;
  };
  std::vector<Result> results(scenarios.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < scenarios.size(); k = next++) {
      try {
        ScenarioOutput o = compute_scenario(scenarios[k]);
        write_outputs(scenarios[k], o, opts.out_dir);
        results[k].output = std::move(o);
      } catch (const std::exception& e) {
        results[k].error = e.what();
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(scenarios.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int failures = 0;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    if (results[k].output) {
      for (const auto& line : results[k].output->summary) out << line << "\n";
    } else {
      ++failures;
      const std::string tag = "scenario '" + scenarios[k].name + "'";
      err << "error: ";
      if (results[k].error.find(tag) == std::string::npos) err << tag << ": ";
      err << results[k].error << "\n";
    }
  }
  return failures;
}

}  // namespace thinspec
