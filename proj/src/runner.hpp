#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace gdlab {

struct RunResult {
  std::vector<std::string> outputs;  // paths of emitted files
  std::string summary;               // human-readable one-paragraph result
};

// Executes the configured task and writes its CSV outputs plus a
// manifest.json run record under config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace gdlab
