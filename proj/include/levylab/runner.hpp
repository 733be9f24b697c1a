// SPDX-License-Identifier: Apache-2.0
//
// Executes the checks of a loaded config in declaration order and assembles
// the report plus any table artifacts. Pure: no file or clock access, so a
// config maps to one byte-exact result regardless of worker count.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "levylab/config.hpp"
#include "levylab/report.hpp"

namespace levylab {

struct RunOptions {
    int workers = 1;           // estimator fan-out inside each check
    bool parallel_checks = false;
    bool with_tables = true;   // produce declared table artifacts
};

struct RunResult {
    Report report;
    // (file name, content) artifacts: plot tables, path dumps
    std::vector<std::pair<std::string, std::string>> artifacts;
};

RunResult run_config(const ExperimentConfig& config,
                     const RunOptions& options = {});

}  // namespace levylab
