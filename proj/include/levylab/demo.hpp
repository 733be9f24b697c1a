// SPDX-License-Identifier: Apache-2.0
//
// Bundled demo experiments (the same documents live under configs/).
#pragma once

#include <string>
#include <vector>

namespace levylab {

// nullptr when the name is unknown
const char* demo_config(const std::string& name);
std::vector<std::string> demo_config_names();

}  // namespace levylab
