// SPDX-License-Identifier: Apache-2.0
//
// Check reports. A report is a pure value rendered to JSON or CSV text;
// rendering is byte-deterministic for identical inputs, and nothing
// time-dependent ever enters it (wall times go to the console only).
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace levylab {

std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

struct CheckRecord {
    std::string name;
    std::string kind;
    std::string digest;  // over the check's declaration in the config
    bool pass = false;
    std::vector<std::pair<std::string, double>> values;  // ordered metrics
    std::vector<std::string> notes;
};

struct Report {
    std::string config_digest;
    std::string version;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> checks;

    bool all_pass() const;
};

std::string render_json(const Report& report);
std::string render_csv(const Report& report);

}  // namespace levylab
