// SPDX-License-Identifier: Apache-2.0
#include "levylab/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace levylab {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string digest_hex(std::string_view bytes) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

bool Report::all_pass() const {
    for (const CheckRecord& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string render_json(const Report& report) {
    nlohmann::ordered_json j;
    j["manifest"] = {{"config_digest", report.config_digest},
                     {"version", report.version},
                     {"seed", report.seed}};
    j["checks"] = nlohmann::ordered_json::array();
    int passed = 0;
    for (const CheckRecord& c : report.checks) {
        nlohmann::ordered_json item;
        item["name"] = c.name;
        item["kind"] = c.kind;
        item["digest"] = c.digest;
        item["pass"] = c.pass;
        nlohmann::ordered_json values;
        for (const auto& [key, value] : c.values) values[key] = value;
        item["values"] = values;
        if (!c.notes.empty()) item["notes"] = c.notes;
        j["checks"].push_back(item);
        if (c.pass) ++passed;
    }
    j["summary"] = {{"checks", report.checks.size()},
                    {"passed", passed},
                    {"all_pass", report.all_pass()}};
    return j.dump(2) + "\n";
}

std::string render_csv(const Report& report) {
    std::string out;
    out += "check,kind,digest,metric,value\n";
    char buf[64];
    for (const CheckRecord& c : report.checks) {
        for (const auto& [key, value] : c.values) {
            std::snprintf(buf, sizeof buf, "%.17g", value);
            out += c.name + "," + c.kind + "," + c.digest + "," + key + "," +
                   buf + "\n";
        }
        out += c.name + "," + c.kind + "," + c.digest + ",pass," +
               (c.pass ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace levylab
