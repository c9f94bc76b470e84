// Copyright 2026 qcat contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace qcat {

// One named numeric check: passes when value <= threshold (or >= for lower bounds).
struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool upper = true;
    bool passed = false;
};

struct ProtocolReport {
    std::string name;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    void at_most(const std::string& what, double value, double threshold) {
        checks.push_back({what, value, threshold, true, value <= threshold});
    }
    void at_least(const std::string& what, double value, double threshold) {
        checks.push_back({what, value, threshold, false, value >= threshold});
    }
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

}  // namespace qcat
