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

#include <cstdint>
#include <string>
#include <vector>

#include "qcat/report.hpp"

namespace qcat {

struct VerifyConfig {
    std::uint64_t seed = 7;
    double covariance_tol = 1e-9;
    double restoration_tol = 1e-9;
    double coherence_tol = 1e-9;
};

// Module suites in dispatch order: qcore, amplify, synth, spectra, catalytic, protocol.
std::vector<std::string> verify_suite_names();

// Runs one suite, or every suite for "all". Each suite checks module invariants on seeded
// random instances; the seed fixes every draw. Throws InputError for an unknown suite.
std::vector<ProtocolReport> run_verify(const std::string& suite, const VerifyConfig& cfg);

}  // namespace qcat
