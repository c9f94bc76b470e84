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

#include <json.hpp>

#include "qcat/amplify.hpp"
#include "qcat/catalytic.hpp"
#include "qcat/protocol.hpp"
#include "qcat/qcore.hpp"
#include "qcat/report.hpp"
#include "qcat/spectra.hpp"
#include "qcat/synth.hpp"

namespace qcat::io {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr const char* kSchemaName = "qcat-report";

// Input parse failure carrying the JSON path of the offending field.
class FieldError : public InputError {
public:
    FieldError(const std::string& path, const std::string& what);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// ---- decoding ----

json read_json_file(const std::string& file);
json parse_json_text(const std::string& text, const std::string& origin);

cd complex_from_json(const json& j, const std::string& path);
Rational rational_from_json(const json& j, const std::string& path);
Mat matrix_from_json(const json& j, const std::string& path);
Vec vector_from_json(const json& j, const std::string& path);
SystemLayout layout_from_json(const json& j, const std::string& path);

// Accepts {"layout": {...}, "matrix": [[...]]} or the shorthand
// {"label": "S", "energies": [...], "matrix": [[...]]}. Invariant breaches become FieldErrors
// pointing at the matrix.
DensityMatrix density_from_json(const json& j, const std::string& path = "$");
// {"input": layout, "output": layout, "kraus": [matrix, ...]}.
KrausChannel channel_from_json(const json& j, const std::string& path = "$");

// ---- encoding ----

json to_json(const cd& z);
json to_json(const Rational& r);
json to_json(const Mat& m);
json to_json(const Vec& v);
json to_json(const SystemLayout& l);
json to_json(const DensityMatrix& rho);
json to_json(const KrausChannel& ch);
json to_json(const ProtocolReport& r);
json to_json(const OverlapRecord& r);
json to_json(const ChainReport& r);
json to_json(const CounterexampleReport& r);
json to_json(const SeedReport& r);
json to_json(const Budget& b);
json to_json(const CatalystLedger& l);
json to_json(const PreparationReport& r);
json to_json(const ReachableSet& r);
json to_json(const ClosedIndexPartition& p);
json to_json(const Conversion& c);
json to_json(const BroadcastResult& r);
json to_json(const ReuseSchedule& s);
json to_json(const ReuseValidation& v);
json to_json(const MonotonicityReport& r);

// Report envelope: schema tag, version, subcommand, parameters, timestamp, result.
// The timestamp is the only field that varies between identical runs.
json envelope(const std::string& subcommand, json parameters, json result, bool passed);
std::string utc_timestamp();

// Two-space indented dump with a trailing newline.
std::string dump(const json& j);
void write_text_file(const std::string& file, const std::string& text);

// One header line plus one row per entry; values printed with 17 significant digits.
std::string csv_series(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace qcat::io
