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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "qcat/io.hpp"
#include "qcat/verify.hpp"

using namespace qcat;
using qcat::io::json;

namespace {

std::string error_of(const json& j) {
    try {
        io::density_from_json(j, "$");
    } catch (const io::FieldError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("density matrices round-trip bit-exactly") {
    SystemLayout l({{"A", 2, {Rational(0), Rational(3, 2)}}, {"B", 3, {Rational(0), Rational(1), Rational(-7, 3)}}});
    DensityMatrix rho(l, random_density(6, 3, 42));
    json j = io::to_json(rho);
    CHECK(j["layout"]["subsystems"][1]["energies"][2] == "-7/3");
    DensityMatrix back = io::density_from_json(io::parse_json_text(j.dump(), "text"));
    CHECK(back.layout() == l);
    CHECK(max_abs(back.matrix() - rho.matrix()) == 0.0);
}

TEST_CASE("shorthand input with real and complex entries") {
    json j = json::parse(R"({"label": "T", "energies": [0, "1/2"], "matrix": [[0.5, [0.1, 0.2]], [[0.1, -0.2], 0.5]]})");
    DensityMatrix rho = io::density_from_json(j);
    CHECK(rho.layout().labels() == std::vector<std::string>{"T"});
    CHECK(rho.layout().subsystems()[0].energies[1] == Rational(1, 2));
    CHECK(rho.matrix()(0, 1) == cd(0.1, 0.2));
}

TEST_CASE("errors carry field paths") {
    CHECK(error_of(json::parse(R"({"energies": [0, 1], "matrix": [[0.4, 0], [0, 0.5]]})")).find("$.matrix") == 0);
    CHECK(error_of(json::parse(R"({"energies": [0, 1], "matrix": [[0.4, 0], [0, 0.5]]})")).find("trace") !=
          std::string::npos);
    CHECK(error_of(json::parse(R"({"energies": [0, "x/2"], "matrix": [[1, 0], [0, 0]]})")).find("$.energies[1]") == 0);
    CHECK(error_of(json::parse(R"({"energies": [0, 1], "matrix": [[1, 0], [0, "a"]]})")).find("$.matrix[1][1]") == 0);
    CHECK(error_of(json::parse(R"({"matrix": [[1]]})")).find("$.energies") == 0);
    CHECK(error_of(json::parse(R"({"energies": [0, 1], "matrix": [[1, 0], [0, 0], [0, 0]]})")).find("$.matrix") == 0);
    CHECK(error_of(json::parse(R"({"energies": [0, 1], "matrix": [[0, 1], [1, 0]]})")).find("$.matrix") == 0);
    CHECK_THROWS_AS(io::parse_json_text("{", "x"), io::FieldError);
}

TEST_CASE("channels decode and check completeness") {
    json lay = {{"label", "S"}, {"energies", {0, 1}}};
    json ok = {{"input", lay}, {"output", lay}, {"kraus", {json::parse("[[1, 0], [0, 1]]")}}};
    CHECK(io::channel_from_json(ok).completeness_error() == 0.0);
    json bad = ok;
    bad["kraus"] = {json::parse("[[0.5, 0], [0, 1]]")};
    CHECK_THROWS_AS(io::channel_from_json(bad), io::FieldError);
    bad["kraus"] = {json::parse("[[1, 0, 0], [0, 1, 0]]")};
    CHECK_THROWS_AS(io::channel_from_json(bad), io::FieldError);
}

TEST_CASE("envelope and CSV") {
    json e = io::envelope("amplify", {{"eta0", 0.5}}, {{"x", 1}}, true);
    CHECK(e["schema"] == io::kSchemaName);
    CHECK(e["schema_version"] == io::kSchemaVersion);
    CHECK(e["timestamp"].get<std::string>().size() == 20);
    CHECK(io::csv_series({"a", "b"}, {{1.0, 0.1}}) == "a,b\n1,0.10000000000000001\n");
    CHECK(io::to_json(cd(0.5, -0.25)).dump() == "[0.5,-0.25]");
}

TEST_CASE("verify suites run deterministically") {
    VerifyConfig cfg;
    auto a = run_verify("spectra", cfg);
    auto b = run_verify("spectra", cfg);
    REQUIRE(a.size() == 1);
    CHECK(a[0].passed());
    CHECK(io::to_json(a[0]).dump() == io::to_json(b[0]).dump());
    CHECK_THROWS_AS(run_verify("bogus", cfg), InputError);
    cfg.restoration_tol = 0;
    CHECK_THROWS_AS(run_verify("qcore", cfg), InputError);
}
