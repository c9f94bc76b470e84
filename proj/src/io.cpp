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

#include "qcat/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qcat::io {

FieldError::FieldError(const std::string& path, const std::string& what)
    : InputError(path + ": " + what), path_(path) {}

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) throw FieldError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw FieldError(at(path, key), "missing field");
    return *it;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json doubles(const std::vector<double>& v) { return json(v); }

}  // namespace

// ---- decoding ----

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FieldError(origin, std::string("malformed JSON: ") + e.what());
    }
}

json read_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw InputError(file + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), file);
}

cd complex_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw FieldError(path, "expected a number or [re, im]");
}

Rational rational_from_json(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::exception& e) {
            throw FieldError(path, std::string("invalid rational: ") + e.what());
        }
    }
    throw FieldError(path, "expected an integer or a \"p/q\" string");
}

Mat matrix_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw FieldError(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw FieldError(at(path, 0), "expected a non-empty row");
    const std::size_t cols = j[0].size();
    Mat m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = at(path, r);
        if (!j[r].is_array()) throw FieldError(rp, "expected a row array");
        if (j[r].size() != cols)
            throw FieldError(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                                     std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(j[r][c], at(rp, c));
    }
    return m;
}

Vec vector_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw FieldError(path, "expected a non-empty array");
    Vec v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i], at(path, i));
    return v;
}

namespace {

Subsystem subsystem_from_json(const json& j, const std::string& path) {
    Subsystem s;
    const json& label = require(j, path, "label");
    if (!label.is_string() || label.get<std::string>().empty())
        throw FieldError(at(path, "label"), "expected a non-empty string");
    s.label = label.get<std::string>();
    const json& e = require(j, path, "energies");
    const std::string ep = at(path, "energies");
    if (!e.is_array() || e.empty()) throw FieldError(ep, "expected a non-empty array");
    for (std::size_t i = 0; i < e.size(); ++i) s.energies.push_back(rational_from_json(e[i], at(ep, i)));
    s.dim = static_cast<int>(s.energies.size());
    return s;
}

}  // namespace

SystemLayout layout_from_json(const json& j, const std::string& path) {
    std::vector<Subsystem> subs;
    if (j.is_object() && j.contains("subsystems")) {
        const json& arr = j["subsystems"];
        const std::string ap = at(path, "subsystems");
        if (!arr.is_array() || arr.empty()) throw FieldError(ap, "expected a non-empty array");
        for (std::size_t i = 0; i < arr.size(); ++i) subs.push_back(subsystem_from_json(arr[i], at(ap, i)));
    } else {
        subs.push_back(subsystem_from_json(j, path));
    }
    try {
        return SystemLayout(std::move(subs));
    } catch (const std::exception& e) {
        throw FieldError(path, e.what());
    }
}

DensityMatrix density_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw FieldError(path, "expected an object");
    SystemLayout layout;
    if (j.contains("layout")) {
        layout = layout_from_json(j["layout"], at(path, "layout"));
    } else {
        json single = {{"label", j.value("label", std::string("S"))}};
        single["energies"] = require(j, path, "energies");
        layout = layout_from_json(single, path);
    }
    const std::string mp = at(path, "matrix");
    Mat m = matrix_from_json(require(j, path, "matrix"), mp);
    if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim())
        throw FieldError(mp, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                 " but the layout has dimension " + std::to_string(layout.total_dim()));
    std::string diag = density_diagnostic(m, layout.total_dim());
    if (!diag.empty()) throw FieldError(mp, "density matrix invalid: " + diag);
    return DensityMatrix(layout, m);
}

KrausChannel channel_from_json(const json& j, const std::string& path) {
    SystemLayout in = layout_from_json(require(j, path, "input"), at(path, "input"));
    SystemLayout out = layout_from_json(require(j, path, "output"), at(path, "output"));
    const json& ks = require(j, path, "kraus");
    const std::string kp = at(path, "kraus");
    if (!ks.is_array() || ks.empty()) throw FieldError(kp, "expected a non-empty array of matrices");
    std::vector<Mat> ops;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        Mat k = matrix_from_json(ks[i], at(kp, i));
        if (k.rows() != out.total_dim() || k.cols() != in.total_dim())
            throw FieldError(at(kp, i), "Kraus operator shape does not match output x input dimensions");
        ops.push_back(std::move(k));
    }
    try {
        return KrausChannel(in, out, ops);
    } catch (const InvariantError& e) {
        throw FieldError(kp, e.what());
    }
}

// ---- encoding ----

json to_json(const cd& z) { return json::array({z.real(), z.imag()}); }

json to_json(const Rational& r) { return r.str(); }

json to_json(const Mat& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vec& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

json to_json(const SystemLayout& l) {
    json subs = json::array();
    for (const auto& s : l.subsystems()) {
        json e = json::array();
        for (const auto& x : s.energies) e.push_back(to_json(x));
        subs.push_back({{"label", s.label}, {"energies", e}});
    }
    return {{"subsystems", subs}};
}

json to_json(const DensityMatrix& rho) { return {{"layout", to_json(rho.layout())}, {"matrix", to_json(rho.matrix())}}; }

json to_json(const KrausChannel& ch) {
    json ks = json::array();
    for (const auto& k : ch.dense_ops()) ks.push_back(to_json(k));
    return {{"input", to_json(ch.input_layout())},
            {"output", to_json(ch.output_layout())},
            {"kraus", ks},
            {"completeness_error", ch.completeness_error()}};
}

json to_json(const ProtocolReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"bound", c.upper ? "upper" : "lower"},
                          {"passed", c.passed}});
    return {{"name", r.name}, {"passed", r.passed()}, {"checks", checks}, {"notes", r.notes}};
}

json to_json(const OverlapRecord& r) {
    return {{"L", r.L},
            {"m", r.m},
            {"exact_value", r.exact_value},
            {"lower_bound", r.lower_bound},
            {"central_bound", r.central_bound}};
}

json to_json(const ChainReport& r) {
    json j = {{"eta_sequence", doubles(r.eta_sequence)},
              {"simulated_eta", doubles(r.simulated_eta)},
              {"final_system_marginal", to_json(r.final_system_marginal)},
              {"catalyst_residuals", doubles(r.catalyst_residuals)},
              {"neighbour_mutual_information", doubles(r.neighbour_mutual_information)},
              {"joint_path", r.joint_path}};
    if (r.joint_state) j["joint_dimension"] = r.joint_state->dim();
    return j;
}

json to_json(const CounterexampleReport& r) {
    return {{"eta0", r.eta0},
            {"eta1", r.eta1},
            {"correlated_catalyst", to_json(r.correlated_catalyst)},
            {"catalyst_mutual_information", r.catalyst_mutual_information},
            {"simulated_marginal", to_json(r.simulated_marginal)},
            {"printed_polynomial", to_json(r.printed_polynomial)},
            {"gamma_eta1", to_json(r.gamma_eta1)},
            {"distance_simulated_polynomial", r.distance_simulated_polynomial},
            {"distance_simulated_gamma", r.distance_simulated_gamma},
            {"distance_polynomial_gamma", r.distance_polynomial_gamma},
            {"max_entry_simulated_polynomial", r.max_entry_simulated_polynomial},
            {"max_entry_simulated_gamma", r.max_entry_simulated_gamma}};
}

json to_json(const SeedReport& r) {
    return {{"eta", r.eta},
            {"eta_prime", r.eta_prime},
            {"alpha", r.alpha},
            {"eta_out_closed_form", r.eta_out},
            {"eta_out_simulated", r.eta_out_simulated},
            {"r_state", to_json(r.r_state)},
            {"ca_residual", r.ca_residual},
            {"cb_residual", r.cb_residual},
            {"ca_final", to_json(r.ca_final)},
            {"cb_final", to_json(r.cb_final)},
            {"ca_cb_mutual_information", r.ca_cb_mutual_information},
            {"max_imaginary", r.max_imaginary}};
}

json to_json(const Budget& b) {
    return {{"eta", b.eta},
            {"K", b.K},
            {"L", b.L},
            {"ladders", b.ladders},
            {"eta_K", b.eta_K},
            {"predicted_error", b.predicted_error},
            {"model", error_model_name(b.model)}};
}

json to_json(const CatalystLedger& l) {
    json entries = json::array();
    for (const auto& e : l.entries)
        entries.push_back({{"label", e.label},
                           {"round", e.round},
                           {"target_dependent", e.target_dependent},
                           {"residual", e.residual},
                           {"declared", to_json(e.declared)},
                           {"measured", to_json(e.measured)}});
    json edges = json::array();
    for (const auto& e : l.correlation_graph)
        edges.push_back({{"a", e.a}, {"b", e.b}, {"mutual_information", e.mutual_information}});
    return {{"entries", entries},
            {"correlation_graph", edges},
            {"max_residual", l.max_residual()},
            {"marginal_catalytic", l.marginal_catalytic()}};
}

json to_json(const ClosedIndexPartition& p) { return {{"blocks", p.blocks}}; }

json to_json(const PreparationReport& r) {
    json attempts = json::array();
    for (const auto& b : r.attempts) attempts.push_back(to_json(b));
    json overlaps = json::array();
    for (const auto& o : r.overlaps) overlaps.push_back(to_json(o));
    json mixture = json::array();
    for (const auto& m : r.mixture)
        mixture.push_back({{"weight", m.weight}, {"block", m.block}, {"state", to_json(m.state)}});
    json pairs = json::array();
    for (const auto& p : r.pairs_used) pairs.push_back({p.first, p.second});
    return {{"kind", r.kind},
            {"epsilon", r.epsilon},
            {"achieved_distance", r.achieved_distance},
            {"budget", to_json(r.budget)},
            {"attempts", attempts},
            {"bank_dimension", r.bank_dimension},
            {"catalyst_count", r.catalyst_count},
            {"product_residual", r.product_residual},
            {"product_residual_scope", r.product_residual_scope},
            {"sampled_branch", r.sampled_branch ? json(*r.sampled_branch) : json(nullptr)},
            {"sampled_distance", opt_json(r.sampled_distance)},
            {"partition", to_json(r.partition)},
            {"pairs_used", pairs},
            {"shift_tables", r.shift_tables},
            {"block_anchor", r.block_anchor},
            {"overlaps", overlaps},
            {"mixture", mixture},
            {"output", to_json(r.output)},
            {"ledger", to_json(r.ledger)},
            {"report", to_json(r.report)}};
}

json to_json(const ReachableSet& r) {
    json support = json::array();
    for (const auto& p : r.support.pairs) support.push_back({p.first, p.second});
    json gaps = json::array();
    for (const auto& g : r.generator_gaps) gaps.push_back(to_json(g));
    json targets = json::array();
    for (const auto& e : r.target_energies) targets.push_back(to_json(e));
    json pairs = json::array();
    for (const auto& w : r.pairs) {
        json p = {{"i", w.i}, {"j", w.j}, {"reachable", w.reachable}};
        p["coefficients"] = w.reachable ? json(w.coefficients) : json(nullptr);
        pairs.push_back(std::move(p));
    }
    return {{"support", support},
            {"generator_gaps", gaps},
            {"lattice_basis", to_json(r.lattice_basis)},
            {"target_energies", targets},
            {"pairs", pairs}};
}

json to_json(const Conversion& c) {
    return {{"n", c.catalyst.n},
            {"catalyst", to_json(c.catalyst.body)},
            {"asymptotic_output", to_json(c.catalyst.asymptotic_output)},
            {"system_output", to_json(c.system_output)},
            {"lambda_completeness_error", c.lambda.completeness_error()},
            {"lambda_kraus_count", c.lambda.ops().size()},
            {"report", to_json(c.report)}};
}

json to_json(const BroadcastResult& r) {
    return {{"delta", r.delta},
            {"delta_max", r.delta_max},
            {"rho_tilde", to_json(r.rho_tilde)},
            {"tau", to_json(r.tau)},
            {"rho_prime", to_json(r.rho_prime)},
            {"rho_prime_13", r.rho_prime_13},
            {"expected_rho_prime_13", r.expected_rho_prime_13},
            {"catalyst_residual", r.catalyst_residual},
            {"tau12_residual", r.tau12_residual},
            {"tau23_residual", r.tau23_residual},
            {"tau13_residual", r.tau13_residual},
            {"k0_only_22_deficit", r.k0_only_22_deficit},
            {"e1_output_residual", r.e1_output_residual},
            {"e1", to_json(r.e1)},
            {"e2", to_json(r.e2)},
            {"report", to_json(r.report)}};
}

json to_json(const ReuseSchedule& s) {
    json runs = json::array();
    for (const auto& run : s.runs) {
        json inst = json::array();
        for (const auto& i : run.instances) inst.push_back({{"copy", i.copy}, {"slot", i.slot}});
        runs.push_back(std::move(inst));
    }
    return {{"K", s.K}, {"n", s.n}, {"copies", s.copies}, {"runs", runs}};
}

json to_json(const ReuseValidation& v) {
    return {{"valid", v.valid},
            {"runs", v.runs},
            {"expected_runs", v.expected_runs},
            {"correlated_pair_violations", v.correlated_pair_violations},
            {"slot_violations", v.slot_violations},
            {"correlated_pairs_final", v.correlated_pairs_final}};
}

json to_json(const MonotonicityReport& r) {
    return {{"measure", r.measure},
            {"joint_in", r.joint_in},
            {"joint_out", r.joint_out},
            {"system_in", r.system_in},
            {"system_out", r.system_out},
            {"catalysts_in", doubles(r.catalysts_in)},
            {"catalysts_out", doubles(r.catalysts_out)},
            {"marginal_sum_out", r.marginal_sum_out},
            {"max_catalyst_change", r.max_catalyst_change},
            {"tensor_additivity_gap", r.tensor_additivity_gap},
            {"superadditivity_gap", r.superadditivity_gap},
            {"tensor_additivity_holds", r.tensor_additivity_holds},
            {"superadditivity_holds", r.superadditivity_holds},
            {"joint_monotone", r.joint_monotone},
            {"system_monotone", r.system_monotone}};
}

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json envelope(const std::string& subcommand, json parameters, json result, bool passed) {
    return {{"schema", kSchemaName},
            {"schema_version", kSchemaVersion},
            {"subcommand", subcommand},
            {"timestamp", utc_timestamp()},
            {"passed", passed},
            {"parameters", std::move(parameters)},
            {"result", std::move(result)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InputError(file + ": cannot open for writing");
    out << text;
    if (!out) throw InputError(file + ": write failed");
}

std::string csv_series(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace qcat::io
