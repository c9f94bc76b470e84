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

// qcat: command-line front end. Exit 0 on success, 1 on verification failure, 2 on input error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcat/amplify.hpp"
#include "qcat/catalytic.hpp"
#include "qcat/io.hpp"
#include "qcat/protocol.hpp"
#include "qcat/spectra.hpp"
#include "qcat/synth.hpp"
#include "qcat/verify.hpp"

namespace {

using qcat::io::json;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitInput = 2;

struct RunConfig {
    std::string out;
    std::string csv;
    bool compact = false;
    std::optional<std::uint64_t> seed;
    double covariance_tol = 1e-9;
    double restoration_tol = qcat::kRestorationTol;
    double coherence_tol = qcat::kDefaultCoherenceTol;

    // subcommand parameters
    double eta0 = 0.5;
    int rounds = 1;
    std::string gap = "1";
    std::string mode = "auto";
    std::string input, target, channel;
    double epsilon = 0.05;
    std::string model = "copy-count";
    std::optional<int> K, L;
    double seed_eta = 0.5;
    int max_attempts = 4;
    int overlap_L = 8, overlap_m = 1, sweep = 0;
    std::string target_energies;
    int copies = 2;
    double delta = 0.1;
    std::string energies = "0,1,3";
    int reuse_K = 3, reuse_n = 1;
    std::string suite = "all";
};

std::vector<qcat::Rational> parse_rationals(const std::string& text, const std::string& what) {
    std::vector<qcat::Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        try {
            out.push_back(qcat::Rational::parse(item));
        } catch (const std::exception& e) {
            throw qcat::io::FieldError(what, "invalid rational '" + item + "': " + e.what());
        }
    }
    if (out.empty()) throw qcat::io::FieldError(what, "expected a comma-separated list of rationals");
    return out;
}

qcat::DensityMatrix load_density(const std::string& file, const std::string& flag) {
    if (file.empty()) throw qcat::InputError(flag + " is required");
    return qcat::io::density_from_json(qcat::io::read_json_file(file), file);
}

json tolerances(const RunConfig& c) {
    return {{"covariance_tol", c.covariance_tol}, {"restoration_tol", c.restoration_tol}, {"coherence_tol", c.coherence_tol}};
}

qcat::ErrorModel parse_model(const std::string& m) {
    if (m == "copy-count") return qcat::ErrorModel::CopyCount;
    if (m == "union-bound") return qcat::ErrorModel::UnionBound;
    throw qcat::io::FieldError("--model", "expected copy-count or union-bound");
}

struct Outcome {
    json parameters;
    json result;
    bool passed = true;
    std::string csv;
};

Outcome run_amplify(const RunConfig& c) {
    qcat::ChainMode mode = qcat::ChainMode::Auto;
    if (c.mode == "joint") mode = qcat::ChainMode::Joint;
    else if (c.mode == "marginal") mode = qcat::ChainMode::MarginalTracking;
    else if (c.mode != "auto") throw qcat::io::FieldError("--mode", "expected auto, joint or marginal");
    qcat::Rational gap = qcat::io::rational_from_json(json(c.gap), "--gap");
    auto chain = qcat::run_chain(c.eta0, c.rounds, gap, mode);
    double res = 0.0;
    for (double r : chain.catalyst_residuals) res = std::max(res, r);
    Outcome o;
    o.parameters = {{"eta0", c.eta0}, {"rounds", c.rounds}, {"gap", gap.str()}, {"mode", c.mode}};
    o.result = qcat::io::to_json(chain);
    o.result["max_catalyst_residual"] = res;
    o.passed = res <= c.restoration_tol;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < chain.eta_sequence.size(); ++j)
        rows.push_back({double(j), chain.eta_sequence[j], j == 0 ? c.eta0 : chain.simulated_eta[j - 1]});
    o.csv = qcat::io::csv_series({"round", "eta_recursion", "eta_simulated"}, rows);
    return o;
}

Outcome run_counterexample(const RunConfig& c) {
    auto r = qcat::correlated_rerun_counterexample(c.eta0);
    qcat::ProtocolReport checks;
    checks.name = "counterexample";
    checks.at_most("simulated marginal vs printed polynomial (max entry)", r.max_entry_simulated_polynomial, 1e-10);
    checks.at_least("simulated marginal vs Gamma(eta1) (max entry)", r.max_entry_simulated_gamma, 1e-6);
    Outcome o;
    o.parameters = {{"eta0", c.eta0}};
    o.result = qcat::io::to_json(r);
    o.result["report"] = qcat::io::to_json(checks);
    o.passed = checks.passed();
    return o;
}

qcat::PrepareOptions prepare_options(const RunConfig& c, int d) {
    qcat::PrepareOptions opt;
    opt.model = parse_model(c.model);
    opt.seed_eta = c.seed_eta;
    opt.max_attempts = c.max_attempts;
    opt.sample_seed = c.seed;
    if (c.K || c.L) {
        if (!(c.K && c.L)) throw qcat::InputError("--K and --L must be given together");
        qcat::Budget b;
        b.eta = c.seed_eta;
        b.K = *c.K;
        b.L = *c.L;
        b.ladders = d - 1;
        b.model = opt.model;
        opt.budget = b;
    }
    return opt;
}

json prepare_parameters(const RunConfig& c) {
    json p = {{"epsilon", c.epsilon}, {"model", c.model}, {"seed_eta", c.seed_eta}, {"max_attempts", c.max_attempts}};
    p["K"] = c.K ? json(*c.K) : json(nullptr);
    p["L"] = c.L ? json(*c.L) : json(nullptr);
    p["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    return p;
}

Outcome run_prepare(const RunConfig& c) {
    auto target = load_density(c.target, "--target");
    auto rep = qcat::prepare_state(target, c.epsilon, prepare_options(c, static_cast<int>(target.dim())));
    Outcome o;
    o.parameters = prepare_parameters(c);
    o.parameters["target"] = qcat::io::to_json(target);
    o.result = qcat::io::to_json(rep);
    o.passed = rep.report.passed() && rep.ledger.max_residual() <= c.restoration_tol;
    return o;
}

Outcome run_quasi(const RunConfig& c) {
    auto rho = load_density(c.input, "--input");
    auto target = load_density(c.target, "--target");
    auto rep = qcat::quasi_prepare(rho, target, c.epsilon, prepare_options(c, static_cast<int>(target.dim())));
    Outcome o;
    o.parameters = prepare_parameters(c);
    o.parameters["input"] = qcat::io::to_json(rho);
    o.parameters["target"] = qcat::io::to_json(target);
    o.result = qcat::io::to_json(rep);
    o.passed = rep.report.passed() && rep.ledger.max_residual() <= c.restoration_tol;
    return o;
}

Outcome run_overlap(const RunConfig& c) {
    Outcome o;
    std::vector<std::vector<double>> rows;
    json records = json::array();
    int lo = c.sweep > 0 ? 1 : c.overlap_L;
    int hi = c.sweep > 0 ? c.sweep : c.overlap_L;
    bool bound_ok = true;
    for (int L = lo; L <= hi; ++L) {
        auto rec = qcat::overlap(L, c.overlap_m);
        records.push_back(qcat::io::to_json(rec));
        rows.push_back({double(L), double(c.overlap_m), rec.exact_value, rec.lower_bound, rec.central_bound});
        bound_ok = bound_ok && rec.exact_value >= rec.lower_bound - 1e-15;
    }
    o.parameters = {{"L", c.overlap_L}, {"m", c.overlap_m}, {"sweep", c.sweep}};
    o.result = {{"records", records}, {"bounds_hold", bound_ok}};
    o.passed = bound_ok;
    o.csv = qcat::io::csv_series({"L", "m", "exact_value", "lower_bound", "central_bound"}, rows);
    return o;
}

Outcome run_index_sets(const RunConfig& c) {
    auto rho = load_density(c.input, "--input");
    if (rho.layout().size() != 1) throw qcat::io::FieldError(c.input, "expected a single-subsystem layout");
    auto tgt = parse_rationals(c.target_energies, "--target-energies");
    auto support = qcat::coherence_support(rho, c.coherence_tol);
    auto reach = qcat::reachable_pairs(support, rho.layout().subsystems()[0].energies, tgt);
    auto part = qcat::maximal_closed_sets(reach, static_cast<int>(tgt.size()));
    int bad = 0;
    for (const auto& p : reach.pairs)
        if (p.reachable && !qcat::witness_substitutes(reach.generator_gaps, p.coefficients, tgt[p.j] - tgt[p.i])) ++bad;
    Outcome o;
    o.parameters = {{"input", qcat::io::to_json(rho)}, {"target_energies", c.target_energies}};
    o.result = qcat::io::to_json(reach);
    o.result["partition"] = qcat::io::to_json(part);
    o.result["witness_failures"] = bad;
    o.passed = bad == 0;
    return o;
}

Outcome run_convert(const RunConfig& c) {
    auto rho = load_density(c.input, "--input");
    auto target = load_density(c.target, "--target");
    if (c.channel.empty()) throw qcat::InputError("--channel is required");
    auto ch = qcat::io::channel_from_json(qcat::io::read_json_file(c.channel), c.channel);
    auto conv = qcat::convert_asymptotic(rho, target, ch, c.copies, c.epsilon);
    Outcome o;
    o.parameters = {{"copies", c.copies}, {"epsilon", c.epsilon}};
    o.result = qcat::io::to_json(conv);
    o.passed = conv.report.passed();
    return o;
}

Outcome run_broadcast(const RunConfig& c) {
    qcat::BroadcastConfig cfg{c.delta, parse_rationals(c.energies, "--energies")};
    std::optional<qcat::Mat> rho;
    if (!c.input.empty()) rho = load_density(c.input, "--input").matrix();
    auto r = qcat::broadcast3(cfg, rho);
    Outcome o;
    o.parameters = {{"delta", c.delta}, {"energies", c.energies}};
    o.result = qcat::io::to_json(r);
    o.passed = r.report.passed();
    return o;
}

Outcome run_reuse(const RunConfig& c) {
    auto s = qcat::reuse_schedule(c.reuse_K, c.reuse_n);
    auto v = qcat::validate_reuse(s);
    Outcome o;
    o.parameters = {{"K", c.reuse_K}, {"n", c.reuse_n}};
    o.result = {{"schedule", qcat::io::to_json(s)}, {"validation", qcat::io::to_json(v)}};
    o.passed = v.valid;
    return o;
}

Outcome run_verify_cmd(const RunConfig& c) {
    qcat::VerifyConfig cfg;
    cfg.seed = c.seed.value_or(7);
    cfg.covariance_tol = c.covariance_tol;
    cfg.restoration_tol = c.restoration_tol;
    cfg.coherence_tol = c.coherence_tol;
    auto reports = qcat::run_verify(c.suite, cfg);
    Outcome o;
    o.parameters = {{"suite", c.suite}, {"seed", cfg.seed}};
    json suites = json::array();
    for (const auto& r : reports) {
        suites.push_back(qcat::io::to_json(r));
        o.passed = o.passed && r.passed();
        std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.name << "\n";
    }
    o.result = {{"suites", suites}};
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcat: catalytic coherence transformations",
                 "qcat"};
    app.footer("Exit status: 0 success, 1 verification failure, 2 input error.\n"
               "QCAT_DIM_CAP overrides the joint-dimension cap (default 4096).");
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    std::uint64_t seed = 0;

    app.add_option("--out", c.out, "Write the JSON report here instead of stdout");
    app.add_option("--csv", c.csv, "Write the 1-D series as CSV (amplify, overlap)");
    app.add_flag("--compact", c.compact, "Emit JSON without indentation");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every randomized check and sampled branch");
    app.add_option("--covariance-tol", c.covariance_tol, "Covariance tolerance")->check(CLI::PositiveNumber);
    app.add_option("--restoration-tol", c.restoration_tol, "Catalyst restoration tolerance")->check(CLI::PositiveNumber);
    app.add_option("--coherence-tol", c.coherence_tol, "Off-diagonal magnitude treated as coherence")
        ->check(CLI::PositiveNumber);

    auto* amp = app.add_subcommand("amplify", "Run the coherence amplification chain");
    amp->add_option("--eta0", c.eta0, "Initial coherence")->check(CLI::Range(0.0, 1.0));
    amp->add_option("--rounds", c.rounds, "Amplification rounds K")->check(CLI::NonNegativeNumber);
    amp->add_option("--gap", c.gap, "Qubit energy gap as p/q");
    amp->add_option("--mode", c.mode, "auto, joint or marginal");

    auto* cex = app.add_subcommand("counterexample", "Rerun the chain on its own correlated catalyst");
    cex->add_option("--eta0", c.eta0, "Initial coherence")->check(CLI::Range(0.0, 1.0));

    auto add_prepare_flags = [&c](CLI::App* s) {
        s->add_option("--target", c.target, "Target density matrix JSON")->required();
        s->add_option("--epsilon", c.epsilon, "Trace-distance budget")->check(CLI::Range(0.0, 1.0));
        s->add_option("--model", c.model, "Planner error model: copy-count or union-bound");
        s->add_option("--K", c.K, "Amplification rounds (skips the planner with --L)");
        s->add_option("--L", c.L, "Resource copies per ladder (skips the planner with --K)");
        s->add_option("--seed-eta", c.seed_eta, "Catalyst parameter of the seed round");
        s->add_option("--max-attempts", c.max_attempts, "Planner candidates simulated")->check(CLI::PositiveNumber);
    };
    auto* prep = app.add_subcommand("prepare", "Marginal-catalytic preparation of a target state");
    add_prepare_flags(prep);
    auto* quasi = app.add_subcommand("quasi-prepare", "Quasi-correlated preparation from a coherent input");
    add_prepare_flags(quasi);
    quasi->add_option("--input", c.input, "Input density matrix JSON")->required();

    auto* ov = app.add_subcommand("overlap", "Binomial resource overlap with the shift operator");
    ov->add_option("--L", c.overlap_L, "Resource copies")->check(CLI::PositiveNumber);
    ov->add_option("--m", c.overlap_m, "Shift");
    ov->add_option("--sweep", c.sweep, "Report L = 1..N instead of a single L")->check(CLI::NonNegativeNumber);

    auto* idx = app.add_subcommand("index-sets", "Reachable pairs and maximal closed index sets");
    idx->add_option("--input", c.input, "Input density matrix JSON")->required();
    idx->add_option("--target-energies", c.target_energies, "Comma-separated rationals")->required();

    auto* conv = app.add_subcommand("convert", "Asymptotic to correlated-catalytic conversion");
    conv->add_option("--input", c.input, "Input density matrix JSON")->required();
    conv->add_option("--target", c.target, "Target density matrix JSON")->required();
    conv->add_option("--channel", c.channel, "Covariant channel on n copies, JSON")->required();
    conv->add_option("--copies", c.copies, "Number of copies n")->check(CLI::PositiveNumber);
    conv->add_option("--epsilon", c.epsilon, "Per-copy trace-distance budget");

    auto* bc = app.add_subcommand("broadcast3", "Three-level coherence broadcasting");
    bc->add_option("--delta", c.delta, "Broadcast strength");
    bc->add_option("--energies", c.energies, "Three comma-separated rational energies");
    bc->add_option("--input", c.input, "Optional input density matrix JSON");

    auto* ru = app.add_subcommand("reuse", "Partial reuse schedule and validation");
    ru->add_option("--K", c.reuse_K, "Catalyst copies per slot")->check(CLI::PositiveNumber);
    ru->add_option("--n", c.reuse_n, "Slots per run")->check(CLI::PositiveNumber);

    auto* ver = app.add_subcommand("verify", "Run module invariant suites");
    ver->add_option("--suite", c.suite, "all, qcore, amplify, synth, spectra, catalytic or protocol");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }
    if (*seed_opt) c.seed = seed;

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Outcome o;
    try {
        if (name == "amplify") o = run_amplify(c);
        else if (name == "counterexample") o = run_counterexample(c);
        else if (name == "prepare") o = run_prepare(c);
        else if (name == "quasi-prepare") o = run_quasi(c);
        else if (name == "overlap") o = run_overlap(c);
        else if (name == "index-sets") o = run_index_sets(c);
        else if (name == "convert") o = run_convert(c);
        else if (name == "broadcast3") o = run_broadcast(c);
        else if (name == "reuse") o = run_reuse(c);
        else o = run_verify_cmd(c);
    } catch (const qcat::InputError& e) {
        std::cerr << "qcat: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const qcat::DimensionError& e) {
        std::cerr << "qcat: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const qcat::InvariantError& e) {
        std::cerr << "qcat: verification failure: " << e.what() << "\n";
        return kExitVerify;
    }

    o.parameters["tolerances"] = tolerances(c);
    json report = qcat::io::envelope(name, o.parameters, o.result, o.passed);
    std::string text = c.compact ? report.dump() + "\n" : qcat::io::dump(report);
    try {
        if (c.out.empty()) std::cout << text;
        else qcat::io::write_text_file(c.out, text);
        if (!c.csv.empty()) {
            if (o.csv.empty()) throw qcat::InputError("--csv is only available for amplify and overlap");
            qcat::io::write_text_file(c.csv, o.csv);
        }
    } catch (const qcat::InputError& e) {
        std::cerr << "qcat: input error: " << e.what() << "\n";
        return kExitInput;
    }
    if (!o.passed) std::cerr << "qcat: verification failure: see the report checks\n";
    return o.passed ? kExitOk : kExitVerify;
}
