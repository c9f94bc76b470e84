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

#include "qcat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "qcat/amplify.hpp"
#include "qcat/catalytic.hpp"
#include "qcat/protocol.hpp"
#include "qcat/qcore.hpp"
#include "qcat/spectra.hpp"
#include "qcat/synth.hpp"

namespace qcat {

namespace {

using Rng = std::mt19937_64;

std::uint64_t draw(Rng& rng) { return rng(); }

SystemLayout qubit(const std::string& label) { return SystemLayout::qubit(label, Rational(1)); }

Mat balanced_rotation() {
    Mat v(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    v << s, -s, s, s;
    return v;
}

// Overlap from Pascal's triangle: sum_k sqrt(C(L,k) C(L,k-m)) / 2^L.
double pascal_overlap(int L, int m) {
    std::vector<long double> row{1.0L};
    for (int n = 1; n <= L; ++n) {
        std::vector<long double> next(n + 1, 1.0L);
        for (int k = 1; k < n; ++k) next[k] = row[k - 1] + row[k];
        row.swap(next);
    }
    long double s = 0.0L;
    for (int k = 0; k <= L; ++k)
        if (k - m >= 0 && k - m <= L) s += std::sqrt(row[k] * row[k - m]);
    return static_cast<double>(s / std::pow(2.0L, L));
}

ProtocolReport qcore_suite(const VerifyConfig& cfg) {
    ProtocolReport r;
    r.name = "qcore";
    Rng rng(cfg.seed);
    std::uniform_int_distribution<int> dim_d(2, 5);

    int diag_failures = 0;
    double ptrace_err = 0.0, local_err = 0.0, perm_err = 0.0, channel_err = 0.0, td_asym = 0.0;
    for (int t = 0; t < 6; ++t) {
        int da = dim_d(rng), db = dim_d(rng);
        Mat a = random_density(da, 1 + t % da, draw(rng));
        Mat b = random_density(db, db, draw(rng));
        if (!density_diagnostic(a, da).empty() || !density_diagnostic(b, db).empty()) ++diag_failures;
        std::vector<Rational> ea, eb;
        for (int i = 0; i < da; ++i) ea.emplace_back(i);
        for (int i = 0; i < db; ++i) eb.emplace_back(2 * i);
        DensityMatrix ra(SystemLayout::single("A", ea), a), rb(SystemLayout::single("B", eb), b);
        DensityMatrix ab = tensor(ra, rb);
        ptrace_err = std::max(ptrace_err, max_abs(partial_trace(ab, {"A"}).matrix() - a));
        ptrace_err = std::max(ptrace_err, max_abs(partial_trace(ab, {"B"}).matrix() - b));

        // Local unitary on B versus the full Kronecker operator.
        Mat u = random_unitary(db, draw(rng));
        KrausChannel ub = KrausChannel::unitary(rb.layout(), u);
        DensityMatrix local = apply_local(ub, ab, {"B"});
        Mat full = kron(Mat::Identity(da, da), u);
        local_err = std::max(local_err, max_abs(local.matrix() - full * ab.matrix() * full.adjoint()));
        channel_err = std::max(channel_err, ub.completeness_error());

        DensityMatrix back = permute(permute(ab, {1, 0}), {1, 0});
        perm_err = std::max(perm_err, max_abs(back.matrix() - ab.matrix()));
        td_asym = std::max(td_asym, std::abs(trace_distance(a, a) - 0.0));
        Mat c = random_density(da, da, draw(rng));
        td_asym = std::max(td_asym, std::abs(trace_distance(a, c) - trace_distance(c, a)));
    }
    r.at_most("random density diagnostics failing", diag_failures, 0);
    r.at_most("partial trace of product vs factor (max entry)", ptrace_err, 1e-12);
    r.at_most("local application vs Kronecker operator (max entry)", local_err, 1e-12);
    r.at_most("unitary channel completeness error", channel_err, Tolerances::completeness);
    r.at_most("permutation round trip (max entry)", perm_err, 0.0);
    r.at_most("trace distance asymmetry", td_asym, 1e-12);

    // Phase unitaries commute with time translation; a Hadamard does not.
    SystemLayout s = qubit("S");
    Mat phase = Mat::Identity(2, 2);
    phase(1, 1) = std::polar(1.0, 0.37);
    auto cov = check_covariance(KrausChannel::unitary(s, phase), {0.3, 1.1}, 3, cfg.covariance_tol, cfg.seed);
    r.at_most("phase unitary covariance deviation", cov.max_deviation, cfg.covariance_tol);
    auto had = check_covariance(KrausChannel::unitary(s, balanced_rotation()), {0.3, 1.1}, 3, cfg.covariance_tol,
                                cfg.seed);
    r.at_least("balanced rotation covariance deviation", had.max_deviation, 1e-3);
    return r;
}

ProtocolReport amplify_suite(const VerifyConfig& cfg) {
    ProtocolReport r;
    r.name = "amplify";
    KrausChannel amp = amplification_channel(Rational(1));
    r.at_most("amplification completeness error", amp.completeness_error(), Tolerances::completeness);
    r.at_most("amplification covariance deviation",
              check_covariance(amp, {0.4, 1.7}, 3, cfg.covariance_tol, cfg.seed).max_deviation, cfg.covariance_tol);

    double sys_err = 0.0, cat_err = 0.0, ident_err = 0.0;
    for (int k = 1; k <= 9; ++k) {
        double eta = 0.1 * k;
        DensityMatrix out = apply_channel(amp, tensor(sigma_state(eta, 1, "S"), gamma_state(eta, 1, "C")));
        sys_err = std::max(sys_err, max_abs(partial_trace(out, {"S"}).matrix() - sigma_matrix(eta_step(eta))));
        cat_err = std::max(cat_err, max_abs(partial_trace(out, {"C"}).matrix() - gamma_matrix(eta)));
        double a = alpha_for(eta);
        ident_err = std::max(ident_err, std::abs(a * eta_step(eta) / std::sqrt(2 - a * a) - eta));
    }
    r.at_most("system marginal vs Sigma(eta') over the eta grid", sys_err, 1e-10);
    r.at_most("catalyst marginal vs Gamma(eta) over the eta grid", cat_err, 1e-10);
    r.at_most("seed restoration identity over the eta grid", ident_err, 1e-12);

    Rng rng(cfg.seed);
    double eta0 = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    auto chain = run_chain(eta0, 4, 1, ChainMode::Joint);
    double res = *std::max_element(chain.catalyst_residuals.begin(), chain.catalyst_residuals.end());
    double eta_err = 0.0;
    for (std::size_t j = 0; j < chain.simulated_eta.size(); ++j)
        eta_err = std::max(eta_err, std::abs(chain.simulated_eta[j] - chain.eta_sequence[j + 1]));
    r.at_most("joint chain catalyst residual (K = 4, seeded eta0)", res, cfg.restoration_tol);
    r.at_most("joint chain eta vs recursion", eta_err, 1e-10);

    auto seed = seed_round(0.5, 1);
    r.at_most("seed round Ca residual", seed.ca_residual, 1e-10);
    r.at_most("seed round Cb residual", seed.cb_residual, 1e-10);
    r.notes.push_back("seeded eta0 = " + std::to_string(eta0));
    return r;
}

ProtocolReport synth_suite(const VerifyConfig& cfg) {
    ProtocolReport r;
    r.name = "synth";
    double pascal_err = 0.0, zero_err = 0.0;
    int stirling_fail = 0;
    for (int L = 1; L <= 32; ++L) {
        for (int m = 1; m <= 3; ++m) pascal_err = std::max(pascal_err, std::abs(overlap_value(L, m) - pascal_overlap(L, m)));
        zero_err = std::max(zero_err, std::abs(overlap_value(L, 0) - 1.0));
    }
    for (int L = 2; L <= 64; L += 2)
        if (overlap_value(L, 1) < 1.0 - 2.0 / std::sqrt(2.0 * M_PI) / std::sqrt(double(L))) ++stirling_fail;
    r.at_most("overlap vs Pascal oracle (L <= 32, m <= 3)", pascal_err, 1e-12);
    r.at_most("overlap(L, 0) deviation from 1", zero_err, 1e-12);
    r.at_most("even L <= 64 below the Stirling bound", stirling_fail, 0);

    SystemLayout s = qubit("S");
    Rng rng(cfg.seed);
    Mat u = random_unitary(2, draw(rng));
    auto ch = unitary_channel(u, s, 0, 6);
    r.at_most("synthesis completeness error (L = 6)", ch.channel.completeness_error(), Tolerances::completeness);
    DensityMatrix out = partial_trace(apply_channel(ch.channel, ch.nominal_input(0)), {"S"});
    Vec psi = u.col(0);
    double f = fidelity_with_pure(out, psi);
    double closed = synthesis_fidelity_closed_form(psi, {{0}, {1}}, 6);
    r.at_most("random rotation fidelity vs closed form (L = 6)", std::abs(f - closed), 1e-9);
    auto small = unitary_channel(u, s, 0, 3);
    r.at_most("synthesis covariance deviation (L = 3)",
              check_covariance(small.channel, {0.6, 2.3}, 3, cfg.covariance_tol, cfg.seed).max_deviation,
              cfg.covariance_tol);
    auto bal = unitary_channel(balanced_rotation(), s, 0, 8);
    Vec plus = balanced_rotation().col(0);
    double fb = fidelity_with_pure(partial_trace(apply_channel(bal.channel, bal.nominal_input(0)), {"S"}), plus);
    r.at_most("balanced rotation fidelity vs 1/2 + overlap(8,1)/2", std::abs(fb - 0.5 - overlap_value(8, 1) / 2), 1e-9);
    return r;
}

// Bounded search over |m_i| <= 8 after clearing denominators.
std::unordered_set<std::int64_t> bounded_sums(const std::vector<Rational>& gens, std::int64_t den) {
    std::unordered_set<std::int64_t> sums{0};
    for (const auto& g : gens) {
        std::int64_t a = g.num() * (den / g.den());
        std::unordered_set<std::int64_t> next;
        for (std::int64_t s : sums)
            for (int m = -8; m <= 8; ++m) next.insert(s + m * a);
        sums.swap(next);
    }
    return sums;
}

ProtocolReport spectra_suite(const VerifyConfig& cfg) {
    ProtocolReport r;
    r.name = "spectra";
    CoherenceSupport unit{2, {{0, 1}}};
    auto ex = maximal_closed_sets(
        reachable_pairs(unit, {0, 1}, {Rational(0), Rational(1), Rational(3, 2), Rational(5, 2)}), 4);
    r.at_most("{0,1,3/2,5/2} partition mismatch",
              ex.blocks == std::vector<std::vector<int>>{{0, 1}, {2, 3}} ? 0.0 : 1.0, 0.0);

    Rng rng(cfg.seed);
    std::uniform_int_distribution<int> den_d(1, 12), num_d(-12, 12), ngen_d(1, 3), nlev_d(2, 5);
    int accepted = 0, disagreements = 0, bad_witness = 0, bad_partition = 0;
    while (accepted < 30) {
        int ng = ngen_d(rng);
        std::vector<Rational> src{Rational(0)};
        CoherenceSupport sup;
        for (int g = 0; g < ng; ++g) {
            src.emplace_back(num_d(rng), den_d(rng));
            sup.pairs.emplace_back(0, g + 1);
        }
        sup.n_levels = static_cast<int>(src.size());
        std::vector<Rational> tgt;
        int nl = nlev_d(rng);
        for (int k = 0; k < nl; ++k) tgt.emplace_back(num_d(rng), den_d(rng));
        std::vector<Rational> gens(src.begin() + 1, src.end());
        std::int64_t den = 1;
        for (const auto& g : gens) den = std::lcm(den, g.den());
        for (const auto& t : tgt) den = std::lcm(den, t.den());
        std::int64_t ig = 0, span = 0;
        for (const auto& g : gens) ig = std::gcd(ig, g.num() * (den / g.den()));
        for (const auto& a : tgt)
            for (const auto& b : tgt) {
                Rational d = a - b;
                span = std::max(span, std::abs(d.num() * (den / d.den())));
            }
        auto sums = bounded_sums(gens, den);
        bool exhaustive = true;
        if (ig != 0)
            for (std::int64_t v = 0; v <= span && exhaustive; v += ig) exhaustive = sums.count(v) > 0;
        if (!exhaustive) continue;
        ++accepted;
        auto reach = reachable_pairs(sup, src, tgt);
        for (const auto& p : reach.pairs) {
            Rational diff = tgt[p.j] - tgt[p.i];
            if ((sums.count(diff.num() * (den / diff.den())) > 0) != p.reachable) ++disagreements;
            if (p.reachable && !witness_substitutes(reach.generator_gaps, p.coefficients, diff)) ++bad_witness;
        }
        auto part = maximal_closed_sets(reach, nl);
        std::vector<int> block_of(nl, -1);
        for (std::size_t b = 0; b < part.blocks.size(); ++b)
            for (int k : part.blocks[b]) block_of[k] = static_cast<int>(b);
        for (const auto& p : reach.pairs)
            if ((block_of[p.i] == block_of[p.j]) != p.reachable) ++bad_partition;
    }
    r.at_most("lattice vs bounded brute force disagreements (30 instances)", disagreements, 0);
    r.at_most("witnesses failing exact substitution", bad_witness, 0);
    r.at_most("partition blocks inconsistent with reachability", bad_partition, 0);

    Mat rho = random_density(3, 3, draw(rng));
    auto sup = coherence_support(rho, cfg.coherence_tol);
    r.at_most("full-rank random state missing support pairs", 3.0 - static_cast<double>(sup.pairs.size()), 0.0);
    return r;
}

ProtocolReport catalytic_suite(const VerifyConfig& cfg) {
    ProtocolReport r;
    r.name = "catalytic";
    SystemLayout s = qubit("S");
    auto deph = [](double c) {
        double p = (1 - c) / 2;
        Mat z = Mat::Identity(2, 2);
        z(1, 1) = -1;
        return std::vector<Mat>{std::sqrt(1 - p) * Mat(Mat::Identity(2, 2)), std::sqrt(p) * z};
    };
    std::vector<Mat> ops;
    for (const auto& a : deph(0.775))
        for (const auto& b : deph(0.775)) ops.push_back(kron(a, b));
    SystemLayout two = copies_layout(s, 2);
    auto conv = convert_asymptotic(DensityMatrix(s, sigma_matrix(0.4)), DensityMatrix(s, sigma_matrix(0.3)),
                                   KrausChannel(two, two, ops), 2, 0.02);
    double reg_res = max_abs(partial_trace(conv.joint_output, {"S2", "Reg"}).matrix() - conv.catalyst.body.matrix());
    r.at_most("two-copy conversion register residual", reg_res, cfg.restoration_tol);
    r.at_most("two-copy conversion checks failing", conv.report.passed() ? 0.0 : 1.0, 0.0);

    auto b = broadcast3({0.1, {0, 1, 3}});
    r.at_most("broadcast catalyst residual", b.catalyst_residual, 1e-12);
    r.at_most("broadcast rho'_13 vs 152/225 delta^2", std::abs(b.rho_prime_13 - 152.0 / 225.0 * 0.01), 1e-10);

    int invalid = 0;
    for (auto [K, n] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {2, 3}})
        if (!validate_reuse(reuse_schedule(K, n)).valid) ++invalid;
    r.at_most("reuse schedules failing validation", invalid, 0);

    Rng rng(cfg.seed);
    DensityMatrix a(s, random_density(2, 2, draw(rng)));
    DensityMatrix c(qubit("C"), random_density(2, 2, draw(rng)));
    DensityMatrix ac = tensor(a, c);
    auto mono = check_catalytic_monotonicity(skew_measure(), {ac, ac, {"S"}, {{"C"}}});
    r.at_most("skew information additivity gap on a random product", std::abs(mono.tensor_additivity_gap), 1e-9);
    return r;
}

ProtocolReport protocol_suite(const VerifyConfig& cfg) {
    ProtocolReport r;
    r.name = "protocol";
    SystemLayout s = qubit("S");
    auto plus = prepare_state(DensityMatrix(s, sigma_matrix(1.0)), 0.2);
    r.at_most("|+> preparation achieved distance (eps = 0.2)", plus.achieved_distance, 0.2);
    r.at_most("|+> preparation ledger residual", plus.ledger.max_residual(), cfg.restoration_tol);
    r.at_most("|+> preparation product residual", plus.product_residual, cfg.restoration_tol);

    Rng rng(cfg.seed);
    PrepareOptions opt;
    opt.sample_seed = draw(rng);
    DensityMatrix target(s, random_density(2, 2, draw(rng)));
    auto rnd = prepare_state(target, 0.2, opt);
    r.at_most("random qubit preparation checks failing", rnd.report.passed() ? 0.0 : 1.0, 0.0);
    r.at_most("random qubit ledger residual", rnd.ledger.max_residual(), cfg.restoration_tol);

    Budget b1 = plan_budget(0.1, 3, 1), b2 = plan_budget(0.1, 3, 1);
    r.at_most("planner nondeterminism", (b1.K == b2.K && b1.L == b2.L) ? 0.0 : 1.0, 0.0);

    std::vector<Mat> factors;
    for (int q = 0; q < 4; ++q) factors.push_back(random_density(2, 2, draw(rng)));
    Mat comp = dicke_compress(factors);
    Eigen::SelfAdjointEigenSolver<Mat> es(comp);
    r.at_most("compressed bank trace deviation", std::abs(comp.trace().real() - 1.0), 1e-12);
    r.at_least("compressed bank smallest eigenvalue", es.eigenvalues().minCoeff(), -1e-12);

    SystemLayout q3 = SystemLayout::single("T", {0, 1, 2});
    DensityMatrix src(s, sigma_matrix(0.5));
    auto quasi = quasi_prepare(src, DensityMatrix(q3, random_density(3, 3, draw(rng))), 0.3);
    r.at_most("quasi preparation achieved distance (eps = 0.3)", quasi.achieved_distance, 0.3);
    r.at_most("quasi preparation ledger residual", quasi.ledger.max_residual(), cfg.restoration_tol);
    return r;
}

}  // namespace

std::vector<std::string> verify_suite_names() { return {"qcore", "amplify", "synth", "spectra", "catalytic", "protocol"}; }

std::vector<ProtocolReport> run_verify(const std::string& suite, const VerifyConfig& cfg) {
    if (!(cfg.covariance_tol > 0 && cfg.restoration_tol > 0 && cfg.coherence_tol > 0))
        throw InputError("tolerances must be positive");
    std::vector<std::string> names;
    if (suite == "all") {
        names = verify_suite_names();
    } else {
        auto all = verify_suite_names();
        if (std::find(all.begin(), all.end(), suite) == all.end()) throw InputError("unknown suite '" + suite + "'");
        names = {suite};
    }
    std::vector<ProtocolReport> out;
    for (const auto& n : names) {
        if (n == "qcore") out.push_back(qcore_suite(cfg));
        else if (n == "amplify") out.push_back(amplify_suite(cfg));
        else if (n == "synth") out.push_back(synth_suite(cfg));
        else if (n == "spectra") out.push_back(spectra_suite(cfg));
        else if (n == "catalytic") out.push_back(catalytic_suite(cfg));
        else out.push_back(protocol_suite(cfg));
        out.back().notes.push_back("seed " + std::to_string(cfg.seed));
    }
    return out;
}

}  // namespace qcat
