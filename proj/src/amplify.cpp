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

#include "qcat/amplify.hpp"

#include <cmath>

namespace qcat {

namespace {

void require_eta(double eta, bool open, const char* what) {
    bool ok = open ? (eta > 0.0 && eta < 1.0) : (eta >= 0.0 && eta <= 1.0);
    if (!ok || !std::isfinite(eta)) throw InputError(std::string(what) + ": eta out of range");
}

const double kSqrt3 = std::sqrt(3.0);

Mat two_qubit_partial(const Mat& m, bool keep_first) {
    return partial_trace(m, {2, 2}, {keep_first ? std::size_t{0} : std::size_t{1}});
}

}  // namespace

Mat sigma_matrix(double eta) {
    Mat m(2, 2);
    m << 0.5, 0.5 * eta, 0.5 * eta, 0.5;
    return m;
}

Mat gamma_matrix(double eta) {
    const double x = kSqrt3 * eta / 2.0, z = (4.0 - eta * eta) / 6.0;
    Mat m(2, 2);
    m << 0.5 * (1.0 + z), 0.5 * x, 0.5 * x, 0.5 * (1.0 - z);
    return m;
}

DensityMatrix sigma_state(double eta, const Rational& gap, const std::string& label) {
    require_eta(eta, false, "sigma_state");
    return DensityMatrix(SystemLayout::qubit(label, gap), sigma_matrix(eta));
}

DensityMatrix gamma_state(double eta, const Rational& gap, const std::string& label) {
    require_eta(eta, false, "gamma_state");
    return DensityMatrix(SystemLayout::qubit(label, gap), gamma_matrix(eta));
}

std::vector<Mat> amplification_kraus() {
    Mat k0 = Mat::Zero(4, 4), k1 = Mat::Zero(4, 4);
    k0(0, 0) = 1.0;
    k0(1, 1) = 0.25;
    k0(1, 2) = kSqrt3 / 4.0;
    k0(2, 1) = kSqrt3 / 4.0;
    k0(2, 2) = 0.75;
    k0(3, 3) = 1.0;
    k1(2, 1) = -kSqrt3 / 2.0;
    k1(2, 2) = 0.5;
    return {k0, k1};
}

KrausChannel amplification_channel(const Rational& gap, const std::string& system_label,
                                   const std::string& catalyst_label) {
    SystemLayout l = SystemLayout::qubit(system_label, gap).concat(SystemLayout::qubit(catalyst_label, gap));
    return KrausChannel(l, l, amplification_kraus());
}

double eta_step(double eta) {
    require_eta(eta, false, "eta_step");
    return eta * (25.0 - eta * eta) / 24.0;
}

std::vector<double> eta_sequence(double eta0, int rounds) {
    std::vector<double> s{eta0};
    for (int k = 0; k < rounds; ++k) s.push_back(eta_step(s.back()));
    return s;
}

Mat amplification_round_map(const Mat& x, double catalyst_eta) {
    static const std::vector<Mat> ks = amplification_kraus();
    Mat joint = kron(x, gamma_matrix(catalyst_eta));
    Mat out = Mat::Zero(4, 4);
    for (const auto& k : ks) out += k * joint * k.adjoint();
    return two_qubit_partial(out, true);
}

Mat chain_superoperator(const std::vector<double>& catalyst_etas) {
    Mat super(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Mat x = Mat::Zero(2, 2);
            x(a, b) = 1.0;
            for (double e : catalyst_etas) x = amplification_round_map(x, e);
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) super(2 * c + d, 2 * a + b) = x(c, d);
        }
    return super;
}

Mat apply_superoperator(const Mat& super, const Mat& x) {
    Vec v(4);
    v << x(0, 0), x(0, 1), x(1, 0), x(1, 1);
    Vec w = super * v;
    Mat y(2, 2);
    y << w(0), w(1), w(2), w(3);
    return y;
}

ChainTrace trace_chain(const Mat& system_in, const std::vector<double>& catalyst_etas) {
    static const std::vector<Mat> ks = amplification_kraus();
    ChainTrace tr;
    // Carried state: (S) before the first round, then (S, C_prev).
    Mat carried = system_in;
    bool has_prev = false;
    for (double e : catalyst_etas) {
        Mat joint = kron(carried, gamma_matrix(e));
        std::vector<int> dims = has_prev ? std::vector<int>{2, 2, 2} : std::vector<int>{2, 2};
        std::vector<std::size_t> sc = has_prev ? std::vector<std::size_t>{0, 2} : std::vector<std::size_t>{0, 1};
        joint = apply_local(ks, joint, dims, sc);
        Mat cat = partial_trace(joint, dims, {dims.size() - 1});
        Mat sys_cat = partial_trace(joint, dims, {0, dims.size() - 1});
        tr.catalyst_marginals.push_back(cat);
        tr.catalyst_residuals.push_back(trace_distance(cat, gamma_matrix(e)));
        tr.system_catalyst_mutual_information.push_back(
            von_neumann_entropy(partial_trace(sys_cat, {2, 2}, {0})) + von_neumann_entropy(cat) -
            von_neumann_entropy(sys_cat));
        if (has_prev) {
            Mat pair = partial_trace(joint, dims, {1, 2});
            tr.neighbour_mutual_information.push_back(von_neumann_entropy(partial_trace(pair, {2, 2}, {0})) +
                                                      von_neumann_entropy(cat) - von_neumann_entropy(pair));
        }
        carried = sys_cat;
        has_prev = true;
    }
    tr.final_system = has_prev ? two_qubit_partial(carried, true) : carried;
    return tr;
}

ChainReport run_chain(double eta0, int rounds, const Rational& gap, ChainMode mode) {
    require_eta(eta0, true, "run_chain");
    if (rounds < 0) throw InputError("run_chain: rounds must be nonnegative");
    ChainReport rep;
    rep.eta_sequence = eta_sequence(eta0, rounds);
    std::vector<double> cat_etas(rep.eta_sequence.begin(), rep.eta_sequence.end() - 1);

    const double joint_dim = std::ldexp(1.0, rounds + 1);
    const bool fits = joint_dim <= static_cast<double>(dimension_cap());
    if (mode == ChainMode::Joint && !fits)
        throw DimensionError("run_chain: joint dimension 2^" + std::to_string(rounds + 1) +
                             " exceeds the cap; use the marginal-tracking path");
    const bool joint = mode == ChainMode::Joint || (mode == ChainMode::Auto && fits);

    if (!joint) {
        ChainTrace tr = trace_chain(sigma_matrix(eta0), cat_etas);
        Mat s = sigma_matrix(eta0);
        for (double e : cat_etas) {
            s = amplification_round_map(s, e);
            rep.simulated_eta.push_back(2.0 * s(0, 1).real());
        }
        rep.final_system_marginal = DensityMatrix(SystemLayout::qubit("S", gap), tr.final_system);
        rep.catalyst_residuals = tr.catalyst_residuals;
        rep.neighbour_mutual_information = tr.neighbour_mutual_information;
        return rep;
    }

    rep.joint_path = true;
    const KrausChannel e = amplification_channel(gap, "x", "y");
    DensityMatrix state = sigma_state(eta0, gap, "S");
    for (int j = 0; j < rounds; ++j) {
        const std::string c = "C" + std::to_string(j);
        state = tensor(state, gamma_state(cat_etas[j], gap, c));
        state = apply_local(e, state, {"S", c});
        rep.simulated_eta.push_back(2.0 * partial_trace(state, {"S"}).matrix()(0, 1).real());
    }
    rep.final_system_marginal = partial_trace(state, {"S"});
    for (int j = 0; j < rounds; ++j) {
        const std::string c = "C" + std::to_string(j);
        rep.catalyst_residuals.push_back(trace_distance(partial_trace(state, {c}).matrix(), gamma_matrix(cat_etas[j])));
        if (j > 0) rep.neighbour_mutual_information.push_back(mutual_information(state, {"C" + std::to_string(j - 1)}, {c}));
    }
    rep.joint_state = state;
    return rep;
}

Mat counterexample_polynomial(double x) {
    const double x2 = x * x, x4 = x2 * x2, x6 = x4 * x2, x8 = x4 * x4, x10 = x8 * x2;
    const double den = 14495514624.0;
    const double p11 = (11919015936.0 - 1140507536.0 * x2 + 91814899.0 * x4 + 1471879.0 * x6 - 161703.0 * x8 +
                        2493.0 * x10) / den;
    const double p22 = (2576498688.0 + 1140507536.0 * x2 - 91814899.0 * x4 - 1471879.0 * x6 + 161703.0 * x8 -
                        2493.0 * x10) / den;
    const double off = x * (412672.0 - 19231.0 * x2 - 234.0 * x4 + 9.0 * x6) / (524288.0 * kSqrt3);
    Mat m(2, 2);
    m << p11, off, off, p22;
    return m;
}

CounterexampleReport correlated_rerun_counterexample(double eta0) {
    require_eta(eta0, true, "counterexample");
    const Rational gap(1);
    CounterexampleReport rep;
    rep.eta0 = eta0;
    rep.eta1 = eta_step(eta0);

    ChainReport first = run_chain(eta0, 2, gap, ChainMode::Joint);
    rep.correlated_catalyst = partial_trace(*first.joint_state, {"C0", "C1"});
    rep.catalyst_mutual_information = mutual_information(rep.correlated_catalyst, {"C0"}, {"C1"});

    const KrausChannel e = amplification_channel(gap, "x", "y");
    DensityMatrix rerun = tensor(sigma_state(eta0, gap, "S"), rep.correlated_catalyst);
    rerun = apply_local(e, rerun, {"S", "C0"});
    rerun = apply_local(e, rerun, {"S", "C1"});
    rep.simulated_marginal = partial_trace(rerun, {"C1"});
    rep.printed_polynomial = counterexample_polynomial(eta0);
    rep.gamma_eta1 = gamma_state(rep.eta1, gap, "C1");

    const Mat& sim = rep.simulated_marginal.matrix();
    rep.distance_simulated_polynomial = trace_distance(sim, rep.printed_polynomial);
    rep.distance_simulated_gamma = trace_distance(sim, rep.gamma_eta1.matrix());
    rep.distance_polynomial_gamma = trace_distance(rep.printed_polynomial, rep.gamma_eta1.matrix());
    rep.max_entry_simulated_polynomial = max_abs(sim - rep.printed_polynomial);
    rep.max_entry_simulated_gamma = max_abs(sim - rep.gamma_eta1.matrix());
    return rep;
}

Mat seed_unitary(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("seed_unitary: alpha out of range");
    const double s = std::sqrt(1.0 - alpha * alpha);
    Mat u = Mat::Zero(4, 4);
    u(0, 0) = 1.0;
    u(3, 3) = 1.0;
    u(1, 1) = alpha;
    u(1, 2) = s;
    u(2, 1) = -s;
    u(2, 2) = alpha;
    return u;
}

double alpha_for(double eta) {
    require_eta(eta, true, "alpha_for");
    const double r = (25.0 - eta * eta) / 24.0;
    return std::sqrt(2.0 / (1.0 + r * r));
}

std::vector<Mat> seed_restore_ca_kraus(double alpha) {
    const double a2 = alpha * alpha;
    Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
    k0(0, 0) = 1.0 / std::sqrt(2.0 - a2);
    k0(1, 1) = 1.0;
    k1(1, 0) = std::sqrt((1.0 - a2) / (2.0 - a2));
    return {k0, k1};
}

std::vector<Mat> seed_restore_r_kraus(double alpha) {
    const double a2 = alpha * alpha;
    Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
    k0(0, 0) = 1.0 / std::sqrt(1.0 + a2);
    k0(1, 1) = -1.0;
    k1(1, 0) = alpha / std::sqrt(1.0 + a2);
    return {k0, k1};
}

SeedReport seed_round(double eta, const Rational& gap) {
    require_eta(eta, true, "seed_round");
    SeedReport rep;
    rep.eta = eta;
    rep.eta_prime = eta_step(eta);
    rep.alpha = alpha_for(eta);
    const double a = rep.alpha;
    rep.eta_out = rep.eta_prime * a * std::sqrt(1.0 - a * a) / std::sqrt(1.0 + a * a);

    SystemLayout q1 = SystemLayout::qubit("x", gap);
    DensityMatrix state = tensor(tensor(DensityMatrix::basis(SystemLayout::qubit("R", gap), 0),
                                        sigma_state(eta, gap, "Ca")),
                                 gamma_state(eta, gap, "Cb"));
    state = apply_local(amplification_channel(gap, "x", "y"), state, {"Ca", "Cb"});
    state = apply_local(KrausChannel::unitary(q1.concat(SystemLayout::qubit("y", gap)), seed_unitary(a)), state,
                        {"R", "Ca"});
    state = apply_local(KrausChannel(q1, q1, seed_restore_ca_kraus(a)), state, {"Ca"});
    state = apply_local(KrausChannel(q1, q1, seed_restore_r_kraus(a)), state, {"R"});

    rep.r_state = partial_trace(state, {"R"});
    rep.eta_out_simulated = 2.0 * rep.r_state.matrix()(0, 1).real();
    rep.max_imaginary = rep.r_state.matrix().imag().cwiseAbs().maxCoeff();
    rep.ca_final = partial_trace(state, {"Ca"}).matrix();
    rep.cb_final = partial_trace(state, {"Cb"}).matrix();
    rep.ca_residual = trace_distance(rep.ca_final, sigma_matrix(eta));
    rep.cb_residual = trace_distance(rep.cb_final, gamma_matrix(eta));
    rep.ca_cb_mutual_information = mutual_information(partial_trace(state, {"Ca", "Cb"}), {"Ca"}, {"Cb"});
    return rep;
}

}  // namespace qcat
