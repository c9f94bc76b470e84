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

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "qcat/amplify.hpp"
#include "qcat/catalytic.hpp"

using namespace qcat;

namespace {

SystemLayout q(const std::string& l) { return SystemLayout::qubit(l, Rational(1)); }

Mat sigma_oracle(double eta) {
    Mat m(2, 2);
    m << 0.5, eta / 2, eta / 2, 0.5;
    return m;
}

// Partial dephasing that scales the off-diagonal by c.
std::vector<Mat> partial_dephasing(double c) {
    double p = (1 - c) / 2;
    Mat z = Mat::Identity(2, 2);
    z(1, 1) = -1;
    return {std::sqrt(1 - p) * Mat(Mat::Identity(2, 2)), std::sqrt(p) * z};
}

KrausChannel two_copy_channel(double c) {
    std::vector<Mat> ops;
    for (const auto& a : partial_dephasing(c))
        for (const auto& b : partial_dephasing(c)) ops.push_back(kron(a, b));
    SystemLayout l = copies_layout(q("S"), 2);
    return KrausChannel(l, l, ops);
}

// -1/2 Tr([sqrt(rho), H]^2) with an Eigen eigendecomposition.
double skew_oracle(const Mat& rho, const Eigen::VectorXd& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Mat s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    Mat hm = h.cast<cd>().asDiagonal();
    Mat c = s * hm - hm * s;
    return -0.5 * (c * c).trace().real();
}

}  // namespace

TEST_CASE("conversion with one copy is exact") {
    DensityMatrix rho(q("S"), sigma_oracle(0.4));
    SystemLayout l = copies_layout(q("S"), 1);
    KrausChannel phi(l, l, partial_dephasing(0.75));
    DensityMatrix target(q("S"), sigma_oracle(0.3));
    auto conv = convert_asymptotic(rho, target, phi, 1, 1e-12);
    CHECK(conv.catalyst.body.dim() == 1);
    CHECK(max_abs(conv.system_output.matrix() - target.matrix()) < 1e-14);
    CHECK(conv.report.passed());
}

TEST_CASE("two-copy conversion restores the register catalyst") {
    DensityMatrix rho(q("S"), sigma_oracle(0.4));
    DensityMatrix target(q("S"), sigma_oracle(0.3));
    auto conv = convert_asymptotic(rho, target, two_copy_channel(0.775), 2, 0.02);
    CHECK(conv.report.passed());
    CHECK(conv.catalyst.body.layout().labels() == std::vector<std::string>{"S2", "Reg"});
    CHECK(max_abs(partial_trace(conv.joint_output, {"S2", "Reg"}).matrix() - conv.catalyst.body.matrix()) < 1e-10);
    CHECK(trace_distance(conv.system_output.matrix(), target.matrix()) <= 0.02);
    // Register stays classical.
    Mat reg = partial_trace(conv.catalyst.body, {"Reg"}).matrix();
    CHECK(std::abs(reg(0, 1)) < 1e-15);
    CHECK_THROWS_AS(convert_asymptotic(rho, target, two_copy_channel(0.775), 2, 1e-4), InputError);
    CHECK(check_covariance(conv.lambda, {0.5, 2.0}, 3, 1e-9).passed);
}

TEST_CASE("three-copy classical conversion matches the copy mixture") {
    Mat p = Mat::Zero(2, 2);
    p(0, 0) = 0.7;
    p(1, 1) = 0.3;
    DensityMatrix rho(SystemLayout::single("S", {0, 0}), p);
    // Fixed permutation of the eight joint labels.
    std::vector<int> perm{3, 6, 0, 5, 7, 1, 2, 4};
    Mat u = Mat::Zero(8, 8);
    for (int i = 0; i < 8; ++i) u(perm[i], i) = 1.0;
    SystemLayout l = copies_layout(rho.layout(), 3);
    KrausChannel big(l, l, std::vector<Mat>{u});
    Mat xi = u * kron(kron(p, p), p) * u.adjoint();
    // Oracle: marginals read off the diagonal directly.
    Mat mix = Mat::Zero(2, 2);
    for (int idx = 0; idx < 8; ++idx)
        for (int k = 0; k < 3; ++k) {
            int bit = (idx >> (2 - k)) & 1;
            mix(bit, bit) += xi(idx, idx) / 3.0;
        }
    DensityMatrix target(rho.layout(), mix);
    Mat tp = kron(kron(mix, mix), mix);
    double eps = trace_distance(xi, tp) + 1e-12;
    auto conv = convert_asymptotic(rho, target, big, 3, eps);
    CHECK(max_abs(conv.system_output.matrix() - mix) < 1e-12);
    CHECK(conv.report.passed());
}

TEST_CASE("direct-sum embedding") {
    DensityMatrix a(q("A"), sigma_oracle(0.2));
    DensityMatrix b(SystemLayout::single("B", {0, 1, 2}), Mat::Identity(3, 3) / 3.0);
    SystemLayout sum = direct_sum_layout(a.layout(), b.layout(), "S");
    CHECK(sum.total_dim() == 5);
    CHECK(embed_first(a, sum).layout().isomorphic(embed_second(b, sum).layout()));
    CHECK(embed_second(b, sum).matrix()(4, 4).real() == doctest::Approx(1.0 / 3));
}

TEST_CASE("skew information") {
    CHECK(skew_information(DensityMatrix(q("S"), Mat(Mat::Identity(2, 2) / 2.0))) == doctest::Approx(0.0));
    Vec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CHECK(skew_information(DensityMatrix::pure(q("S"), plus)) == doctest::Approx(0.25).epsilon(1e-12));
    DensityMatrix s(q("A"), sigma_oracle(0.6));
    CHECK(std::abs(skew_information(tensor(s, s.relabeled({"B"}))) - 2 * skew_information(s)) < 1e-10);
    SystemLayout qt = SystemLayout::single("A", {Rational(0), Rational(1), Rational(5, 2)});
    for (int t = 0; t < 50; ++t) {
        DensityMatrix a(q("A"), random_density(2, 2, 500 + t));
        DensityMatrix b(qt.with_labels({"B"}), random_density(3, 1 + t % 3, 600 + t));
        CHECK(std::abs(skew_information(a) - skew_oracle(a.matrix(), a.layout().hamiltonian_diagonal())) < 1e-10);
        CHECK(std::abs(skew_information(tensor(a, b)) - skew_information(a) - skew_information(b)) < 1e-9);
    }
}

TEST_CASE("relative entropy of coherence") {
    CHECK(relative_entropy_coherence(DensityMatrix(q("S"), Mat(Mat::Identity(2, 2) / 2.0))) == doctest::Approx(0.0));
    Vec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CHECK(relative_entropy_coherence(DensityMatrix::pure(q("S"), plus)) == doctest::Approx(std::log(2.0)));
    // Degenerate levels keep their coherence under dephasing.
    CHECK(relative_entropy_coherence(DensityMatrix::pure(SystemLayout::single("S", {1, 1}), plus)) ==
          doctest::Approx(0.0));
    for (int t = 0; t < 50; ++t) {
        DensityMatrix a(q("A"), random_density(2, 2, 700 + t));
        DensityMatrix b(SystemLayout::qubit("B", Rational(3, 2)), random_density(2, 2, 800 + t));
        CHECK(std::abs(relative_entropy_coherence(tensor(a, b)) - relative_entropy_coherence(a) -
                       relative_entropy_coherence(b)) < 1e-9);
    }
}

TEST_CASE("monotonicity reports") {
    DensityMatrix s(q("S"), sigma_oracle(0.5));
    DensityMatrix c(q("C"), random_density(2, 2, 3));
    DensityMatrix joint = tensor(s, c);
    auto id = check_catalytic_monotonicity(skew_measure(), {joint, joint, {"S"}, {{"C"}}});
    CHECK(id.tensor_additivity_holds);
    CHECK(id.superadditivity_holds);
    CHECK(id.joint_monotone);
    CHECK(id.system_monotone);
    CHECK(std::abs(id.joint_in - id.joint_out) < 1e-15);

    // Amplification chain: system gains, catalysts unchanged, so superadditivity must fail.
    auto chain = run_chain(0.3, 4, Rational(1), ChainMode::Joint);
    DensityMatrix in = sigma_state(0.3, Rational(1), "S");
    for (int j = 0; j < 4; ++j) in = tensor(in, gamma_state(chain.eta_sequence[j], Rational(1), "C" + std::to_string(j)));
    std::vector<std::vector<std::string>> cats;
    for (int j = 0; j < 4; ++j) cats.push_back({"C" + std::to_string(j)});
    auto amp = check_catalytic_monotonicity(skew_measure(), {in, *chain.joint_state, {"S"}, cats});
    CHECK(amp.system_out > amp.system_in);
    CHECK(amp.max_catalyst_change < 1e-10);
    CHECK(amp.tensor_additivity_holds);
    CHECK_FALSE(amp.superadditivity_holds);
    CHECK(amp.superadditivity_gap < -1e-6);

    // Dephasing on S with a catalyst bystander: relative entropy of coherence decreases.
    KrausChannel deph(q("S"), q("S"), partial_dephasing(0.5));
    DensityMatrix out = apply_local(deph, joint, {"S"});
    auto dm = check_catalytic_monotonicity(coherence_measure(), {joint, out, {"S"}, {{"C"}}});
    CHECK(dm.system_monotone);
    CHECK(dm.joint_monotone);
    CHECK(dm.max_catalyst_change < 1e-12);
}

TEST_CASE("three-level broadcasting") {
    auto r = broadcast3({0.1, {Rational(0), Rational(1), Rational(3)}});
    CHECK(std::abs(r.rho_prime_13 - 152.0 / 225.0 * 0.01) < 1e-10);
    CHECK(std::abs(r.rho_prime_13 - 0.0067556) < 1e-7);
    CHECK(r.catalyst_residual < 1e-12);
    CHECK(r.tau12_residual < 1e-12);
    CHECK(r.tau23_residual < 1e-12);
    CHECK(r.tau13_residual < 1e-12);
    CHECK(r.k0_only_22_deficit >= 0.0);
    CHECK(r.report.passed());
    CHECK(check_covariance(r.e1, {0.3, 1.7}, 5, 1e-9).passed);
    CHECK(check_covariance(r.e2, {0.3, 1.7}, 5, 1e-9).passed);
    CHECK(r.delta_max == doctest::Approx(0.25));

    // Rational energies with unrelated gaps.
    auto odd = broadcast3({0.05, {Rational(0), Rational(7, 13), Rational(29, 11)}});
    CHECK(odd.report.passed());
    CHECK(check_covariance(odd.e2, {0.9, 4.1}, 5, 1e-9).passed);
    CHECK(check_covariance(odd.e1, {0.9, 4.1}, 5, 1e-9).passed);

    // Complex input phases are rotated away by E1.
    Mat rho = broadcast_default_rho();
    rho(0, 1) = std::polar(0.2, 0.7);
    rho(1, 0) = std::conj(rho(0, 1));
    rho(1, 2) = std::polar(0.2, -1.1);
    rho(2, 1) = std::conj(rho(1, 2));
    CHECK(broadcast3({0.08, {0, 1, 3}}, rho).report.passed());

    // rho'_13 scales as delta^2.
    std::vector<double> xs, ys;
    for (double d : {0.01, 0.02, 0.04, 0.08}) {
        auto b = broadcast3({d, {0, 1, 3}});
        xs.push_back(std::log(d));
        ys.push_back(std::log(b.rho_prime_13));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / xs.size();
        my += ys[i] / ys.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    CHECK(std::abs(sxy / sxx - 2.0) < 0.01);
    CHECK(broadcast3({1e-4, {0, 1, 3}}).rho_prime_13 < 1e-8);
    CHECK_THROWS_AS(broadcast3({0.3, {0, 1, 3}}), InputError);
}

TEST_CASE("partial reuse schedules") {
    CHECK(reuse_schedule(3, 1).runs.size() == 6);
    CHECK(reuse_schedule(3, 2).runs.size() == 27);
    CHECK(reuse_schedule(2, 3).runs.size() == 32);
    CHECK(reuse_schedule(2, 1).runs.size() == 4);
    for (int K : {2, 3})
        for (int n : {1, 2, 3}) {
            auto v = validate_reuse(reuse_schedule(K, n));
            CHECK(v.valid);
            CHECK(v.correlated_pair_violations == 0);
            CHECK(v.runs == (n + 1) * static_cast<int>(std::pow(K, n)));
        }
    // Running the same combination twice is caught.
    auto s = reuse_schedule(3, 1);
    s.runs.push_back(s.runs.back());
    CHECK_FALSE(validate_reuse(s).valid);
    CHECK(validate_reuse(s).correlated_pair_violations > 0);
    // A run that reuses two slots of one copy after that copy ran is caught too.
    auto t = reuse_schedule(2, 1);
    t.runs[2].instances[1].copy = t.runs[2].instances[0].copy;
    CHECK_FALSE(validate_reuse(t).valid);
    CHECK_THROWS_AS(reuse_schedule(1, 2), InputError);
}
