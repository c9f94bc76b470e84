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

#include <cmath>

#include "qcat/synth.hpp"

using namespace qcat;

namespace {

// Pascal's triangle in long double, independent of the log-gamma path.
std::vector<long double> pascal_row(int L) {
    std::vector<long double> row{1.0L};
    for (int i = 0; i < L; ++i) {
        std::vector<long double> next(row.size() + 1, 0.0L);
        for (std::size_t k = 0; k < row.size(); ++k) {
            next[k] += row[k];
            next[k + 1] += row[k];
        }
        row = next;
    }
    return row;
}

double overlap_oracle(int L, int m) {
    auto c = pascal_row(L);
    int a = std::abs(m);
    long double s = 0;
    for (int n = 0; n + a <= L; ++n) s += std::sqrt(c[n] * c[n + a]);
    return static_cast<double>(s / std::pow(2.0L, L));
}

Mat balanced_rotation() {
    Mat v(2, 2);
    v << 1, -1, 1, 1;
    return v / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("binomial resource amplitudes") {
    auto a = binomial_amplitudes(2);
    CHECK(a(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a(1) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(a(2) == doctest::Approx(0.5).epsilon(1e-15));
    auto one = binomial_amplitudes(1);
    CHECK(std::abs(one(0) - 1 / std::sqrt(2.0)) < 1e-15);
    for (int L : {1, 5, 17, 31, 48, 64}) {
        auto v = binomial_amplitudes(L);
        CHECK(std::abs(v.squaredNorm() - 1.0) < 1e-12);
        auto c = pascal_row(L);
        for (int n = 0; n <= L; ++n)
            CHECK(std::abs(v(n) - static_cast<double>(std::sqrt(c[n] / std::pow(2.0L, L)))) < 1e-13);
    }
    CHECK_THROWS_AS(binomial_amplitudes(65), InputError);
    CHECK(binomial_amplitudes(80, 128).size() == 81);
}

TEST_CASE("shift operators") {
    Mat p = shift_operator(3, 0, 2);
    CHECK(p.rows() == 8);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(p(i, i) - cd((i >= 2 && i <= 5) ? 1.0 : 0.0)) < 1e-15);
    Mat s = shift_operator(1, 1, 1);  // levels -1, 0, 1, 2
    CHECK(std::abs(s(0, 1) - cd(1.0)) < 1e-15);  // |0> -> |-1>
    CHECK(std::abs(s(1, 2) - cd(1.0)) < 1e-15);  // |1> -> |0>
    CHECK(s.cwiseAbs().sum() == doctest::Approx(2.0));
    for (int L = 1; L <= 6; ++L)
        for (int M = 0; M <= 3; ++M)
            for (int m = -M; m <= M; ++m) {
                Mat d = shift_operator(L, m, M);
                CHECK(max_abs(d.adjoint() * d - shift_operator(L, 0, M)) < 1e-15);
            }
    CHECK_THROWS_AS(shift_operator(4, 3, 2), InputError);
}

TEST_CASE("overlap values and bounds") {
    CHECK(overlap(1, 1).exact_value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(overlap(2, 1).exact_value == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(std::abs(overlap(8, 1).exact_value - 0.937523) < 1e-6);
    CHECK(std::abs(overlap(8, 1).exact_value - overlap_oracle(8, 1)) < 1e-14);
    for (int L : {1, 4, 9, 30}) CHECK(overlap(L, 0).exact_value == doctest::Approx(1.0).epsilon(1e-14));
    for (int L = 2; L <= 64; L += 2)
        for (int m = 1; m <= 3; ++m) {
            auto r = overlap(L, m);
            CHECK(r.exact_value >= r.central_bound - 1e-15);
            CHECK(r.central_bound >= r.lower_bound - 1e-15);
            CHECK(r.exact_value <= 1.0);
        }
    for (int L = 3; L <= 63; L += 2) CHECK(overlap(L, 1).exact_value >= overlap(L, 1).lower_bound);
    // Binomial sum against <psi|Delta(m)|psi> on the dense ladder.
    for (int L = 1; L <= 20; ++L)
        for (int m = -4; m <= 4; ++m) {
            LadderSystem lad = LadderSystem::embedded(L, 4, Rational(1));
            Vec psi = binomial_vector(lad);
            double dense = (psi.adjoint() * Mat(shift_operator_sparse(lad, m)) * psi)(0, 0).real();
            CHECK(std::abs(dense - overlap(L, m).exact_value) < 1e-12);
        }
    CHECK(overlap(64, 1).exact_value > overlap(16, 1).exact_value);
}

TEST_CASE("unitary channel on a qubit") {
    SystemLayout s = SystemLayout::qubit("S", Rational(1));
    auto id = unitary_channel(Mat::Identity(2, 2), s, 0, 4);
    auto out_id = partial_trace(apply_channel(id.channel, id.nominal_input(0)), {"S"});
    CHECK(max_abs(out_id.matrix() - DensityMatrix::basis(s, 0).matrix()) < 1e-14);

    auto ch = unitary_channel(balanced_rotation(), s, 0, 8);
    auto in = ch.nominal_input(0);
    auto full = apply_channel(ch.channel, in);
    double click = (ch.k0_click_operator() * in.matrix()).trace().real();
    CHECK(std::abs(click - 1.0) < 1e-10);
    Vec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    double f = fidelity_with_pure(partial_trace(full, {"S"}), plus);
    CHECK(std::abs(f - (0.5 + overlap_oracle(8, 1) / 2)) < 1e-9);
    CHECK(std::abs(f - 0.968762) < 1e-6);

    auto big = unitary_channel(balanced_rotation(), s, 0, 64);
    CHECK(fidelity_with_pure(partial_trace(apply_channel(big.channel, big.nominal_input(0)), {"S"}), plus) >= 0.95);

    auto small = unitary_channel(balanced_rotation(), s, 0, 3);
    CHECK(check_covariance(small.channel, {0.7, 2.0}, 4, 1e-9).passed);
    CHECK_THROWS_AS(unitary_channel(Mat::Identity(2, 2) * 2.0, s, 0, 4), InputError);
}

TEST_CASE("unitary channel on a qutrit with rational gaps") {
    SystemLayout s = SystemLayout::single("S", {Rational(0), Rational(1), Rational(5, 2)});
    Mat v = random_unitary(3, 31);
    auto ch = unitary_channel(v, s, 0, 4);
    CHECK(ch.ladders.size() == 2);
    auto out = partial_trace(apply_channel(ch.channel, ch.nominal_input(0)), {"S"});
    Vec psi = v.col(0);
    std::vector<std::vector<int>> shifts{{0, 0}, {1, 0}, {0, 1}};
    CHECK(std::abs(fidelity_with_pure(out, psi) - synthesis_fidelity_closed_form(psi, shifts, 4)) < 1e-12);
    CHECK(check_covariance(ch.channel, {0.4, 1.3}, 3, 1e-9).passed);
}

TEST_CASE("block channel with a shared pair ladder") {
    // Levels 0, 1, 3/2 all reachable from a pair of gap 1/2 with shifts 0, 2, 3.
    SystemLayout s = SystemLayout::single("S", {Rational(0), Rational(1), Rational(3, 2)});
    std::vector<PairLadder> pairs{{0, 1, Rational(1, 2)}};
    std::vector<std::vector<int>> shifts{{0}, {2}, {3}};
    Mat v = random_unitary(3, 5);
    auto ch = quasi_unitary_channel(v, {0, 1, 2}, s, 0, pairs, shifts, 8);
    auto in = ch.nominal_input(0);
    auto out = partial_trace(apply_channel(ch.channel, in), {"S"});
    Vec psi = v.col(0);
    double closed = synthesis_fidelity_closed_form(psi, shifts, 8);
    CHECK(std::abs(fidelity_with_pure(out, psi) - closed) < 1e-12);
    // Oracle: sum_kp |psi_k|^2 |psi_p|^2 overlap(8, m_k - m_p) with the Pascal overlaps.
    double oracle = 0;
    for (int k = 0; k < 3; ++k)
        for (int p = 0; p < 3; ++p)
            oracle += std::norm(psi(k)) * std::norm(psi(p)) * overlap_oracle(8, shifts[k][0] - shifts[p][0]);
    CHECK(std::abs(closed - oracle) < 1e-12);
    CHECK(check_covariance(ch.channel, {0.9}, 3, 1e-9).passed);

    std::vector<std::vector<int>> wrong{{0}, {2}, {2}};
    CHECK_FALSE(resonance_holds(s, {0, 1, 2}, 0, pairs, wrong));
    CHECK_THROWS_AS(quasi_unitary_channel(v, {0, 1, 2}, s, 0, pairs, wrong, 8), InputError);

    // A single pair with 0/1 shifts matches the plain construction.
    SystemLayout q = SystemLayout::qubit("S", Rational(1));
    auto a = quasi_unitary_channel(balanced_rotation(), {0, 1}, q, 0, {{0, 1, Rational(1)}}, {{0}, {1}}, 6);
    auto b = unitary_channel(balanced_rotation(), q, 0, 6);
    auto oa = partial_trace(apply_channel(a.channel, a.nominal_input(0)), {"S"});
    auto ob = partial_trace(apply_channel(b.channel, b.nominal_input(0)), {"S"});
    CHECK(max_abs(oa.matrix() - ob.matrix()) < 1e-14);
}

TEST_CASE("channel implementation through a dilation") {
    SystemLayout s = SystemLayout::qubit("S", Rational(1));
    DensityMatrix rho(s, random_density(2, 2, 41));
    auto id = implement_channel(Mat::Identity(4, 4), 2, rho, 4);
    CHECK(id.distance < 1e-12);
    CHECK(max_abs(id.output.matrix() - rho.matrix()) < 1e-12);

    // CNOT onto a zero-Hamiltonian environment dephases S.
    Mat cnot = permutation_unitary({2, 2}, {0, 1});
    cnot.setZero();
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    auto deph = implement_channel(cnot, 2, rho, 16);
    CHECK(deph.distance <= 1 - overlap(16, 1).exact_value + 1e-9);
    Mat expect = rho.matrix();
    expect(0, 1) = expect(1, 0) = 0;
    CHECK(max_abs(deph.exact_output.matrix() - expect) < 1e-14);

    // Rotation followed by amplitude damping into a zero-energy environment; the ladder
    // pays for both energy changes.
    double g = 0.3, c = std::sqrt(1 - g), sg = std::sqrt(g);
    Mat ad = Mat::Zero(4, 4);
    ad(0, 0) = ad(3, 3) = 1;
    ad(2, 2) = c;
    ad(1, 2) = sg;
    ad(2, 1) = -sg;
    ad(1, 1) = c;
    Mat dil = ad * kron(balanced_rotation(), Mat::Identity(2, 2));
    DensityMatrix ground = DensityMatrix::basis(s, 0);
    double prev = 1.0;
    for (int L : {4, 8, 16, 32}) {
        auto r = implement_channel(dil, 2, ground, L);
        CHECK(r.M == 1);
        CHECK(r.distance < prev);
        prev = r.distance;
    }
}
