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

#include "qcat/linalg.hpp"
#include "qcat/qcore.hpp"

using namespace qcat;

namespace {

// Independent oracles: states written out by hand.
Mat sigma_oracle(double eta) {
    Mat m(2, 2);
    m << 0.5, eta / 2, eta / 2, 0.5;
    return m;
}

Mat gamma_oracle(double eta) {
    double x = std::sqrt(3.0) * eta / 2, z = (4 - eta * eta) / 6;
    Mat m(2, 2);
    m << 0.5 * (1 + z), 0.5 * x, 0.5 * x, 0.5 * (1 - z);
    return m;
}

SystemLayout q(const std::string& l) { return SystemLayout::qubit(l, Rational(1)); }

}  // namespace

TEST_CASE("rational arithmetic stays in lowest terms") {
    Rational a(6, -4);
    CHECK(a.num() == -3);
    CHECK(a.den() == 2);
    CHECK((Rational(1, 2) + Rational(1, 3)).str() == "5/6");
    CHECK(Rational::parse("3/2") == Rational(3, 2));
    CHECK(Rational::parse("2.5") == Rational(5, 2));
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(rational_gcd(Rational(1, 2), Rational(1, 3)) == Rational(1, 6));
    CHECK(rational_gcd(Rational(3, 2), Rational(1)) == Rational(1, 2));
    CHECK_THROWS_AS(Rational::parse("x/2"), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("layout bookkeeping") {
    SystemLayout l = q("A").concat(SystemLayout::single("B", {Rational(0), Rational(1, 2), Rational(3, 2)}));
    CHECK(l.total_dim() == 6);
    CHECK(l.energy(5) == Rational(5, 2));
    CHECK(l.hamiltonian_diagonal()(4) == doctest::Approx(1.5));
    CHECK_THROWS_AS(q("A").concat(q("A")), InputError);
}

TEST_CASE("tensor products") {
    auto mixed = DensityMatrix::maximally_mixed(q("A"));
    auto mixed_b = DensityMatrix::maximally_mixed(q("B"));
    CHECK(max_abs(tensor(mixed, mixed_b).matrix() - Mat::Identity(4, 4) / 4.0) < 1e-15);

    auto z = DensityMatrix::basis(q("A"), 0);
    auto o = DensityMatrix::basis(q("B"), 1);
    Mat expect = Mat::Zero(4, 4);
    expect(1, 1) = 1.0;
    CHECK(max_abs(tensor(z, o).matrix() - expect) < 1e-15);

    DensityMatrix sg = tensor(DensityMatrix(q("S"), sigma_oracle(0.5)), DensityMatrix(q("C"), gamma_oracle(0.5)));
    CHECK(std::abs(sg.matrix().trace() - cd(1.0)) < 1e-14);
    CHECK(sg.layout().labels() == std::vector<std::string>{"S", "C"});
    CHECK_THROWS_AS(tensor(z, DensityMatrix::basis(q("A"), 1)), InputError);
}

TEST_CASE("partial trace") {
    auto a = DensityMatrix(q("A"), random_density(2, 2, 11));
    auto b = DensityMatrix(SystemLayout::single("B", {0, 1, 2}), random_density(3, 3, 12));
    auto ab = tensor(a, b);
    CHECK(max_abs(partial_trace(ab, {"A"}).matrix() - a.matrix()) < 1e-12);
    CHECK(max_abs(partial_trace(ab, {"B"}).matrix() - b.matrix()) < 1e-12);

    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    auto pb = DensityMatrix::pure(q("A").concat(q("B")), bell);
    CHECK(max_abs(partial_trace(pb, {"A"}).matrix() - Mat::Identity(2, 2) / 2.0) < 1e-15);
    CHECK_THROWS_AS(partial_trace(pb, {"Z"}), InputError);

    // Random pairs: tracing out the second factor recovers the first.
    for (int s = 0; s < 10; ++s) {
        auto x = DensityMatrix(q("A"), random_density(2, 2, 100 + s));
        auto y = DensityMatrix(SystemLayout::single("B", {0, 1, 2}), random_density(3, 2, 200 + s));
        CHECK(max_abs(partial_trace(tensor(x, y), {"A"}).matrix() - x.matrix()) < 1e-12);
    }
}

TEST_CASE("trace distance") {
    auto r = DensityMatrix(q("A"), random_density(2, 2, 3));
    CHECK(trace_distance(r, r) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(trace_distance(DensityMatrix::basis(q("A"), 0), DensityMatrix::basis(q("A"), 1)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    double d = trace_distance(sigma_oracle(0.5), sigma_oracle(0.515625));
    CHECK(std::abs(d - 0.0078125) < 1e-14);

    for (int s = 0; s < 10; ++s) {
        Mat x = random_density(4, 4, 10 * s + 1), y = random_density(4, 2, 10 * s + 2), z = random_density(4, 3, 10 * s + 3);
        CHECK(trace_distance(x, z) <= trace_distance(x, y) + trace_distance(y, z) + 1e-10);
        Mat u = random_unitary(4, 10 * s + 4);
        CHECK(std::abs(trace_distance(u * x * u.adjoint(), u * y * u.adjoint()) - trace_distance(x, y)) < 1e-10);
    }
    CHECK_THROWS_AS(trace_distance(Mat::Identity(2, 2), Mat::Identity(3, 3)), InputError);
}

TEST_CASE("density matrix invariants are enforced") {
    Mat m = Mat::Identity(2, 2) * 0.45;
    try {
        DensityMatrix bad(q("A"), m);
        FAIL("expected an invariant violation");
    } catch (const InvariantError& e) {
        CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
    Mat neg(2, 2);
    neg << 1.2, 0, 0, -0.2;
    CHECK_THROWS_AS(DensityMatrix(q("A"), neg), InvariantError);
}

TEST_CASE("channel application") {
    auto r = DensityMatrix(q("A"), random_density(2, 2, 5));
    CHECK(max_abs(apply_channel(KrausChannel::identity(q("A")), r).matrix() - r.matrix()) < 1e-15);

    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    KrausChannel dephase(q("A"), q("A"), std::vector<Mat>{p0, p1});
    auto out = apply_channel(dephase, DensityMatrix(q("A"), sigma_oracle(0.5)));
    CHECK(max_abs(out.matrix() - Mat::Identity(2, 2) / 2.0) < 1e-15);

    Mat half = Mat::Identity(2, 2) * 0.5;
    CHECK_THROWS_AS(KrausChannel(q("A"), q("A"), std::vector<Mat>{half}), InvariantError);
}

TEST_CASE("local application matches the full Kronecker operator") {
    SystemLayout l = q("A").concat(SystemLayout::single("B", {0, 1, 2})).concat(q("C"));
    DensityMatrix rho(l, random_density(12, 5, 77));
    Mat u = random_unitary(4, 78);
    KrausChannel local = KrausChannel::unitary(q("x").concat(q("y")), u);
    DensityMatrix fast = apply_local(local, rho, {"C", "A"});
    // Build the full operator: move (C, A, B) order, apply U (x) I, move back.
    Mat p = permutation_unitary(l.dims(), {2, 0, 1});
    Mat full = p.adjoint() * kron(u, Mat::Identity(3, 3)) * p;
    CHECK(max_abs(fast.matrix() - full * rho.matrix() * full.adjoint()) < 1e-12);
}

TEST_CASE("permutation and swap") {
    auto a = DensityMatrix(q("A"), random_density(2, 2, 1));
    auto b = DensityMatrix(SystemLayout::single("B", {0, 1, 2}), random_density(3, 3, 2));
    auto ab = tensor(a, b);
    auto ba = permute(ab, {1, 0});
    CHECK(ba.layout().labels() == std::vector<std::string>{"B", "A"});
    CHECK(max_abs(ba.matrix() - kron(b.matrix(), a.matrix())) < 1e-15);

    auto c = DensityMatrix(q("C"), random_density(2, 2, 3));
    auto ac = tensor(a, c);
    auto swapped = swap_subsystems(ac, "A", "C");
    CHECK(max_abs(swapped.matrix() - kron(c.matrix(), a.matrix())) < 1e-15);
    CHECK_THROWS_AS(swap_subsystems(ab, "A", "B"), InputError);
}

TEST_CASE("covariance checks") {
    std::vector<double> times{0.1, 1.0, M_PI, 10.0};
    auto rep = check_covariance(KrausChannel::identity(q("A")), times, 20, 1e-9);
    CHECK(rep.passed);
    CHECK(rep.max_deviation == doctest::Approx(0.0));

    Mat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    auto had = check_covariance(KrausChannel::unitary(q("A"), h), {M_PI}, 5, 1e-9);
    CHECK_FALSE(had.passed);
    CHECK(had.max_deviation > 0.1);
}

TEST_CASE("energy conserving unitaries") {
    SystemLayout two = q("A").concat(q("B"));
    CHECK(check_energy_conserving_unitary(Mat::Identity(4, 4), two, 1e-12));
    Mat swap = permutation_unitary({2, 2}, {1, 0});
    CHECK(check_energy_conserving_unitary(swap, two, 1e-12));
    Mat x(2, 2);
    x << 0, 1, 1, 0;
    CHECK_FALSE(check_energy_conserving_unitary(x, q("A"), 1e-12));
    CHECK(commutator_norm_with_hamiltonian(x, q("A")) == doctest::Approx(1.0));
    CHECK(commutator_norm_with_hamiltonian(x, SystemLayout::qubit("A", Rational(5, 2))) == doctest::Approx(2.5));
    CHECK_THROWS_AS(check_energy_conserving_unitary(Mat::Identity(2, 2) * 2.0, q("A"), 1e-12), InputError);
}

TEST_CASE("entropy and mutual information") {
    CHECK(von_neumann_entropy(Mat::Identity(2, 2) / 2.0) == doctest::Approx(std::log(2.0)));
    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    auto pb = DensityMatrix::pure(q("A").concat(q("B")), bell);
    CHECK(mutual_information(pb, {"A"}, {"B"}) == doctest::Approx(2 * std::log(2.0)));
    CHECK(product_residual(pb, {"A"}) == doctest::Approx(0.75));
    auto prod = tensor(DensityMatrix(q("A"), random_density(2, 2, 9)), DensityMatrix(q("B"), random_density(2, 2, 10)));
    CHECK(product_residual(prod, {"B"}) < 1e-14);
}

TEST_CASE("large Hermitian eigendecompositions reconstruct the input") {
    // Sizes above the LAPACK dispatch threshold, including the range where some
    // divide-and-conquer builds return wrong eigenvectors.
    for (Index n : {100, 512, 1024}) {
        Mat r = random_density(n, static_cast<int>(n), 5);
        Eigen::VectorXd w;
        Mat v;
        linalg::eigh(r, w, v);
        CHECK(max_abs(v * w.cast<cd>().asDiagonal() * v.adjoint() - r) < 1e-13);
        CHECK(max_abs(v.adjoint() * v - Mat::Identity(n, n)) < 1e-12);
        Mat s = linalg::sqrt_psd(r);
        CHECK(max_abs(s * s - r) < 1e-13);
        CHECK((linalg::eigvalsh(r) - w).cwiseAbs().maxCoeff() < 1e-13);
    }
}
