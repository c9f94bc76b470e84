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

#include "qcat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace qcat::linalg {

namespace {

constexpr Eigen::Index kLapackThreshold = 96;

// MRRR solver. The divide-and-conquer zheevd shipped with the OpenBLAS build used here returns
// wrong eigenvectors for n >= 512, so it is avoided.
void zheevr(const Eigen::MatrixXcd& m, bool want_vectors, Eigen::VectorXd& w, Eigen::MatrixXcd& z) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    Eigen::MatrixXcd a = 0.5 * (m + m.adjoint());
    w.resize(n);
    z.resize(n, n);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'U', n,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), n, 0.0, 0.0, 0, 0, 0.0,
                                     &found, w.data(),
                                     reinterpret_cast<lapack_complex_double*>(z.data()), n,
                                     isuppz.data());
    if (info != 0 || found != n) throw std::runtime_error("zheevr failed with info " + std::to_string(info));
}

}  // namespace

Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& m) {
    if (m.rows() >= kLapackThreshold) {
        Eigen::VectorXd w;
        Eigen::MatrixXcd a;
        zheevr(m, false, w, a);
        return w;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

void eigh(const Eigen::MatrixXcd& m, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
    if (m.rows() >= kLapackThreshold) {
        zheevr(m, true, values, vectors);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
    values = es.eigenvalues();
    vectors = es.eigenvectors();
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0) return 0.0;
    return eigvalsh(m).minCoeff();
}

Eigen::MatrixXcd sqrt_psd(const Eigen::MatrixXcd& m) {
    Eigen::VectorXd w;
    Eigen::MatrixXcd v;
    eigh(m, w, v);
    // Eigenvalues below the rounding floor are treated as exact zeros; their square roots
    // would otherwise inject O(1e-8) noise from an arbitrary null-space basis.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m.rows()) *
                         std::max(w.cwiseAbs().maxCoeff(), 1.0);
    Eigen::VectorXd s = w.unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
    return v * s.asDiagonal() * v.adjoint();
}

}  // namespace qcat::linalg
