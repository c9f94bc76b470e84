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

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcat/rational.hpp"

namespace qcat {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cd>;
using Index = Eigen::Index;

// Raised when a value breaks a type invariant (bad trace, not PSD, ...).
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a request is malformed (unknown label, shape mismatch, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a requested object would exceed the configured dimension cap.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    static constexpr double trace = 1e-12;
    static constexpr double psd = 1e-10;
    static constexpr double hermitian = 1e-10;
    static constexpr double completeness = 1e-10;
};

struct Subsystem {
    std::string label;
    int dim = 0;
    std::vector<Rational> energies;
};

// Ordered list of labelled subsystems with diagonal rational Hamiltonians.
// The total Hamiltonian is the additive sum over subsystems.
class SystemLayout {
public:
    SystemLayout() = default;
    explicit SystemLayout(std::vector<Subsystem> subs);

    static SystemLayout single(const std::string& label, std::vector<Rational> energies);
    // Two-level system with energies {0, gap}.
    static SystemLayout qubit(const std::string& label, const Rational& gap);

    const std::vector<Subsystem>& subsystems() const { return subs_; }
    std::size_t size() const { return subs_.size(); }
    bool empty() const { return subs_.empty(); }
    Index total_dim() const;
    std::vector<int> dims() const;
    std::vector<std::string> labels() const;
    bool has(const std::string& label) const;
    std::size_t index_of(const std::string& label) const;
    const Subsystem& at(const std::string& label) const { return subs_[index_of(label)]; }

    // Total energy of the computational basis state with flat index i.
    Rational energy(Index i) const;
    Eigen::VectorXd hamiltonian_diagonal() const;

    SystemLayout concat(const SystemLayout& other) const;
    SystemLayout subset(const std::vector<std::string>& keep) const;
    SystemLayout reordered(const std::vector<std::size_t>& order) const;
    SystemLayout with_labels(const std::vector<std::string>& labels) const;
    // Same dimensions and energies, labels ignored.
    bool isomorphic(const SystemLayout& other) const;

    friend bool operator==(const SystemLayout& a, const SystemLayout& b);
    friend bool operator!=(const SystemLayout& a, const SystemLayout& b) { return !(a == b); }

private:
    std::vector<Subsystem> subs_;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    // Validates hermiticity, unit trace and positivity; throws InvariantError.
    DensityMatrix(SystemLayout layout, Mat m);

    static DensityMatrix pure(const SystemLayout& layout, const Vec& psi);
    static DensityMatrix basis(const SystemLayout& layout, Index i);
    static DensityMatrix maximally_mixed(const SystemLayout& layout);

    const SystemLayout& layout() const { return layout_; }
    const Mat& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }
    DensityMatrix relabeled(const std::vector<std::string>& labels) const;

private:
    SystemLayout layout_;
    Mat m_;
};

// Checks the invariants without constructing; returns an empty string on success
// and otherwise a diagnostic naming the failed property.
std::string density_diagnostic(const Mat& m, Index expected_dim);

class KrausChannel {
public:
    KrausChannel() = default;
    KrausChannel(SystemLayout in, SystemLayout out, std::vector<SpMat> ops,
                 double tol = Tolerances::completeness);
    KrausChannel(SystemLayout in, SystemLayout out, const std::vector<Mat>& ops,
                 double tol = Tolerances::completeness);

    static KrausChannel identity(const SystemLayout& layout);
    static KrausChannel unitary(const SystemLayout& layout, const Mat& u);

    const SystemLayout& input_layout() const { return in_; }
    const SystemLayout& output_layout() const { return out_; }
    const std::vector<SpMat>& ops() const { return ops_; }
    std::vector<Mat> dense_ops() const;
    // Largest absolute entry of sum K^dag K - I.
    double completeness_error() const;
    // after o this; Kraus set is all pairwise products.
    KrausChannel then(const KrausChannel& after) const;

private:
    SystemLayout in_, out_;
    std::vector<SpMat> ops_;
};

struct CovarianceReport {
    double max_deviation = 0.0;
    std::vector<double> sampled_times;
    bool passed = true;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);
Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<std::size_t>& keep);
double trace_norm(const Mat& m);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Mat& a, const Mat& b);
DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);
Mat apply_kraus(const std::vector<SpMat>& ops, const Mat& m);

// Applies a channel whose input layout is isomorphic to the listed subsystems of rho
// (in that order) without forming the full-dimension Kraus operators. Input and
// output dimensions of the local channel must agree.
DensityMatrix apply_local(const KrausChannel& ch, const DensityMatrix& rho,
                          const std::vector<std::string>& targets);
Mat apply_local(const std::vector<Mat>& ops, const Mat& m, const std::vector<int>& dims,
                const std::vector<std::size_t>& targets);

// Moves subsystem order[i] of rho into position i.
DensityMatrix permute(const DensityMatrix& rho, const std::vector<std::size_t>& order);
// Exchanges two isomorphic subsystems, keeping the layout labels in place.
DensityMatrix swap_subsystems(const DensityMatrix& rho, const std::string& a, const std::string& b);
// Permutation unitary with subsystem order[i] moved to position i.
Mat permutation_unitary(const std::vector<int>& dims, const std::vector<std::size_t>& order);

CovarianceReport check_covariance(const KrausChannel& ch, const std::vector<double>& times,
                                  int trials, double tol, std::uint64_t seed = 7);
bool check_energy_conserving_unitary(const Mat& u, const SystemLayout& layout, double tol);
double commutator_norm_with_hamiltonian(const Mat& u, const SystemLayout& layout);

// e^{-iHt} rho e^{iHt} for the layout Hamiltonian.
Mat time_evolve(const Mat& m, const Eigen::VectorXd& hdiag, double t);

double von_neumann_entropy(const Mat& m);
double mutual_information(const DensityMatrix& rho, const std::vector<std::string>& a,
                          const std::vector<std::string>& b);
double fidelity_with_pure(const DensityMatrix& rho, const Vec& psi);
// Trace distance between rho and the product of its marginals on {a} and the rest.
double product_residual(const DensityMatrix& rho, const std::vector<std::string>& a);

Mat random_density(Index d, int rank, std::uint64_t seed);
Mat random_unitary(Index d, std::uint64_t seed);
Mat kron(const Mat& a, const Mat& b);
SpMat kron(const SpMat& a, const SpMat& b);
double max_abs(const Mat& m);

// Joint-dimension cap; QCAT_DIM_CAP overrides the default of 4096.
Index dimension_cap();

}  // namespace qcat
