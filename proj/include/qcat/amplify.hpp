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

#include <optional>
#include <string>
#include <vector>

#include "qcat/qcore.hpp"

namespace qcat {

// Sigma(eta) = (I + eta X)/2.
Mat sigma_matrix(double eta);
// Gamma(eta) = (I + (sqrt3 eta / 2) X + ((4 - eta^2)/6) Z)/2.
Mat gamma_matrix(double eta);
DensityMatrix sigma_state(double eta, const Rational& gap, const std::string& label = "S");
DensityMatrix gamma_state(double eta, const Rational& gap, const std::string& label = "C");

// The two-operator amplification channel on (system, catalyst), basis |00>,|01>,|10>,|11>.
std::vector<Mat> amplification_kraus();
KrausChannel amplification_channel(const Rational& gap, const std::string& system_label = "S",
                                   const std::string& catalyst_label = "C");

double eta_step(double eta);
std::vector<double> eta_sequence(double eta0, int rounds);

enum class ChainMode { Auto, Joint, MarginalTracking };

struct ChainReport {
    std::vector<double> eta_sequence;          // eta_0 .. eta_K from the recursion
    std::vector<double> simulated_eta;         // 2 Re<0|rho_S|1> after each round, from the simulation
    DensityMatrix final_system_marginal;
    std::vector<double> catalyst_residuals;    // trace distance of each catalyst marginal to Gamma(eta_j)
    std::vector<double> neighbour_mutual_information;  // I(C_{j-1} : C_j) after the run
    std::optional<DensityMatrix> joint_state;  // only when the joint path ran
    bool joint_path = false;
};

// K sequential amplification rounds on Sigma(eta0) (x) Gamma(eta_0) (x) ... (x) Gamma(eta_{K-1}).
ChainReport run_chain(double eta0, int rounds, const Rational& gap, ChainMode mode = ChainMode::Auto);

// Marginal-tracking primitive: feeds an arbitrary system qubit state through fresh
// catalysts Gamma(eta_j). Each catalyst is touched once.
struct ChainTrace {
    Mat final_system;
    std::vector<Mat> catalyst_marginals;
    std::vector<double> catalyst_residuals;
    std::vector<double> system_catalyst_mutual_information;  // I(S : C_j) right after round j
    std::vector<double> neighbour_mutual_information;        // I(C_{j-1} : C_j) at the end of round j
};
ChainTrace trace_chain(const Mat& system_in, const std::vector<double>& catalyst_etas);

// Linear map X -> Tr_C[E(X (x) Gamma(eta))] extended to any 2x2 operator.
Mat amplification_round_map(const Mat& x, double catalyst_eta);
// The composed map of a chain as a 4x4 matrix on row-major vec(X).
Mat chain_superoperator(const std::vector<double>& catalyst_etas);
Mat apply_superoperator(const Mat& super, const Mat& x);

struct CounterexampleReport {
    double eta0 = 0.0;
    double eta1 = 0.0;
    DensityMatrix correlated_catalyst;    // tau~ on C0 C1 after the product-catalyst K = 2 run
    double catalyst_mutual_information = 0.0;
    DensityMatrix simulated_marginal;     // C1 marginal after rerunning on Sigma(eta0) (x) tau~
    Mat printed_polynomial;               // closed-form matrix as printed
    DensityMatrix gamma_eta1;
    double distance_simulated_polynomial = 0.0;
    double distance_simulated_gamma = 0.0;
    double distance_polynomial_gamma = 0.0;
    double max_entry_simulated_polynomial = 0.0;
    double max_entry_simulated_gamma = 0.0;
};

// Reruns the K = 2 chain with the correlated catalyst it produced and reports the C1 marginal.
CounterexampleReport correlated_rerun_counterexample(double eta0);
// The closed-form polynomial matrix quoted for that marginal.
Mat counterexample_polynomial(double eta0);

// Energy-conserving rotation on span{|01>,|10>} of (R, C^a).
Mat seed_unitary(double alpha);
double alpha_for(double eta);

struct SeedReport {
    double eta = 0.0;
    double eta_prime = 0.0;
    double alpha = 0.0;
    double eta_out = 0.0;            // closed form eta' alpha sqrt(1-alpha^2)/sqrt(1+alpha^2)
    double eta_out_simulated = 0.0;  // 2 <0|r_state|1>
    DensityMatrix r_state;
    double ca_residual = 0.0;
    double cb_residual = 0.0;
    Mat ca_final;                          // Ca marginal after the round
    Mat cb_final;                          // Cb marginal after the round
    double ca_cb_mutual_information = 0.0;
    double max_imaginary = 0.0;
};

// Full seed round on |0>_R (x) Sigma(eta)_{Ca} (x) Gamma(eta)_{Cb}, simulated densely.
SeedReport seed_round(double eta, const Rational& gap);
// Restoration Kraus pairs applied after the seed unitary.
std::vector<Mat> seed_restore_ca_kraus(double alpha);
std::vector<Mat> seed_restore_r_kraus(double alpha);

}  // namespace qcat
