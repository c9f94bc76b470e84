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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcat/qcore.hpp"
#include "qcat/report.hpp"

namespace qcat {

// ---- asymptotic to correlated-catalytic conversion ----

// Catalyst on S_2..S_n (x) Reg, with a classical n-level register of zero energy.
struct RegisterCatalyst {
    int n = 1;
    DensityMatrix body;
    DensityMatrix asymptotic_output;  // Xi = big_channel(rho^{(x)n}) on S_1..S_n
};

struct Conversion {
    RegisterCatalyst catalyst;
    KrausChannel lambda;            // swap o relabel o cond on S_1..S_n (x) Reg
    DensityMatrix joint_output;     // Lambda(rho (x) tau)
    DensityMatrix system_output;    // marginal on S_1
    ProtocolReport report;
};

// Labels used for the copies and the register.
std::string copy_label(int i);  // "S1", "S2", ...
inline const char* kRegisterLabel = "Reg";

// n copies of rho's (single-subsystem) layout, relabelled S1..Sn.
SystemLayout copies_layout(const SystemLayout& single, int n);
// rho^{(x) n} on copies_layout.
DensityMatrix tensor_power(const DensityMatrix& rho, int n);

Conversion convert_asymptotic(const DensityMatrix& rho, const DensityMatrix& rho_prime,
                              const KrausChannel& big_channel, int n, double epsilon);

// Places a and b into their direct sum: a occupies the first block, b the second. Used when
// rho and rho' live on different spaces.
SystemLayout direct_sum_layout(const SystemLayout& a, const SystemLayout& b, const std::string& label);
DensityMatrix embed_first(const DensityMatrix& a, const SystemLayout& sum);
DensityMatrix embed_second(const DensityMatrix& b, const SystemLayout& sum);

// ---- resource measures ----

// -1/2 Tr[[sqrt(rho), H]^2] with H the additive layout Hamiltonian.
double skew_information(const DensityMatrix& rho);
// S(dephase(rho)) - S(rho); dephasing keeps blocks of equal total energy.
double relative_entropy_coherence(const DensityMatrix& rho);
Mat dephase_energy(const DensityMatrix& rho);

struct ResourceMeasure {
    std::string name;
    std::function<double(const DensityMatrix&)> evaluate;
};
ResourceMeasure skew_measure();
ResourceMeasure coherence_measure();

struct CatalyticRecord {
    DensityMatrix joint_in;
    DensityMatrix joint_out;
    std::vector<std::string> system;                  // labels of the main system
    std::vector<std::vector<std::string>> catalysts;  // one label group per catalyst
};

struct MonotonicityReport {
    std::string measure;
    double joint_in = 0.0, joint_out = 0.0;
    double system_in = 0.0, system_out = 0.0;
    std::vector<double> catalysts_in, catalysts_out;
    double marginal_sum_out = 0.0;        // system_out + sum catalysts_out
    double max_catalyst_change = 0.0;     // largest |r(catalyst_out) - r(catalyst_in)|
    double tensor_additivity_gap = 0.0;   // joint_in - (system_in + sum catalysts_in)
    double superadditivity_gap = 0.0;     // joint_out - marginal_sum_out (negative = violation)
    bool tensor_additivity_holds = false;
    bool superadditivity_holds = false;
    bool joint_monotone = false;          // joint_out <= joint_in
    bool system_monotone = false;         // system_out <= system_in
};

MonotonicityReport check_catalytic_monotonicity(const ResourceMeasure& measure, const CatalyticRecord& record,
                                                double tol = 1e-9);

// ---- three-level broadcasting ----

struct BroadcastConfig {
    double delta = 0.1;
    std::vector<Rational> energies{Rational(0), Rational(1), Rational(3)};
};

Mat broadcast_rho_tilde(double delta);
Mat broadcast_tau(double delta);
// Largest delta in (0, 1/4] with tau(delta) PSD, by bisection on its minimum eigenvalue.
double broadcast_delta_max();
// Default input state with rho_13 = 0 and other entries nonzero.
Mat broadcast_default_rho();

struct BroadcastResult {
    double delta = 0.0;
    double delta_max = 0.0;
    KrausChannel e1;
    KrausChannel e2;
    DensityMatrix rho_tilde;
    DensityMatrix tau;
    DensityMatrix sigma;
    DensityMatrix rho_prime;
    double rho_prime_13 = 0.0;
    double expected_rho_prime_13 = 0.0;  // 152/225 delta^2
    double catalyst_residual = 0.0;      // max entry of Tr_S sigma - tau
    double tau12_residual = 0.0, tau23_residual = 0.0, tau13_residual = 0.0;
    double k0_only_22_deficit = 0.0;     // tau_22 - (Tr_S K0 . K0^dag)_22 >= 0
    double e1_output_residual = 0.0;     // max entry of E1(rho) - rho_tilde
    ProtocolReport report;
};

// rho is the three-level input with rho_13 = 0; E1 maps it to rho_tilde(delta).
BroadcastResult broadcast3(const BroadcastConfig& cfg, const std::optional<Mat>& rho = std::nullopt);
// E1 alone: phase rotation, diagonal damping, classical routing of the removed population.
KrausChannel broadcast_e1(const Mat& rho, double delta, const SystemLayout& layout);
KrausChannel broadcast_e2(const SystemLayout& sc_layout);

// ---- partial reusability ----

struct CatalystInstance {
    int copy = 0;
    int slot = 0;
    bool operator==(const CatalystInstance& o) const { return copy == o.copy && slot == o.slot; }
};

struct ReuseRun {
    std::vector<CatalystInstance> instances;  // one per slot
};

struct ReuseSchedule {
    int K = 0;
    int n = 0;
    int copies = 0;
    std::vector<ReuseRun> runs;
};

struct ReuseValidation {
    bool valid = false;
    int runs = 0;
    int expected_runs = 0;
    int correlated_pair_violations = 0;
    int slot_violations = 0;
    int correlated_pairs_final = 0;
};

ReuseSchedule reuse_schedule(int K, int n);
// Replays the runs on a correlation graph. A run makes its instances pairwise correlated and
// correlates each of them with every outside instance already correlated with a run member;
// pairs with neither end in the run keep their joint state.
ReuseValidation validate_reuse(const ReuseSchedule& s);

}  // namespace qcat
