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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcat/qcore.hpp"
#include "qcat/report.hpp"
#include "qcat/spectra.hpp"
#include "qcat/synth.hpp"

namespace qcat {

constexpr double kRestorationTol = 1e-9;

// ---- catalyst ledger ----

struct LedgerEntry {
    std::string label;
    Mat declared;   // initial marginal
    Mat measured;   // final marginal
    double residual = 0.0;
    int round = -1;  // position in the sequence of correlated-catalytic rounds
    bool target_dependent = false;
};

struct CorrelationEdge {
    std::string a;
    std::string b;
    double mutual_information = 0.0;
};

struct CatalystLedger {
    std::vector<LedgerEntry> entries;
    std::vector<CorrelationEdge> correlation_graph;

    double max_residual() const;
    bool marginal_catalytic(double tol = kRestorationTol) const { return max_residual() <= tol; }
};

// ---- budget ----

// Planner error models, see budget_error_model.
enum class ErrorModel { UnionBound, CopyCount };

struct Budget {
    double eta = 0.5;        // catalyst parameter of the seed round; quasi runs: smallest extracted seed
    int K = 0;               // amplification rounds per resource copy
    int L = 1;               // resource copies per ladder
    double predicted_error = 0.0;
    double eta_K = 0.0;      // smallest coherence after K rounds over the copies
    int ladders = 0;
    ErrorModel model = ErrorModel::CopyCount;
};

// Rounds tried by the planner: 0 then powers of two up to 2^12; copies: powers of two up to 64.
std::vector<int> budget_round_grid();
std::vector<int> budget_copy_grid();

// UnionBound: (1 - eta_K) + ladders * (1 - overlap(L, shift_max)).
// CopyCount: ladders * L * (1 - eta_K) / 2 + (d - 1) (1 - c_min) / 2, with c_min the smallest
// product of shift overlaps between two distinct levels; it charges every resource copy.
std::string error_model_name(ErrorModel m);
double budget_error_model(int d_target, int ladders, int L, double eta_K, int shift_max,
                          ErrorModel model = ErrorModel::CopyCount);

// Cheapest grid point (cost ladders * L * (K + 2)) whose model meets target_epsilon and whose
// synthesis dimension d * (L + 2 shift_max + 2)^ladders fits the cap. ladders < 0 means d - 1.
Budget plan_budget(double target_epsilon, int d_target, int shift_max, int ladders = -1, double seed_eta = 0.5,
                   ErrorModel model = ErrorModel::CopyCount);

// ---- ladder bank compression ----

// Maps an operator on L qubits to levels 0..L (symmetric Dicke basis) plus one overflow level
// holding the trace outside the symmetric subspace. The operator is the tensor product of the
// given 2x2 factors. Output dimension L + 2, overflow last.
Mat dicke_compress(const std::vector<Mat>& factors);

// Places a canonical (levels 0..L, overflow) matrix on an embedded ladder with overflow.
SpMat ladder_embedding(const LadderSystem& ladder);

// ---- reports ----

struct MixtureComponent {
    double weight = 0.0;
    Vec state;
    int block = -1;  // closed index set for quasi runs
};

struct PrepareOptions {
    std::optional<Budget> budget;              // skips the planner when set
    double seed_eta = 0.5;
    ErrorModel model = ErrorModel::CopyCount;
    std::optional<std::uint64_t> sample_seed;  // also draws one branch for demonstration
    int max_attempts = 4;                      // planner candidates simulated before giving up
};

struct PreparationReport {
    std::string kind;  // "marginal-catalytic" or "quasi-correlated"
    double epsilon = 0.0;
    double achieved_distance = 0.0;
    Budget budget;
    std::vector<Budget> attempts;
    CatalystLedger ledger;
    std::vector<OverlapRecord> overlaps;
    std::vector<MixtureComponent> mixture;
    DensityMatrix output;
    double product_residual = 0.0;       // system vs catalysts after the swap
    std::string product_residual_scope;  // subsystems included in that check
    Index bank_dimension = 0;
    int catalyst_count = 0;
    std::optional<int> sampled_branch;
    std::optional<double> sampled_distance;
    ClosedIndexPartition partition;      // quasi runs only
    std::vector<IndexPair> pairs_used;   // quasi runs only
    // quasi runs only: per block, shifts[k][p] quanta ladder p gives up for block level k
    std::vector<std::vector<std::vector<int>>> shift_tables;
    std::vector<int> block_anchor;       // quasi runs only: j_star of each block
    ProtocolReport report;
};

PreparationReport prepare_state(const DensityMatrix& target, double epsilon, const PrepareOptions& opt = {});

// ---- quasi-correlated variant ----

struct SeedExtraction {
    std::vector<IndexPair> pairs;       // one entry per reference system, in extraction order
    std::vector<DensityMatrix> seeds;   // R marginals, qubit with gap E_j - E_i
    std::vector<cd> predicted_offdiag;  // <i|rho^{(l)}|j> / sqrt 2
    std::vector<Mat> system_after;      // S marginal after each unitary
};

// Applies the seed unitary for every support pair once, in order.
SeedExtraction extract_seed(const DensityMatrix& rho, const CoherenceSupport& support);
// Repeats the pass rounds times on the same S, giving rounds seeds per pair.
SeedExtraction extract_seed(const DensityMatrix& rho, const std::vector<IndexPair>& pairs, int rounds);

// The seed unitary on S (x) R_ij.
Mat extraction_unitary(int d, int i, int j);

PreparationReport quasi_prepare(const DensityMatrix& rho, const DensityMatrix& target, double epsilon,
                                const PrepareOptions& opt = {});

}  // namespace qcat
