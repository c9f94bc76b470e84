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

#include <string>
#include <vector>

#include "qcat/qcore.hpp"

namespace qcat {

constexpr int kDefaultLadderCap = 64;

// Energy ladder with levels lower..upper, level n at energy n * gap.
// The default embedding is [-M, L + M]. An optional overflow level of zero energy sits after
// the ladder; it receives the weight a compressed resource carries outside levels 0..L.
struct LadderSystem {
    int L = 1;
    int M = 0;
    Rational gap{1};
    int lower = 0;
    int upper = 1;
    bool overflow = false;

    static LadderSystem embedded(int L, int M, const Rational& gap, bool overflow = false);
    Index dim() const { return upper - lower + 1 + (overflow ? 1 : 0); }
    Index overflow_index() const;
    Index index_of(int level) const;
    SystemLayout layout(const std::string& label) const;
    // Projector onto levels 0..L.
    SpMat source_projector() const;
};

// sqrt(C(L, n)) / 2^{L/2} for n = 0..L, via log-gamma.
Eigen::VectorXd binomial_amplitudes(int L, int cap = kDefaultLadderCap);
Vec binomial_vector(const LadderSystem& ladder, int cap = kDefaultLadderCap);
DensityMatrix binomial_resource(int L, const Rational& gap, const std::string& label = "R", int M = 0,
                                int cap = kDefaultLadderCap);
DensityMatrix binomial_resource(const LadderSystem& ladder, const std::string& label = "R",
                                int cap = kDefaultLadderCap);

// Delta(m) = sum_{k=0}^{L} |k - m><k| on the ladder [-M, L + M].
Mat shift_operator(int L, int m, int M);
SpMat shift_operator_sparse(const LadderSystem& ladder, int m);

struct OverlapRecord {
    int L = 0;
    int m = 0;
    double exact_value = 0.0;
    double lower_bound = 0.0;
    double central_bound = 0.0;  // 1 - |m| C(L, ceil(L/2)) / 2^L
};

// <+|^{(x)L} Delta(m) |+>^{(x)L} with its large-L lower bound.
OverlapRecord overlap(int L, int m);
double overlap_value(int L, int m);
double overlap_stirling_bound(int L, int m);

// One ladder per S' level i != j_star with nonzero gap E_i - E_{j_star}; input layout is
// S' (x) R_0 (x) R_1 ... with ladder labels "R<i>".
struct SynthesisChannel {
    KrausChannel channel;
    SystemLayout system;
    std::vector<LadderSystem> ladders;
    std::vector<std::string> ladder_labels;
    std::vector<int> ladder_level;  // S' level each ladder serves; pair index for quasi
    // |j_star> (x) binomial resources on every ladder.
    DensityMatrix nominal_input(int j_star) const;
    Mat k0_click_operator() const;  // K0^dag K0
};

SynthesisChannel unitary_channel(const Mat& v, const SystemLayout& s_prime, int j_star, int L,
                                 bool overflow = false);

// Pair ladder for the block-restricted version: gap E_i - E_j of the coherent pair it came from.
struct PairLadder {
    int i = 0;
    int j = 0;
    Rational gap;
};

// v_block is unitary on the listed block levels of S'; shifts[k][p] is the number of quanta
// ladder p gives up when the block level k is populated from j_star. Requires
// E_k - E_{j_star} = sum_p shifts[k][p] * gap_p exactly.
SynthesisChannel quasi_unitary_channel(const Mat& v_block, const std::vector<int>& block,
                                       const SystemLayout& s_prime, int j_star_in_block,
                                       const std::vector<PairLadder>& pairs,
                                       const std::vector<std::vector<int>>& shifts, int L,
                                       bool overflow = false);
bool resonance_holds(const SystemLayout& s_prime, const std::vector<int>& block, int j_star_in_block,
                     const std::vector<PairLadder>& pairs, const std::vector<std::vector<int>>& shifts);

// Fidelity of the K0 output with V|j_star> when every ladder holds the binomial state:
// sum_k |psi_k|^4 + sum_{k != p} |psi_k|^2 |psi_p|^2 prod_l overlap(L, m_kl - m_pl).
double synthesis_fidelity_closed_form(const Vec& psi, const std::vector<std::vector<int>>& shifts, int L);

struct ChannelImplementation {
    DensityMatrix output;
    DensityMatrix exact_output;
    double distance = 0.0;
    Rational ladder_gap;
    int M = 0;
    double system_ladder_mutual_information = 0.0;
};

// Runs a Stinespring dilation through one ladder resource. The environment starts in |0>
// with the given layout (zero Hamiltonian when only env_dim is supplied).
ChannelImplementation implement_channel(const Mat& stinespring_v, const SystemLayout& env,
                                        const DensityMatrix& rho, int L);
ChannelImplementation implement_channel(const Mat& stinespring_v, int env_dim, const DensityMatrix& rho, int L);

}  // namespace qcat
