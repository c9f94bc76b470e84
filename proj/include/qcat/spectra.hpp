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
#include <utility>
#include <vector>

#include "qcat/qcore.hpp"

namespace qcat {

constexpr double kDefaultCoherenceTol = 1e-9;

using IndexPair = std::pair<int, int>;

// Index pairs (i < j) carrying coherence.
struct CoherenceSupport {
    int n_levels = 0;
    std::vector<IndexPair> pairs;
};

CoherenceSupport coherence_support(const DensityMatrix& rho, double tol = kDefaultCoherenceTol);
CoherenceSupport coherence_support(const Mat& rho, double tol = kDefaultCoherenceTol);

// Integer lattice generated by rational numbers. In one dimension the Hermite normal form of the
// generator row is a single entry, the rational gcd; the solver also keeps the integer
// combination that produces it so every member gets an explicit witness.
class RationalLattice {
public:
    explicit RationalLattice(std::vector<Rational> generators);

    const std::vector<Rational>& generators() const { return gens_; }
    // Positive generator of the lattice; zero when every generator is zero.
    const Rational& basis() const { return basis_; }
    // Integer coefficients c with sum c_i g_i = t, or nothing when t is not a member.
    std::optional<std::vector<std::int64_t>> solve(const Rational& t) const;

private:
    std::vector<Rational> gens_;
    Rational basis_{0};
    std::vector<std::int64_t> basis_coeffs_;
};

// Exact check sum_i coeffs[i] * gens[i] == t.
bool witness_substitutes(const std::vector<Rational>& gens, const std::vector<std::int64_t>& coeffs,
                         const Rational& t);

struct PairWitness {
    int i = 0;
    int j = 0;
    bool reachable = false;
    std::vector<std::int64_t> coefficients;  // one per support pair
};

struct ReachableSet {
    CoherenceSupport support;
    std::vector<Rational> generator_gaps;  // E_l - E_k for each support pair (k, l)
    Rational lattice_basis{0};
    int n_levels = 0;
    std::vector<Rational> target_energies;
    std::vector<PairWitness> pairs;  // every i < j over the target levels

    bool reachable(int i, int j) const;
    const PairWitness& witness(int i, int j) const;
};

ReachableSet reachable_pairs(const CoherenceSupport& support, const std::vector<Rational>& source_energies,
                             const std::vector<Rational>& target_energies);

struct ClosedIndexPartition {
    std::vector<std::vector<int>> blocks;
};

// Unique partition into maximal closed index sets. Throws InvariantError if the decided pairs
// are not closed under the difference argument (i~j, j~k => i~k).
ClosedIndexPartition maximal_closed_sets(const ReachableSet& reach, int n_levels);

}  // namespace qcat
