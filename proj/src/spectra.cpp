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

#include "qcat/spectra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qcat {

namespace {

struct ExtGcd {
    std::int64_t g, x, y;
};

// g = x a + y b with g >= 0.
ExtGcd ext_gcd(std::int64_t a, std::int64_t b) {
    std::int64_t r0 = a, r1 = b, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = checked_add(x0, -checked_mul(q, x1));
        x0 = x1;
        x1 = t;
        t = checked_add(y0, -checked_mul(q, y1));
        y0 = y1;
        y1 = t;
    }
    if (r0 < 0) return {-r0, -x0, -y0};
    return {r0, x0, y0};
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) { return checked_mul(a / std::gcd(a, b), b); }

}  // namespace

CoherenceSupport coherence_support(const Mat& rho, double tol) {
    if (rho.rows() != rho.cols()) throw InputError("coherence_support: matrix is not square");
    CoherenceSupport s;
    s.n_levels = static_cast<int>(rho.rows());
    for (int i = 0; i < s.n_levels; ++i)
        for (int j = i + 1; j < s.n_levels; ++j)
            if (std::abs(rho(i, j)) > tol) s.pairs.emplace_back(i, j);
    return s;
}

CoherenceSupport coherence_support(const DensityMatrix& rho, double tol) {
    if (rho.layout().subsystems().size() != 1)
        throw InputError("coherence_support: expects a single-subsystem layout");
    return coherence_support(rho.matrix(), tol);
}

RationalLattice::RationalLattice(std::vector<Rational> generators) : gens_(std::move(generators)) {
    basis_coeffs_.assign(gens_.size(), 0);
    std::int64_t den = 1;
    for (const auto& g : gens_) den = lcm_checked(den, g.den());
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const std::int64_t a = checked_mul(gens_[i].num(), den / gens_[i].den());
        if (a == 0) continue;
        ExtGcd e = ext_gcd(acc, a);
        for (std::size_t k = 0; k < i; ++k) basis_coeffs_[k] = checked_mul(basis_coeffs_[k], e.x);
        basis_coeffs_[i] = e.y;
        acc = e.g;
    }
    basis_ = Rational(acc, den);
}

std::optional<std::vector<std::int64_t>> RationalLattice::solve(const Rational& t) const {
    if (t.is_zero()) return std::vector<std::int64_t>(gens_.size(), 0);
    if (basis_.is_zero()) return std::nullopt;
    Rational q = t / basis_;
    if (!q.is_integer()) return std::nullopt;
    std::vector<std::int64_t> c(gens_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = checked_mul(basis_coeffs_[i], q.num());
    if (!witness_substitutes(gens_, c, t)) throw InvariantError("lattice solver produced a witness that does not substitute");
    return c;
}

bool witness_substitutes(const std::vector<Rational>& gens, const std::vector<std::int64_t>& coeffs,
                         const Rational& t) {
    if (gens.size() != coeffs.size()) return false;
    Rational s(0);
    for (std::size_t i = 0; i < gens.size(); ++i) s += Rational(coeffs[i]) * gens[i];
    return s == t;
}

bool ReachableSet::reachable(int i, int j) const {
    if (i == j) return true;
    return witness(i, j).reachable;
}

const PairWitness& ReachableSet::witness(int i, int j) const {
    if (i > j) std::swap(i, j);
    for (const auto& p : pairs)
        if (p.i == i && p.j == j) return p;
    throw InputError("reachable set: unknown pair");
}

ReachableSet reachable_pairs(const CoherenceSupport& support, const std::vector<Rational>& source_energies,
                             const std::vector<Rational>& target_energies) {
    ReachableSet r;
    r.support = support;
    r.n_levels = static_cast<int>(target_energies.size());
    r.target_energies = target_energies;
    for (const auto& [k, l] : support.pairs) {
        if (k < 0 || l < 0 || k >= static_cast<int>(source_energies.size()) ||
            l >= static_cast<int>(source_energies.size()))
            throw InputError("reachable_pairs: support index outside the source spectrum");
        r.generator_gaps.push_back(source_energies[l] - source_energies[k]);
    }
    RationalLattice lattice(r.generator_gaps);
    r.lattice_basis = lattice.basis();
    for (int i = 0; i < r.n_levels; ++i)
        for (int j = i + 1; j < r.n_levels; ++j) {
            PairWitness w;
            w.i = i;
            w.j = j;
            auto sol = lattice.solve(target_energies[j] - target_energies[i]);
            if (sol) {
                w.reachable = true;
                w.coefficients = *sol;
            }
            r.pairs.push_back(std::move(w));
        }
    return r;
}

ClosedIndexPartition maximal_closed_sets(const ReachableSet& reach, int n_levels) {
    if (n_levels != reach.n_levels) throw InputError("maximal_closed_sets: level count mismatch");
    for (const auto& p : reach.pairs)
        if (p.reachable && !witness_substitutes(reach.generator_gaps, p.coefficients,
                                                reach.target_energies[p.j] - reach.target_energies[p.i]))
            throw InvariantError("maximal_closed_sets: witness does not substitute");
    for (int i = 0; i < n_levels; ++i)
        for (int j = 0; j < n_levels; ++j)
            for (int k = 0; k < n_levels; ++k)
                if (reach.reachable(i, j) && reach.reachable(j, k) && !reach.reachable(i, k)) {
                    std::ostringstream os;
                    os << "maximal_closed_sets: pairs (" << i << "," << j << ") and (" << j << "," << k
                       << ") are reachable but (" << i << "," << k << ") is not";
                    throw InvariantError(os.str());
                }
    ClosedIndexPartition part;
    std::vector<int> block_of(n_levels, -1);
    for (int i = 0; i < n_levels; ++i) {
        if (block_of[i] >= 0) continue;
        std::vector<int> b;
        for (int j = i; j < n_levels; ++j)
            if (block_of[j] < 0 && reach.reachable(i, j)) {
                block_of[j] = static_cast<int>(part.blocks.size());
                b.push_back(j);
            }
        part.blocks.push_back(std::move(b));
    }
    return part;
}

}  // namespace qcat
