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

#include "qcat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace qcat {

namespace {

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

SpMat sparse_identity(Index d) {
    SpMat i(d, d);
    i.setIdentity();
    return i;
}

SpMat sparse_unit(Index d, Index r, Index c, cd v = 1.0) {
    SpMat m(d, d);
    m.insert(r, c) = v;
    return m;
}

void require_unitary(const Mat& v, const char* what) {
    if (v.rows() != v.cols()) throw InputError(std::string(what) + ": matrix is not square");
    if (max_abs(v.adjoint() * v - Mat::Identity(v.rows(), v.cols())) > 1e-10)
        throw InputError(std::string(what) + ": matrix is not unitary");
}

// K0 = sum_k V_{k j*} |k><j*| (x) prod_p Delta_p(shift[k][p]), K1 the complement.
KrausChannel build_two_kraus(const Vec& column, const std::vector<int>& levels, int j_star, Index d,
                             const std::vector<LadderSystem>& ladders, const std::vector<std::vector<int>>& shifts,
                             const SystemLayout& layout) {
    SpMat p_all = sparse_identity(1);
    for (const auto& l : ladders) p_all = kron(p_all, l.source_projector());
    const Index bank = p_all.rows();

    SpMat k0(d * bank, d * bank);
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
        const cd amp = column(static_cast<Index>(idx));
        if (amp == cd(0.0)) continue;
        SpMat shift = sparse_identity(1);
        for (std::size_t p = 0; p < ladders.size(); ++p)
            shift = kron(shift, shift_operator_sparse(ladders[p], shifts[idx][p]));
        k0 += kron(sparse_unit(d, levels[idx], j_star, amp), shift);
    }
    SpMat not_j = sparse_identity(d) - sparse_unit(d, j_star, j_star);
    SpMat k1 = kron(not_j, p_all) + kron(sparse_identity(d), SpMat(sparse_identity(bank) - p_all));
    k0.prune(cd(0.0));
    k1.prune(cd(0.0));
    return KrausChannel(layout, layout, std::vector<SpMat>{k0, k1});
}

}  // namespace

LadderSystem LadderSystem::embedded(int L, int M, const Rational& gap, bool overflow) {
    if (L < 1) throw InputError("ladder: L must be at least 1");
    if (M < 0) throw InputError("ladder: M must be nonnegative");
    LadderSystem s;
    s.L = L;
    s.M = M;
    s.gap = gap;
    s.lower = -M;
    s.upper = L + M;
    s.overflow = overflow;
    return s;
}

Index LadderSystem::overflow_index() const {
    if (!overflow) throw InputError("ladder: no overflow level");
    return dim() - 1;
}

Index LadderSystem::index_of(int level) const {
    if (level < lower || level > upper) throw InputError("ladder: level outside the embedding");
    return level - lower;
}

SystemLayout LadderSystem::layout(const std::string& label) const {
    std::vector<Rational> e;
    for (int n = lower; n <= upper; ++n) e.push_back(gap * Rational(n));
    if (overflow) e.push_back(Rational(0));
    return SystemLayout::single(label, std::move(e));
}

SpMat LadderSystem::source_projector() const {
    SpMat p(dim(), dim());
    for (int n = 0; n <= L; ++n) p.insert(index_of(n), index_of(n)) = 1.0;
    return p;
}

Eigen::VectorXd binomial_amplitudes(int L, int cap) {
    if (L < 1) throw InputError("binomial resource: L must be at least 1");
    if (L > cap) throw InputError("binomial resource: L exceeds the configured cap " + std::to_string(cap));
    Eigen::VectorXd a(L + 1);
    const double half_log2 = 0.5 * L * std::log(2.0);
    for (int n = 0; n <= L; ++n) a(n) = std::exp(0.5 * log_binomial(L, n) - half_log2);
    if (std::abs(a.squaredNorm() - 1.0) > 1e-12) throw InvariantError("binomial resource: normalization lost");
    return a;
}

Vec binomial_vector(const LadderSystem& ladder, int cap) {
    Eigen::VectorXd a = binomial_amplitudes(ladder.L, cap);
    Vec v = Vec::Zero(ladder.dim());
    for (int n = 0; n <= ladder.L; ++n) v(ladder.index_of(n)) = a(n);
    return v;
}

DensityMatrix binomial_resource(const LadderSystem& ladder, const std::string& label, int cap) {
    return DensityMatrix::pure(ladder.layout(label), binomial_vector(ladder, cap));
}

DensityMatrix binomial_resource(int L, const Rational& gap, const std::string& label, int M, int cap) {
    return binomial_resource(LadderSystem::embedded(L, M, gap), label, cap);
}

SpMat shift_operator_sparse(const LadderSystem& ladder, int m) {
    if (-m < ladder.lower || ladder.L - m > ladder.upper)
        throw InputError("shift operator: |m| exceeds the ladder embedding");
    SpMat s(ladder.dim(), ladder.dim());
    for (int k = 0; k <= ladder.L; ++k) s.insert(ladder.index_of(k - m), ladder.index_of(k)) = 1.0;
    return s;
}

Mat shift_operator(int L, int m, int M) {
    if (std::abs(m) > M) throw InputError("shift operator: |m| > M");
    return Mat(shift_operator_sparse(LadderSystem::embedded(L, M, Rational(1)), m));
}

double overlap_value(int L, int m) {
    if (L < 1) throw InputError("overlap: L must be at least 1");
    const int a = std::abs(m);
    if (a > L) return 0.0;
    double s = 0.0;
    const double log2L = L * std::log(2.0);
    for (int n = 0; n <= L - a; ++n) s += std::exp(0.5 * (log_binomial(L, n + a) + log_binomial(L, n)) - log2L);
    return s;
}

double overlap_stirling_bound(int L, int m) {
    const double a = std::abs(m);
    const double c = 2.0 * a / std::sqrt(2.0 * M_PI);
    if (L % 2 == 0) return 1.0 - c / std::sqrt(static_cast<double>(L));
    const double l = L;
    if (L == 1) return 1.0 - a * 0.5;  // the asymptotic odd form diverges here; use the central term
    return 1.0 - c * std::pow(1.0 + 1.0 / l, -l / 2) * std::pow(1.0 - 1.0 / l, -l / 2) /
                     (std::sqrt(l) + 1.0 / std::sqrt(l));
}

OverlapRecord overlap(int L, int m) {
    OverlapRecord r;
    r.L = L;
    r.m = m;
    r.exact_value = overlap_value(L, m);
    r.lower_bound = m == 0 ? 1.0 : overlap_stirling_bound(L, m);
    const int centre = L % 2 == 0 ? L / 2 : (L + 1) / 2;
    r.central_bound = 1.0 - std::abs(m) * std::exp(log_binomial(L, centre) - L * std::log(2.0));
    return r;
}

DensityMatrix SynthesisChannel::nominal_input(int j_star) const {
    DensityMatrix st = DensityMatrix::basis(system, j_star);
    for (std::size_t p = 0; p < ladders.size(); ++p) st = tensor(st, binomial_resource(ladders[p], ladder_labels[p]));
    return st;
}

Mat SynthesisChannel::k0_click_operator() const {
    const SpMat& k0 = channel.ops().front();
    return Mat(SpMat(k0.adjoint() * k0));
}

SynthesisChannel unitary_channel(const Mat& v, const SystemLayout& s_prime, int j_star, int L, bool overflow) {
    require_unitary(v, "unitary_channel");
    const Index d = s_prime.total_dim();
    if (v.rows() != d) throw InputError("unitary_channel: V does not match the system dimension");
    if (j_star < 0 || j_star >= d) throw InputError("unitary_channel: j_star out of range");

    SynthesisChannel out;
    out.system = s_prime;
    std::vector<int> levels;
    for (int k = 0; k < d; ++k) levels.push_back(k);
    for (int k = 0; k < d; ++k) {
        if (k == j_star) continue;
        Rational g = s_prime.energy(k) - s_prime.energy(j_star);
        if (g == Rational(0)) continue;
        out.ladders.push_back(LadderSystem::embedded(L, 1, g, overflow));
        out.ladder_labels.push_back("R" + std::to_string(k));
        out.ladder_level.push_back(k);
    }
    std::vector<std::vector<int>> shifts(d, std::vector<int>(out.ladders.size(), 0));
    for (std::size_t p = 0; p < out.ladders.size(); ++p) shifts[out.ladder_level[p]][p] = 1;

    SystemLayout layout = s_prime;
    for (std::size_t p = 0; p < out.ladders.size(); ++p)
        layout = layout.concat(out.ladders[p].layout(out.ladder_labels[p]));
    if (layout.total_dim() > dimension_cap())
        throw DimensionError("unitary_channel: dimension " + std::to_string(layout.total_dim()) + " exceeds the cap");
    out.channel = build_two_kraus(v.col(j_star), levels, j_star, d, out.ladders, shifts, layout);
    return out;
}

bool resonance_holds(const SystemLayout& s_prime, const std::vector<int>& block, int j_star_in_block,
                     const std::vector<PairLadder>& pairs, const std::vector<std::vector<int>>& shifts) {
    if (shifts.size() != block.size()) return false;
    const Rational e_star = s_prime.energy(block[j_star_in_block]);
    for (std::size_t k = 0; k < block.size(); ++k) {
        if (shifts[k].size() != pairs.size()) return false;
        Rational total(0);
        for (std::size_t p = 0; p < pairs.size(); ++p) total = total + Rational(shifts[k][p]) * pairs[p].gap;
        if (total != s_prime.energy(block[k]) - e_star) return false;
    }
    return true;
}

SynthesisChannel quasi_unitary_channel(const Mat& v_block, const std::vector<int>& block,
                                       const SystemLayout& s_prime, int j_star_in_block,
                                       const std::vector<PairLadder>& pairs,
                                       const std::vector<std::vector<int>>& shifts, int L, bool overflow) {
    require_unitary(v_block, "quasi_unitary_channel");
    const Index d = s_prime.total_dim();
    if (v_block.rows() != static_cast<Index>(block.size()))
        throw InputError("quasi_unitary_channel: V does not match the block size");
    if (j_star_in_block < 0 || j_star_in_block >= static_cast<int>(block.size()))
        throw InputError("quasi_unitary_channel: j_star out of range");
    for (int b : block)
        if (b < 0 || b >= d) throw InputError("quasi_unitary_channel: block level out of range");
    if (!resonance_holds(s_prime, block, j_star_in_block, pairs, shifts))
        throw InputError("quasi_unitary_channel: shift table violates the energy resonance identity");

    SynthesisChannel out;
    out.system = s_prime;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        int m = 0;
        for (const auto& row : shifts) m = std::max(m, std::abs(row[p]));
        out.ladders.push_back(LadderSystem::embedded(L, m, pairs[p].gap, overflow));
        out.ladder_labels.push_back("R" + std::to_string(pairs[p].i) + "_" + std::to_string(pairs[p].j));
        out.ladder_level.push_back(static_cast<int>(p));
    }
    SystemLayout layout = s_prime;
    for (std::size_t p = 0; p < out.ladders.size(); ++p)
        layout = layout.concat(out.ladders[p].layout(out.ladder_labels[p]));
    if (layout.total_dim() > dimension_cap())
        throw DimensionError("quasi_unitary_channel: dimension " + std::to_string(layout.total_dim()) +
                             " exceeds the cap");
    out.channel = build_two_kraus(v_block.col(j_star_in_block), block, block[j_star_in_block], d, out.ladders, shifts,
                                  layout);
    return out;
}

double synthesis_fidelity_closed_form(const Vec& psi, const std::vector<std::vector<int>>& shifts, int L) {
    double f = 0.0;
    const Index n = psi.size();
    for (Index k = 0; k < n; ++k)
        for (Index p = 0; p < n; ++p) {
            double w = std::norm(psi(k)) * std::norm(psi(p));
            if (k == p) {
                f += w;
                continue;
            }
            double c = 1.0;
            for (std::size_t l = 0; l < shifts[k].size(); ++l) c *= overlap_value(L, shifts[k][l] - shifts[p][l]);
            f += w * c;
        }
    return f;
}

ChannelImplementation implement_channel(const Mat& stinespring_v, const SystemLayout& env, const DensityMatrix& rho,
                                        int L) {
    require_unitary(stinespring_v, "implement_channel");
    const SystemLayout se = rho.layout().concat(env);
    const Index d = se.total_dim();
    if (stinespring_v.rows() != d) throw InputError("implement_channel: dilation does not match S (x) E");

    // Common ladder gap: rational gcd of the level offsets.
    Rational e_min = se.energy(0);
    for (Index k = 1; k < d; ++k) e_min = std::min(e_min, se.energy(k));
    Rational g0(0);
    for (Index k = 0; k < d; ++k) {
        Rational off = se.energy(k) - e_min;
        if (off != Rational(0)) g0 = g0 == Rational(0) ? off : rational_gcd(g0, off);
    }
    std::vector<int> m(d, 0);
    int big = 0;
    if (g0 != Rational(0)) {
        for (Index k = 0; k < d; ++k) {
            Rational q = (se.energy(k) - e_min) / g0;
            m[k] = static_cast<int>(q.num());
            big = std::max(big, m[k]);
        }
    }

    ChannelImplementation res;
    res.ladder_gap = g0 == Rational(0) ? Rational(1) : g0;
    res.M = big;
    LadderSystem ladder = LadderSystem::embedded(L, big, res.ladder_gap);
    const std::string lbl = "Rladder";
    SystemLayout layout = se.concat(ladder.layout(lbl));
    if (layout.total_dim() > dimension_cap())
        throw DimensionError("implement_channel: dimension " + std::to_string(layout.total_dim()) + " exceeds the cap");

    SpMat k0(layout.total_dim(), layout.total_dim());
    for (Index k = 0; k < d; ++k)
        for (Index kp = 0; kp < d; ++kp) {
            const cd a = stinespring_v(kp, k);
            if (std::abs(a) == 0.0) continue;
            k0 += kron(sparse_unit(d, kp, k, a), shift_operator_sparse(ladder, m[kp] - m[k]));
        }
    SpMat k1 = kron(sparse_identity(d), SpMat(sparse_identity(ladder.dim()) - ladder.source_projector()));
    k0.prune(cd(0.0));
    KrausChannel ch(layout, layout, std::vector<SpMat>{k0, k1});

    const std::vector<std::string> env_labels = env.labels();
    DensityMatrix e0 = DensityMatrix::basis(env, 0);
    DensityMatrix in = tensor(tensor(rho, e0), binomial_resource(ladder, lbl));
    DensityMatrix after = apply_channel(ch, in);
    res.output = partial_trace(after, rho.layout().labels());
    std::vector<std::string> s_and_ladder = rho.layout().labels();
    s_and_ladder.push_back(lbl);
    res.system_ladder_mutual_information =
        mutual_information(partial_trace(after, s_and_ladder), rho.layout().labels(), {lbl});

    DensityMatrix se_in = tensor(rho, e0);
    Mat exact = stinespring_v * se_in.matrix() * stinespring_v.adjoint();
    res.exact_output = partial_trace(DensityMatrix(se, exact), rho.layout().labels());
    res.distance = trace_distance(res.output, res.exact_output);
    return res;
}

ChannelImplementation implement_channel(const Mat& stinespring_v, int env_dim, const DensityMatrix& rho, int L) {
    if (env_dim < 1) throw InputError("implement_channel: env_dim must be positive");
    return implement_channel(stinespring_v, SystemLayout::single("E", std::vector<Rational>(env_dim, Rational(0))),
                             rho, L);
}

}  // namespace qcat
