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

#include "qcat/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "qcat/amplify.hpp"
#include "qcat/linalg.hpp"

namespace qcat {

namespace {

constexpr int kMaxRoundExp = 12;
constexpr int kMaxCopyExp = 6;
constexpr double kWeightFloor = 1e-13;
constexpr double kIncoherenceTol = 1e-12;
constexpr Index kFullProductCheckCap = 2048;
const char* kSystemLabel = "S'";

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

SpMat sparse_identity(Index d) {
    SpMat i(d, d);
    i.setIdentity();
    return i;
}

std::vector<Rational> level_energies(const SystemLayout& layout) {
    std::vector<Rational> e;
    for (Index k = 0; k < layout.total_dim(); ++k) e.push_back(layout.energy(k));
    return e;
}

// One subsystem carrying the total energy of every basis state.
SystemLayout flatten(const SystemLayout& layout, const std::string& label) {
    return SystemLayout::single(label, level_energies(layout));
}

// Largest |m_ij| over pairs of distinct energy.
double energy_coherence(const Mat& m, const std::vector<Rational>& e) {
    double c = 0.0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (e[i] != e[j]) c = std::max(c, std::abs(m(i, j)));
    return c;
}

bool single_energy(const Vec& psi, const std::vector<Rational>& e) {
    std::optional<Rational> seen;
    for (Index k = 0; k < psi.size(); ++k) {
        if (std::abs(psi(k)) <= kIncoherenceTol) continue;
        if (seen && *seen != e[k]) return false;
        seen = e[k];
    }
    return true;
}

// Spectral mixture with weights above the floor; each vector's largest entry made real positive.
std::vector<MixtureComponent> spectral_mixture(const Mat& t) {
    Eigen::VectorXd w;
    Mat v;
    linalg::eigh(t, w, v);
    std::vector<MixtureComponent> out;
    for (Index k = w.size() - 1; k >= 0; --k) {
        if (w(k) <= kWeightFloor) continue;
        Vec psi = v.col(k);
        Index arg = 0;
        for (Index i = 1; i < psi.size(); ++i)
            if (std::abs(psi(i)) > std::abs(psi(arg)) + 1e-12) arg = i;
        psi *= std::conj(psi(arg)) / std::abs(psi(arg));
        out.push_back({w(k), psi, -1});
    }
    return out;
}

// Unitary whose column col is psi; remaining columns by Gram-Schmidt on the standard basis.
Mat complete_unitary(const Vec& psi, int col) {
    const Index d = psi.size();
    std::vector<Vec> basis{psi.normalized()};
    for (Index k = 0; k < d && static_cast<Index>(basis.size()) < d; ++k) {
        Vec x = Vec::Zero(d);
        x(k) = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) x -= b * b.dot(x);
        if (x.norm() > 1e-8) basis.push_back(x.normalized());
    }
    Mat u(d, d);
    u.col(col) = basis[0];
    Index next = 1;
    for (Index c = 0; c < d; ++c)
        if (c != col) u.col(c) = basis[next++];
    return u;
}

int lowest_level(const std::vector<Rational>& e, const std::vector<int>& levels) {
    int best = levels.front();
    for (int k : levels)
        if (e[k] < e[best]) best = k;
    return best;
}

// Runs one synthesis channel on |j_star> (x) bank and returns the joint S' (x) bank output.
Mat run_synthesis(const SynthesisChannel& ch, int j_star, const Mat& bank_canonical) {
    SpMat e = sparse_identity(1);
    for (const auto& l : ch.ladders) e = kron(e, ladder_embedding(l));
    const Mat bank = e * bank_canonical * e.adjoint();
    const Index d = ch.system.total_dim();
    const Index nb = bank.rows();
    Mat in = Mat::Zero(d * nb, d * nb);
    in.block(j_star * nb, j_star * nb, nb, nb) = bank;
    return apply_kraus(ch.channel.ops(), in);
}

struct Assembly {
    Mat system;       // mixture on S'
    Mat joint;        // mixture on S' (x) bank, empty when no bank was used
    Index bank_dim = 0;
    std::vector<Mat> branch_outputs;
};

void add_ledger_entry(CatalystLedger& ledger, const std::string& label, const Mat& declared, const Mat& measured,
                      int round, bool target_dependent = false) {
    LedgerEntry e;
    e.label = label;
    e.declared = declared;
    e.measured = measured;
    e.residual = trace_distance(declared, measured);
    e.round = round;
    e.target_dependent = target_dependent;
    ledger.entries.push_back(std::move(e));
}

void add_edge(CatalystLedger& ledger, const std::string& a, const std::string& b, double mi) {
    if (mi > 1e-12) ledger.correlation_graph.push_back({a, b, mi});
}

// Records every chain catalyst of one resource copy and returns its final state.
Mat amplify_copy(CatalystLedger& ledger, const std::string& prefix, const Mat& start, double eta0, int K,
                 int& round) {
    if (K == 0) return start;
    std::vector<double> seq = eta_sequence(eta0, K);
    seq.pop_back();
    ChainTrace tr = trace_chain(start, seq);
    for (int j = 0; j < K; ++j) {
        const std::string lbl = prefix + ".C" + std::to_string(j);
        add_ledger_entry(ledger, lbl, gamma_matrix(seq[j]), tr.catalyst_marginals[j], round++);
        if (j > 0) add_edge(ledger, prefix + ".C" + std::to_string(j - 1), lbl, tr.neighbour_mutual_information[j]);
    }
    return tr.final_system;
}

std::vector<Budget> sorted_by_cost(std::vector<std::tuple<long long, Budget>> c) {
    std::stable_sort(c.begin(), c.end(), [](const auto& a, const auto& b) {
        const auto& ba = std::get<1>(a);
        const auto& bb = std::get<1>(b);
        return std::make_tuple(std::get<0>(a), ba.L, ba.K) < std::make_tuple(std::get<0>(b), bb.L, bb.K);
    });
    std::vector<Budget> out;
    for (auto& [cost, b] : c) out.push_back(b);
    return out;
}

std::vector<Budget> budget_candidates(double eps, int d, int shift_max, int ladders, double seed_eta,
                                       ErrorModel model) {
    if (ladders == 0) {
        Budget b;
        b.eta = seed_eta;
        b.eta_K = 1.0;
        return {b};
    }
    const double eta0 = seed_round(seed_eta, Rational(1)).eta_out_simulated;
    const std::vector<double> seq = eta_sequence(eta0, 1 << kMaxRoundExp);
    std::vector<std::tuple<long long, Budget>> found;
    for (int L : budget_copy_grid()) {
        double dim = d;
        for (int p = 0; p < ladders; ++p) dim *= L + 2 * shift_max + 2;
        if (dim > static_cast<double>(dimension_cap())) continue;
        for (int K : budget_round_grid()) {
            const double pred = budget_error_model(d, ladders, L, seq[K], shift_max, model);
            if (pred > eps) continue;
            Budget b;
            b.eta = seed_eta;
            b.K = K;
            b.L = L;
            b.predicted_error = pred;
            b.eta_K = seq[K];
            b.ladders = ladders;
            b.model = model;
            found.emplace_back(static_cast<long long>(ladders) * L * (K + 2), b);
        }
    }
    return sorted_by_cost(std::move(found));
}

void require_epsilon(double eps, const char* what) {
    if (!(eps > 0.0)) throw InputError(std::string(what) + ": epsilon must be positive");
}

// Finishes a report for a target that needs no coherence: covariant preparation is exact.
PreparationReport exact_report(const DensityMatrix& target, double eps, const std::string& kind) {
    PreparationReport rep;
    rep.kind = kind;
    rep.epsilon = eps;
    rep.output = target;
    rep.achieved_distance = 0.0;
    rep.budget.K = 0;
    rep.budget.L = 1;
    rep.budget.eta_K = 1.0;
    rep.mixture = spectral_mixture(target.matrix());
    rep.product_residual_scope = "none (no catalysts)";
    rep.report.name = kind == "quasi-correlated" ? "quasi_prepare" : "prepare_state";
    rep.report.at_most("achieved trace distance", 0.0, eps);
    rep.report.at_most("ledger max residual", 0.0, kRestorationTol);
    rep.report.notes.push_back("target carries no coherence between distinct energies; prepared exactly");
    return rep;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// ledger and budget

double CatalystLedger::max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.residual);
    return m;
}

std::vector<int> budget_round_grid() {
    std::vector<int> g{0};
    for (int i = 0; i <= kMaxRoundExp; ++i) g.push_back(1 << i);
    return g;
}

std::vector<int> budget_copy_grid() {
    std::vector<int> g;
    for (int i = 0; i <= kMaxCopyExp; ++i) g.push_back(1 << i);
    return g;
}

std::string error_model_name(ErrorModel m) { return m == ErrorModel::UnionBound ? "union-bound" : "copy-count"; }

double budget_error_model(int d_target, int ladders, int L, double eta_K, int shift_max, ErrorModel model) {
    if (ladders <= 0) return 0.0;
    const double c = overlap_value(L, shift_max);
    if (model == ErrorModel::UnionBound) return (1.0 - eta_K) + ladders * (1.0 - c);
    const double c_min = ladders >= 2 ? c * c : c;
    return ladders * L * (1.0 - eta_K) / 2.0 + 0.5 * (d_target - 1) * (1.0 - c_min);
}

Budget plan_budget(double target_epsilon, int d_target, int shift_max, int ladders, double seed_eta,
                   ErrorModel model) {
    if (!(target_epsilon > 0.0 && target_epsilon < 1.0))
        throw InputError("plan_budget: target epsilon must lie in (0, 1)");
    if (d_target < 1) throw InputError("plan_budget: target dimension must be positive");
    if (shift_max < 1) throw InputError("plan_budget: shift_max must be at least 1");
    if (ladders < 0) ladders = d_target - 1;
    auto c = budget_candidates(target_epsilon, d_target, shift_max, ladders, seed_eta, model);
    if (c.empty())
        throw DimensionError("plan_budget: no (K, L) on the grid meets epsilon " + std::to_string(target_epsilon) +
                             " within the dimension cap " + std::to_string(dimension_cap()));
    return c.front();
}

// ---------------------------------------------------------------------------------------------
// ladder bank compression

Mat dicke_compress(const std::vector<Mat>& factors) {
    const int L = static_cast<int>(factors.size());
    if (L < 1) throw InputError("dicke_compress: need at least one factor");
    // Coefficient of x^n y^m in prod_q sum_{a,b} X_q(a,b) x^a y^b.
    Mat poly = Mat::Zero(L + 1, L + 1);
    poly(0, 0) = 1.0;
    cd total = 1.0;
    for (int q = 0; q < L; ++q) {
        const Mat& x = factors[q];
        if (x.rows() != 2 || x.cols() != 2) throw InputError("dicke_compress: factors must be 2x2");
        Mat next = Mat::Zero(L + 1, L + 1);
        for (int n = 0; n <= q; ++n)
            for (int m = 0; m <= q; ++m) {
                const cd c = poly(n, m);
                if (c == cd(0.0)) continue;
                next(n, m) += c * x(0, 0);
                next(n, m + 1) += c * x(0, 1);
                next(n + 1, m) += c * x(1, 0);
                next(n + 1, m + 1) += c * x(1, 1);
            }
        poly.swap(next);
        total *= x.trace();
    }
    Mat out = Mat::Zero(L + 2, L + 2);
    cd sym = 0.0;
    for (int n = 0; n <= L; ++n)
        for (int m = 0; m <= L; ++m) {
            out(n, m) = poly(n, m) * std::exp(-0.5 * (log_binomial(L, n) + log_binomial(L, m)));
            if (n == m) sym += out(n, n);
        }
    out(L + 1, L + 1) = total - sym;
    return out;
}

SpMat ladder_embedding(const LadderSystem& ladder) {
    SpMat e(ladder.dim(), ladder.L + 2);
    for (int n = 0; n <= ladder.L; ++n) e.insert(ladder.index_of(n), n) = 1.0;
    e.insert(ladder.overflow_index(), ladder.L + 1) = 1.0;
    return e;
}

// ---------------------------------------------------------------------------------------------
// marginal-catalytic preparation

namespace {

PreparationReport run_marginal_protocol(const DensityMatrix& target, const SystemLayout& sp, const Mat& t,
                              const std::vector<MixtureComponent>& mix, int j_star, const std::vector<int>& ladder_levels,
                              const Budget& budget, double eps, const PrepareOptions& opt) {
    PreparationReport rep;
    rep.kind = "marginal-catalytic";
    rep.epsilon = eps;
    rep.budget = budget;
    rep.mixture = mix;
    rep.report.name = "prepare_state";
    const Index d = sp.total_dim();
    const std::vector<Rational> e = level_energies(sp);
    const int L = budget.L;
    int round = 0;

    // Steps 1 and 2 per resource copy; the compressed bank is a product over ladders.
    Mat bank = Mat::Ones(1, 1);
    double min_eta = 1.0;
    for (int k : ladder_levels) {
        const Rational gap = e[k] - e[j_star];
        std::vector<Mat> finals;
        for (int c = 0; c < L; ++c) {
            const std::string prefix = "R" + std::to_string(k) + "." + std::to_string(c);
            SeedReport sr = seed_round(budget.eta, gap);
            add_ledger_entry(rep.ledger, prefix + ".Ca", sigma_matrix(budget.eta), sr.ca_final, round);
            add_ledger_entry(rep.ledger, prefix + ".Cb", gamma_matrix(budget.eta), sr.cb_final, round);
            add_edge(rep.ledger, prefix + ".Ca", prefix + ".Cb", sr.ca_cb_mutual_information);
            ++round;
            Mat fin = amplify_copy(rep.ledger, prefix, sr.r_state.matrix(), sr.eta_out_simulated, budget.K, round);
            min_eta = std::min(min_eta, 2.0 * fin(0, 1).real());
            finals.push_back(fin);
        }
        bank = kron(bank, dicke_compress(finals));
    }

    // Step 3: one synthesis channel per pure component, mixed as an exact convex combination.
    SpMat emb = sparse_identity(1);
    for (int k : ladder_levels) emb = kron(emb, ladder_embedding(LadderSystem::embedded(L, 1, e[k] - e[j_star], true)));
    const Mat bank_e = emb * bank * emb.adjoint();
    const Index nb = bank_e.rows();
    Assembly as;
    as.bank_dim = nb;
    as.system = Mat::Zero(d, d);
    as.joint = Mat::Zero(d * nb, d * nb);
    bool any_channel = false;
    for (const auto& comp : mix) {
        Mat joint;
        if (single_energy(comp.state, e)) {
            joint = kron(Mat(comp.state * comp.state.adjoint()), bank_e);
        } else {
            SynthesisChannel ch = unitary_channel(complete_unitary(comp.state, j_star), sp, j_star, L, true);
            joint = run_synthesis(ch, j_star, bank);
            any_channel = true;
        }
        const Mat out_s = partial_trace(joint, {static_cast<int>(d), static_cast<int>(nb)}, {0});
        as.joint += comp.weight * joint;
        as.branch_outputs.push_back(out_s);
        as.system += comp.weight * out_s;
    }
    if (!any_channel) as.joint.resize(0, 0);
    rep.bank_dimension = as.bank_dim;
    rep.budget.eta_K = min_eta;

    // Correlation removal: swap S' with a catalyst prepared in the final state.
    const Mat rho_eps = 0.5 * (as.system + as.system.adjoint());
    if (as.joint.size() != 0) {
        const int di = static_cast<int>(d);
        const int nb = static_cast<int>(as.bank_dim);
        const Index full = d * as.bank_dim * d;
        Mat swapped;
        std::vector<int> dims;
        if (full <= kFullProductCheckCap) {
            dims = {di, nb, di};
            Mat joint3 = kron(as.joint, rho_eps);
            Mat p = permutation_unitary(dims, {2, 1, 0});
            swapped = p * joint3 * p.adjoint();
            rep.product_residual_scope = "S' vs (bank, Cswap)";
            const Mat a = partial_trace(swapped, dims, {0});
            const Mat rest = partial_trace(swapped, dims, {1, 2});
            rep.product_residual = trace_distance(swapped, kron(a, rest));
            add_ledger_entry(rep.ledger, "Cswap", rho_eps, partial_trace(swapped, dims, {2}), round++, true);
        } else {
            dims = {di, di};
            Mat s_only = partial_trace(as.joint, {di, nb}, {0});
            Mat joint2 = kron(s_only, rho_eps);
            Mat p = permutation_unitary(dims, {1, 0});
            swapped = p * joint2 * p.adjoint();
            rep.product_residual_scope = "S' vs Cswap (bank traced out, joint exceeds the check cap)";
            const Mat a = partial_trace(swapped, dims, {0});
            const Mat rest = partial_trace(swapped, dims, {1});
            rep.product_residual = trace_distance(swapped, kron(a, rest));
            add_ledger_entry(rep.ledger, "Cswap", rho_eps, partial_trace(swapped, dims, {1}), round++, true);
        }
    } else {
        rep.product_residual_scope = "none (every branch prepared exactly)";
    }

    rep.output = DensityMatrix(target.layout(), rho_eps);
    rep.achieved_distance = trace_distance(rho_eps, t);
    rep.catalyst_count = static_cast<int>(rep.ledger.entries.size());
    for (int m = 1; m <= 1; ++m) rep.overlaps.push_back(overlap(L, m));

    if (opt.sample_seed) {
        std::mt19937_64 rng(*opt.sample_seed);
        std::vector<double> w;
        for (const auto& c : mix) w.push_back(c.weight);
        std::discrete_distribution<int> pick(w.begin(), w.end());
        const int b = pick(rng);
        rep.sampled_branch = b;
        rep.sampled_distance = trace_distance(as.branch_outputs[b], Mat(mix[b].state * mix[b].state.adjoint()));
    }

    rep.report.at_most("achieved trace distance", rep.achieved_distance, eps);
    rep.report.at_most("ledger max residual", rep.ledger.max_residual(), kRestorationTol);
    rep.report.at_most("system-catalyst product residual after swap", rep.product_residual, kRestorationTol);
    rep.report.at_most("achieved distance within the error model", rep.achieved_distance,
                       budget.predicted_error + 1e-12);
    std::ostringstream os;
    os << "K=" << budget.K << " L=" << L << " ladders=" << ladder_levels.size() << " catalysts="
       << rep.catalyst_count << " bank dimension=" << rep.bank_dimension;
    rep.report.notes.push_back(os.str());
    rep.report.notes.push_back("swap catalyst Cswap holds the computed final state and is target-dependent");
    return rep;
}

}  // namespace

PreparationReport prepare_state(const DensityMatrix& target, double epsilon, const PrepareOptions& opt) {
    require_epsilon(epsilon, "prepare_state");
    const SystemLayout sp = flatten(target.layout(), kSystemLabel);
    const Mat& t = target.matrix();
    const std::vector<Rational> e = level_energies(sp);
    if (energy_coherence(t, e) <= kIncoherenceTol) return exact_report(target, epsilon, "marginal-catalytic");

    const int d = static_cast<int>(sp.total_dim());
    std::vector<int> all(d);
    for (int k = 0; k < d; ++k) all[k] = k;
    const int j_star = lowest_level(e, all);
    std::vector<int> ladder_levels;
    for (int k = 0; k < d; ++k)
        if (k != j_star && e[k] != e[j_star]) ladder_levels.push_back(k);
    const auto mix = spectral_mixture(t);

    std::vector<Budget> candidates;
    if (opt.budget) {
        Budget b = *opt.budget;
        b.ladders = static_cast<int>(ladder_levels.size());
        const double eta0 = seed_round(b.eta, Rational(1)).eta_out_simulated;
        b.eta_K = eta_sequence(eta0, b.K).back();
        b.predicted_error = budget_error_model(d, b.ladders, b.L, b.eta_K, 1, b.model);
        candidates.push_back(b);
    } else {
        candidates = budget_candidates(std::min(epsilon, 1.0 - 1e-12), d, 1,
                                        static_cast<int>(ladder_levels.size()), opt.seed_eta, opt.model);
        if (candidates.empty())
            throw DimensionError("prepare_state: budget planning failed; no (K, L) meets epsilon within the cap");
    }

    PreparationReport rep;
    std::vector<Budget> tried;
    const int attempts = opt.budget ? 1 : std::max(1, opt.max_attempts);
    for (int a = 0; a < attempts && a < static_cast<int>(candidates.size()); ++a) {
        rep = run_marginal_protocol(target, sp, t, mix, j_star, ladder_levels, candidates[a], epsilon, opt);
        tried.push_back(rep.budget);
        if (rep.achieved_distance <= epsilon) break;
    }
    rep.attempts = tried;
    if (!rep.ledger.marginal_catalytic())
        throw InvariantError("prepare_state: ledger violation, a catalyst was not restored");
    return rep;
}

// ---------------------------------------------------------------------------------------------
// seed extraction

namespace {

struct Key {
    int s = 0;
    std::string bits;
    bool operator<(const Key& o) const { return std::tie(s, bits) < std::tie(o.s, o.bits); }
};
using SparseVec = std::map<Key, cd>;

// Pure-state tracking of S (x) R_1..R_n from each input basis state.
struct SparseJoint {
    Mat rho;
    int nq = 0;
    std::vector<SparseVec> v;

    SparseJoint(const Mat& r, int qubits) : rho(r), nq(qubits) {
        for (Index s = 0; s < r.rows(); ++s) v.push_back({{Key{static_cast<int>(s), std::string(qubits, '0')}, 1.0}});
    }

    void apply(int i, int j, int q) {
        const double h = 1.0 / std::sqrt(2.0);
        for (auto& vec : v) {
            SparseVec next;
            for (const auto& [key, amp] : vec) {
                const char bit = key.bits[q];
                if (key.s == j && bit == '0') {
                    Key up = key;
                    up.s = i;
                    up.bits[q] = '1';
                    next[up] += h * amp;
                    next[key] += -h * amp;
                } else if (key.s == i && bit == '1') {
                    Key down = key;
                    down.s = j;
                    down.bits[q] = '0';
                    next[key] += h * amp;
                    next[down] += h * amp;
                } else {
                    next[key] += amp;
                }
            }
            for (auto it = next.begin(); it != next.end();)
                it = std::abs(it->second) == 0.0 ? next.erase(it) : std::next(it);
            vec.swap(next);
        }
    }

    Mat system_marginal() const {
        const Index d = rho.rows();
        Mat m = Mat::Zero(d, d);
        for (Index s = 0; s < d; ++s)
            for (Index t = 0; t < d; ++t) {
                if (rho(s, t) == cd(0.0)) continue;
                for (const auto& [a, ca] : v[s])
                    for (const auto& [b, cb] : v[t])
                        if (a.bits == b.bits) m(a.s, b.s) += rho(s, t) * ca * std::conj(cb);
            }
        return m;
    }

    // Reference-system operator with S traced out, as |bits_a><bits_b| coefficients.
    std::map<std::pair<std::string, std::string>, cd> reference_terms() const {
        std::map<std::pair<std::string, std::string>, cd> terms;
        const Index d = rho.rows();
        for (Index s = 0; s < d; ++s)
            for (Index t = 0; t < d; ++t) {
                if (rho(s, t) == cd(0.0)) continue;
                for (const auto& [a, ca] : v[s])
                    for (const auto& [b, cb] : v[t])
                        if (a.s == b.s) terms[{a.bits, b.bits}] += rho(s, t) * ca * std::conj(cb);
            }
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) < 1e-300 ? terms.erase(it) : std::next(it);
        return terms;
    }
};

Mat qubit_marginal(const std::map<std::pair<std::string, std::string>, cd>& terms, int q) {
    Mat m = Mat::Zero(2, 2);
    for (const auto& [ab, c] : terms) {
        const auto& [a, b] = ab;
        bool match = true;
        for (std::size_t k = 0; k < a.size() && match; ++k)
            if (static_cast<int>(k) != q && a[k] != b[k]) match = false;
        if (match) m(a[q] - '0', b[q] - '0') += c;
    }
    return m;
}

SeedExtraction run_extraction(const Mat& rho, const std::vector<Rational>& e, const std::vector<IndexPair>& pairs,
                              int rounds, SparseJoint* keep = nullptr) {
    if (pairs.empty()) throw InputError("extract_seed: empty coherence support");
    if (rounds < 1) throw InputError("extract_seed: rounds must be positive");
    const int n = static_cast<int>(pairs.size()) * rounds;
    SparseJoint joint(rho, n);
    SeedExtraction out;
    Mat s_now = rho;
    for (int r = 0; r < rounds; ++r)
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [i, j] = pairs[p];
            const int q = r * static_cast<int>(pairs.size()) + static_cast<int>(p);
            out.predicted_offdiag.push_back(s_now(i, j) / std::sqrt(2.0));
            joint.apply(i, j, q);
            s_now = joint.system_marginal();
            out.system_after.push_back(s_now);
            out.pairs.push_back(pairs[p]);
        }
    const auto terms = joint.reference_terms();
    for (int q = 0; q < n; ++q) {
        const auto [i, j] = out.pairs[q];
        SystemLayout lay = SystemLayout::qubit("R" + std::to_string(i) + "_" + std::to_string(j), e[j] - e[i]);
        Mat m = qubit_marginal(terms, q);
        out.seeds.emplace_back(lay, 0.5 * (m + m.adjoint()));
    }
    if (keep) *keep = std::move(joint);
    return out;
}

// Covariant map taking a coherent qubit state to Sigma(eta0): phase rotation, then population
// balancing with one jump operator.
struct Normalizer {
    std::vector<Mat> kraus;
    double eta0 = 0.0;
};

Normalizer normalizer_for(const Mat& r) {
    Normalizer n;
    const double c = std::abs(r(0, 1));
    Mat z = Mat::Identity(2, 2);
    if (c > 0.0) z(1, 1) = r(0, 1) / c;
    const double p0 = r(0, 0).real();
    const double p1 = r(1, 1).real();
    Mat a0 = Mat::Identity(2, 2);
    Mat a1 = Mat::Zero(2, 2);
    double x = 0.0;
    if (p1 < 0.5) {
        x = (0.5 - p1) / p0;
        a0(0, 0) = std::sqrt(1.0 - x);
        a1(1, 0) = std::sqrt(x);
    } else if (p1 > 0.5) {
        x = (p1 - 0.5) / p1;
        a0(1, 1) = std::sqrt(1.0 - x);
        a1(0, 1) = std::sqrt(x);
    }
    n.kraus = {a0 * z, a1 * z};
    n.eta0 = 2.0 * c * std::sqrt(1.0 - x);
    return n;
}

Mat apply_small(const std::vector<Mat>& ks, const Mat& x) {
    Mat y = Mat::Zero(x.rows(), x.cols());
    for (const auto& k : ks) y += k * x * k.adjoint();
    return y;
}

}  // namespace

Mat extraction_unitary(int d, int i, int j) {
    if (i < 0 || j < 0 || i >= d || j >= d || i == j) throw InputError("extraction_unitary: bad level pair");
    const double h = 1.0 / std::sqrt(2.0);
    Mat u = Mat::Identity(2 * d, 2 * d);
    const Index i1 = 2 * i + 1, j0 = 2 * j;
    u(i1, i1) = h;
    u(i1, j0) = h;
    u(j0, i1) = h;
    u(j0, j0) = -h;
    return u;
}

SeedExtraction extract_seed(const DensityMatrix& rho, const std::vector<IndexPair>& pairs, int rounds) {
    const SystemLayout s = flatten(rho.layout(), "S");
    for (const auto& [i, j] : pairs)
        if (i < 0 || j < 0 || i >= s.total_dim() || j >= s.total_dim() || i == j)
            throw InputError("extract_seed: support pair outside the input levels");
    return run_extraction(rho.matrix(), level_energies(s), pairs, rounds);
}

SeedExtraction extract_seed(const DensityMatrix& rho, const CoherenceSupport& support) {
    if (support.pairs.empty()) throw InputError("extract_seed: empty coherence support");
    return extract_seed(rho, support.pairs, 1);
}

// ---------------------------------------------------------------------------------------------
// quasi-correlated preparation

namespace {

struct QuasiPlan {
    std::vector<IndexPair> pairs;             // used support pairs, nonzero gap
    std::vector<Rational> gaps;
    std::vector<std::vector<int>> blocks;
    std::vector<int> anchor;                  // j_star per block
    std::vector<std::vector<std::vector<int>>> shifts;  // per block [k in block][pair]
    std::vector<bool> needs_synthesis;        // per block
    std::vector<int> max_shift;               // per pair
};

double quasi_synthesis_term(const QuasiPlan& plan, int L, ErrorModel model) {
    if (model == ErrorModel::UnionBound) {
        double sum = 0.0;
        for (std::size_t p = 0; p < plan.pairs.size(); ++p) sum += 1.0 - overlap_value(L, plan.max_shift[p]);
        return sum;
    }
    double worst = 0.0;
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
        if (!plan.needs_synthesis[b]) continue;
        const auto& sh = plan.shifts[b];
        double c_min = 1.0;
        for (std::size_t k = 0; k < sh.size(); ++k)
            for (std::size_t p = 0; p < sh.size(); ++p) {
                if (k == p) continue;
                double c = 1.0;
                for (std::size_t l = 0; l < plan.pairs.size(); ++l) c *= overlap_value(L, sh[k][l] - sh[p][l]);
                c_min = std::min(c_min, c);
            }
        worst = std::max(worst, 0.5 * (static_cast<double>(sh.size()) - 1.0) * (1.0 - c_min));
    }
    return worst;
}

struct QuasiCandidate {
    Budget budget;
    long long cost = 0;
};

}  // namespace

PreparationReport quasi_prepare(const DensityMatrix& rho, const DensityMatrix& target, double epsilon,
                                const PrepareOptions& opt) {
    require_epsilon(epsilon, "quasi_prepare");
    const SystemLayout s = flatten(rho.layout(), "S");
    const SystemLayout sp = flatten(target.layout(), kSystemLabel);
    const std::vector<Rational> es = level_energies(s);
    const std::vector<Rational> et = level_energies(sp);
    const Mat& t = target.matrix();
    const int dt = static_cast<int>(sp.total_dim());

    // Feasibility is decided by the lattice module alone.
    const CoherenceSupport support = coherence_support(rho.matrix());
    const ReachableSet reach = reachable_pairs(support, es, et);
    const CoherenceSupport tsupp = coherence_support(t);
    for (const auto& [i, j] : tsupp.pairs)
        if (!reach.reachable(i, j)) {
            std::ostringstream os;
            os << "quasi_prepare: target coherence on pair (" << i << "," << j << ") with gap "
               << (et[j] - et[i]).str() << " lies outside the lattice generated by the input gaps";
            if (support.pairs.empty()) os << " (the input has no coherence)";
            throw InputError(os.str());
        }
    const ClosedIndexPartition partition = maximal_closed_sets(reach, dt);
    if (energy_coherence(t, et) <= kIncoherenceTol) {
        PreparationReport rep = exact_report(target, epsilon, "quasi-correlated");
        rep.partition = partition;
        return rep;
    }

    // Shift tables from the lattice witnesses, restricted to pairs of nonzero gap.
    QuasiPlan plan;
    plan.blocks = partition.blocks;
    std::vector<std::vector<std::vector<std::int64_t>>> raw(plan.blocks.size());
    std::vector<bool> pair_used(support.pairs.size(), false);
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
        const auto& blk = plan.blocks[b];
        const int js = lowest_level(et, blk);
        plan.anchor.push_back(js);
        Mat sub(blk.size(), blk.size());
        for (std::size_t x = 0; x < blk.size(); ++x)
            for (std::size_t y = 0; y < blk.size(); ++y) sub(x, y) = t(blk[x], blk[y]);
        plan.needs_synthesis.push_back(energy_coherence(sub, [&] {
                                           std::vector<Rational> eb;
                                           for (int k : blk) eb.push_back(et[k]);
                                           return eb;
                                       }()) > kIncoherenceTol);
        for (int k : blk) {
            std::vector<std::int64_t> c(support.pairs.size(), 0);
            if (k != js) {
                const auto& w = reach.witness(std::min(k, js), std::max(k, js));
                for (std::size_t p = 0; p < c.size(); ++p) c[p] = k > js ? w.coefficients[p] : -w.coefficients[p];
            }
            raw[b].push_back(c);
            if (plan.needs_synthesis[b])
                for (std::size_t p = 0; p < c.size(); ++p)
                    if (c[p] != 0 && reach.generator_gaps[p] != Rational(0)) pair_used[p] = true;
        }
    }
    std::vector<std::size_t> used_index;
    for (std::size_t p = 0; p < support.pairs.size(); ++p)
        if (pair_used[p]) {
            used_index.push_back(p);
            plan.pairs.push_back(support.pairs[p]);
            plan.gaps.push_back(reach.generator_gaps[p]);
        }
    plan.max_shift.assign(plan.pairs.size(), 0);
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
        std::vector<std::vector<int>> table;
        for (const auto& c : raw[b]) {
            std::vector<int> row;
            for (std::size_t u = 0; u < used_index.size(); ++u) {
                const std::int64_t v = c[used_index[u]];
                if (std::abs(v) > 64) throw DimensionError("quasi_prepare: witness coefficient too large for a ladder");
                row.push_back(static_cast<int>(v));
                if (plan.needs_synthesis[b])
                    plan.max_shift[u] = std::max(plan.max_shift[u], std::abs(static_cast<int>(v)));
            }
            table.push_back(row);
        }
        plan.shifts.push_back(table);
    }
    const int np = static_cast<int>(plan.pairs.size());

    // Candidate budgets: the seeds depend on L through the number of extraction passes.
    std::vector<std::tuple<long long, Budget>> found;
    std::map<int, std::vector<double>> seed_etas;
    std::vector<Budget> candidates;
    if (np == 0) {
        Budget b;
        b.eta = 0.0;
        b.eta_K = 1.0;
        candidates.push_back(b);
    } else {
        std::vector<int> copy_grid = budget_copy_grid();
        std::vector<int> round_grid = budget_round_grid();
        if (opt.budget) {
            copy_grid = {opt.budget->L};
            round_grid = {opt.budget->K};
        }
        for (int L : copy_grid) {
            double dim = dt;
            for (int p = 0; p < np; ++p) dim *= L + 2 * plan.max_shift[p] + 2;
            if (dim > static_cast<double>(dimension_cap())) continue;
            SeedExtraction ex = run_extraction(rho.matrix(), es, plan.pairs, L);
            std::vector<double> etas;
            for (const auto& sd : ex.seeds) etas.push_back(normalizer_for(sd.matrix()).eta0);
            if (*std::min_element(etas.begin(), etas.end()) <= 0.0) continue;
            seed_etas[L] = etas;
            std::vector<std::vector<double>> seqs;
            const int kmax = *std::max_element(round_grid.begin(), round_grid.end());
            for (double e0 : etas) seqs.push_back(eta_sequence(e0, kmax));
            const double synth = quasi_synthesis_term(plan, L, opt.model);
            for (int K : round_grid) {
                double res = 0.0, mn = 1.0;
                for (const auto& sq : seqs) {
                    res += (1.0 - sq[K]) / 2.0;
                    mn = std::min(mn, sq[K]);
                }
                Budget b;
                b.eta = *std::min_element(etas.begin(), etas.end());
                b.K = K;
                b.L = L;
                b.eta_K = mn;
                b.ladders = np;
                b.model = opt.model;
                b.predicted_error = (opt.model == ErrorModel::UnionBound ? 1.0 - mn : res) + synth;
                if (!opt.budget && b.predicted_error > epsilon) continue;
                found.emplace_back(static_cast<long long>(np) * L * (K + 2), b);
            }
        }
        candidates = sorted_by_cost(std::move(found));
        if (candidates.empty())
            throw DimensionError("quasi_prepare: budget planning failed; no (K, L) meets epsilon within the cap");
    }

    PreparationReport rep;
    std::vector<Budget> tried;
    const int attempts = opt.budget ? 1 : std::max(1, opt.max_attempts);
    for (int a = 0; a < attempts && a < static_cast<int>(candidates.size()); ++a) {
        const Budget budget = candidates[a];
        rep = PreparationReport{};
        rep.kind = "quasi-correlated";
        rep.epsilon = epsilon;
        rep.budget = budget;
        rep.partition = partition;
        rep.pairs_used = plan.pairs;
        rep.shift_tables = plan.shifts;
        rep.block_anchor = plan.anchor;
        rep.report.name = "quasi_prepare";
        const int L = budget.L;
        int round = 0;

        // Steps 1 and 2: L extraction passes on the same S, then one chain per reference copy.
        Mat bank = Mat::Ones(1, 1);
        std::vector<PairLadder> ladders;
        if (np > 0) {
            SparseJoint joint(rho.matrix(), 1);
            SeedExtraction ex = run_extraction(rho.matrix(), es, plan.pairs, L, &joint);
            const int nq = np * L;
            std::vector<std::array<std::array<Mat, 2>, 2>> images(nq);
            double min_seed = 1.0;
            for (int q = 0; q < nq; ++q) {
                const auto [i, j] = ex.pairs[q];
                const std::string prefix =
                    "R" + std::to_string(i) + "_" + std::to_string(j) + "." + std::to_string(q / np);
                Normalizer nz = normalizer_for(ex.seeds[q].matrix());
                min_seed = std::min(min_seed, nz.eta0);
                const Mat start = apply_small(nz.kraus, ex.seeds[q].matrix());
                amplify_copy(rep.ledger, prefix, start, nz.eta0, budget.K, round);
                std::vector<double> seq = eta_sequence(nz.eta0, budget.K);
                seq.pop_back();
                const Mat chain = chain_superoperator(seq);
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        Mat unit = Mat::Zero(2, 2);
                        unit(x, y) = 1.0;
                        images[q][x][y] = apply_superoperator(chain, apply_small(nz.kraus, unit));
                    }
            }
            rep.report.at_least("smallest normalized seed coherence", min_seed, 1e-300);

            // Ladder bank over the correlated reference copies, one Dicke compression per pair.
            const auto terms = joint.reference_terms();
            std::vector<std::map<std::string, Mat>> cache(np);
            Index nb = 1;
            for (int p = 0; p < np; ++p) nb *= L + 2;
            bank = Mat::Zero(nb, nb);
            for (const auto& [ab, coef] : terms) {
                const auto& [a, b] = ab;
                Mat acc = Mat::Ones(1, 1);
                for (int p = 0; p < np; ++p) {
                    std::string pattern;
                    for (int r = 0; r < L; ++r) {
                        const int q = r * np + p;
                        pattern.push_back(a[q]);
                        pattern.push_back(b[q]);
                    }
                    auto it = cache[p].find(pattern);
                    if (it == cache[p].end()) {
                        std::vector<Mat> f;
                        for (int r = 0; r < L; ++r) {
                            const int q = r * np + p;
                            f.push_back(images[q][a[q] - '0'][b[q] - '0']);
                        }
                        it = cache[p].emplace(pattern, dicke_compress(f)).first;
                    }
                    acc = kron(acc, it->second);
                }
                bank += coef * acc;
            }
            bank = 0.5 * (bank + bank.adjoint());
            for (int p = 0; p < np; ++p)
                ladders.push_back({plan.pairs[p].first, plan.pairs[p].second, plan.gaps[p]});
        }

        // Step 3: per block and pure component, the block-restricted synthesis channel.
        Mat rho_eps = Mat::Zero(dt, dt);
        std::vector<Mat> branch_outputs;
        for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
            const auto& blk = plan.blocks[b];
            Mat sub(blk.size(), blk.size());
            double pl = 0.0;
            for (std::size_t x = 0; x < blk.size(); ++x) {
                for (std::size_t y = 0; y < blk.size(); ++y) sub(x, y) = t(blk[x], blk[y]);
                pl += t(blk[x], blk[x]).real();
            }
            if (pl <= kWeightFloor) continue;
            const int jidx = static_cast<int>(std::find(blk.begin(), blk.end(), plan.anchor[b]) - blk.begin());
            for (auto comp : spectral_mixture(sub)) {
                Vec full = Vec::Zero(dt);
                for (std::size_t x = 0; x < blk.size(); ++x) full(blk[x]) = comp.state(x);
                Mat out_s;
                if (!plan.needs_synthesis[b] || single_energy(full, et)) {
                    out_s = full * full.adjoint();
                } else {
                    SynthesisChannel ch = quasi_unitary_channel(complete_unitary(comp.state, jidx), blk, sp, jidx,
                                                                ladders, plan.shifts[b], L, true);
                    Mat joint = run_synthesis(ch, plan.anchor[b], bank);
                    const Index nb = joint.rows() / dt;
                    rep.bank_dimension = std::max(rep.bank_dimension, nb);
                    out_s = partial_trace(joint, {dt, static_cast<int>(nb)}, {0});
                }
                branch_outputs.push_back(out_s);
                rho_eps += comp.weight * out_s;
                rep.mixture.push_back({comp.weight, full, static_cast<int>(b)});
            }
        }
        rho_eps = 0.5 * (rho_eps + rho_eps.adjoint());
        rep.output = DensityMatrix(target.layout(), rho_eps);
        rep.achieved_distance = trace_distance(rho_eps, t);
        rep.catalyst_count = static_cast<int>(rep.ledger.entries.size());
        rep.product_residual_scope = "not applicable (quasi-correlated rounds, no swap)";
        int mmax = 0;
        for (int m : plan.max_shift) mmax = std::max(mmax, m);
        for (int m = 1; m <= mmax; ++m) rep.overlaps.push_back(overlap(L, m));
        if (opt.sample_seed && !rep.mixture.empty()) {
            std::mt19937_64 rng(*opt.sample_seed);
            std::vector<double> w;
            for (const auto& c : rep.mixture) w.push_back(c.weight);
            std::discrete_distribution<int> pick(w.begin(), w.end());
            const int bidx = pick(rng);
            rep.sampled_branch = bidx;
            const Vec& psi = rep.mixture[bidx].state;
            rep.sampled_distance = trace_distance(branch_outputs[bidx], Mat(psi * psi.adjoint()));
        }

        rep.report.at_most("achieved trace distance", rep.achieved_distance, epsilon);
        rep.report.at_most("ledger max residual", rep.ledger.max_residual(), kRestorationTol);
        std::ostringstream os;
        os << "K=" << budget.K << " L=" << L << " pairs=" << np << " catalysts=" << rep.catalyst_count
           << " rounds=" << round;
        rep.report.notes.push_back(os.str());
        rep.report.notes.push_back(
            "each amplification round touches one catalyst and non-catalytic systems only; seeds from repeated "
            "extraction are correlated with S and each other");
        rep.report.notes.push_back("quasi-correlated: no claim of correlated-catalytic feasibility is made");
        tried.push_back(budget);
        if (rep.achieved_distance <= epsilon) break;
    }
    rep.attempts = tried;
    if (!rep.ledger.marginal_catalytic())
        throw InvariantError("quasi_prepare: ledger violation, a catalyst was not restored");
    return rep;
}

}  // namespace qcat
