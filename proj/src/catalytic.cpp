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

#include "qcat/catalytic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qcat/linalg.hpp"

namespace qcat {

namespace {

Mat power_matrix(const Mat& m, int k) {
    Mat out = Mat::Identity(1, 1);
    for (int i = 0; i < k; ++i) out = kron(out, m);
    return out;
}

SpMat to_sparse(const Mat& m) { return m.sparseView(1.0, 0.0); }

Mat ket_bra(Index d, Index r, Index c) {
    Mat m = Mat::Zero(d, d);
    m(r, c) = 1.0;
    return m;
}

}  // namespace

// ------------------------------------------------------------ conversion

std::string copy_label(int i) { return "S" + std::to_string(i); }

SystemLayout copies_layout(const SystemLayout& single, int n) {
    if (single.subsystems().size() != 1) throw InputError("copies: expects a single-subsystem layout");
    SystemLayout out = single.with_labels({copy_label(1)});
    for (int i = 2; i <= n; ++i) out = out.concat(single.with_labels({copy_label(i)}));
    return out;
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n) {
    if (n < 1) throw InputError("tensor_power: n must be positive");
    return DensityMatrix(copies_layout(rho.layout(), n), power_matrix(rho.matrix(), n));
}

Conversion convert_asymptotic(const DensityMatrix& rho, const DensityMatrix& rho_prime,
                              const KrausChannel& big_channel, int n, double epsilon) {
    if (n < 1) throw InputError("convert: n must be positive");
    if (!(epsilon >= 0.0)) throw InputError("convert: epsilon must be nonnegative");
    if (!rho.layout().isomorphic(rho_prime.layout()))
        throw InputError("convert: rho and rho' must share a space; embed them with direct_sum_layout first");
    const Index d = rho.dim();
    const Index dn = static_cast<Index>(std::llround(std::pow(static_cast<double>(d), n)));
    if (static_cast<double>(dn) * n > static_cast<double>(dimension_cap()))
        throw DimensionError("convert: d^n * n exceeds the dimension cap");
    const SystemLayout copies = copies_layout(rho.layout(), n);
    if (!big_channel.input_layout().isomorphic(copies) || !big_channel.output_layout().isomorphic(copies))
        throw InputError("convert: the channel must act on n copies of the system");

    Conversion conv;
    conv.catalyst.n = n;
    const Mat xi = apply_kraus(big_channel.ops(), power_matrix(rho.matrix(), n));
    conv.catalyst.asymptotic_output = DensityMatrix(copies, xi);
    const double premise = trace_distance(xi, power_matrix(rho_prime.matrix(), n));
    if (premise > epsilon + 1e-12)
        throw InputError("convert: asymptotic premise fails, distance " + std::to_string(premise) + " > epsilon");

    // Register of n classical labels k = 1..n stored at index k - 1.
    const SystemLayout reg = SystemLayout::single(kRegisterLabel, std::vector<Rational>(n, Rational(0)));
    SystemLayout body_layout = reg;
    if (n > 1) {
        std::vector<std::string> rest;
        for (int i = 2; i <= n; ++i) rest.push_back(copy_label(i));
        body_layout = copies.subset(rest).concat(reg);
    }
    Mat body = Mat::Zero(dn / d * n, dn / d * n);
    std::vector<int> cdims(n, static_cast<int>(d));
    for (int k = 1; k <= n; ++k) {
        Mat xi_part = Mat::Identity(1, 1);
        if (n - k > 0) {
            std::vector<std::size_t> keep;
            for (int i = 0; i < n - k; ++i) keep.push_back(i);
            xi_part = partial_trace(xi, cdims, keep);
        }
        body += kron(kron(power_matrix(rho.matrix(), k - 1), xi_part), ket_bra(n, k - 1, k - 1)) / double(n);
    }
    conv.catalyst.body = DensityMatrix(body_layout, body);

    // Lambda = swap o relabel o cond on S1..Sn (x) Reg.
    const SystemLayout full = copies.concat(reg);
    const Mat last = ket_bra(n, n - 1, n - 1);
    std::vector<int> fdims = full.dims();
    std::vector<std::size_t> order;
    order.push_back(n - 1);
    for (int i = 0; i < n - 1; ++i) order.push_back(i);
    order.push_back(n);
    Mat relabel = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) relabel((k + 1) % n, k) = 1.0;
    const Mat post = permutation_unitary(fdims, order) * kron(Mat::Identity(dn, dn), relabel);
    std::vector<SpMat> ops;
    for (const auto& k : big_channel.dense_ops()) ops.push_back(to_sparse(post * kron(k, last)));
    ops.push_back(to_sparse(post * kron(Mat::Identity(dn, dn), Mat::Identity(n, n) - last)));
    conv.lambda = KrausChannel(full, full, ops);

    DensityMatrix input = tensor(rho.relabeled({copy_label(1)}), conv.catalyst.body);
    conv.joint_output = apply_channel(conv.lambda, input);
    conv.system_output = partial_trace(conv.joint_output, {copy_label(1)});
    std::vector<std::string> cat_labels = body_layout.labels();
    DensityMatrix cat_after = partial_trace(conv.joint_output, cat_labels);

    // (1/n) sum_k Tr_{not k} Xi, evaluated directly.
    Mat mixture = Mat::Zero(d, d);
    for (int k = 0; k < n; ++k) mixture += partial_trace(xi, cdims, {static_cast<std::size_t>(k)}) / double(n);

    ProtocolReport& rep = conv.report;
    rep.name = "convert_asymptotic";
    rep.at_most("premise distance", premise, epsilon);
    rep.at_most("catalyst restoration (max entry)", max_abs(cat_after.matrix() - conv.catalyst.body.matrix()), 1e-10);
    rep.at_most("system distance to rho'", trace_distance(conv.system_output.matrix(), rho_prime.matrix()), epsilon);
    rep.at_most("system marginal vs copy mixture", max_abs(conv.system_output.matrix() - mixture), 1e-10);
    return conv;
}

SystemLayout direct_sum_layout(const SystemLayout& a, const SystemLayout& b, const std::string& label) {
    std::vector<Rational> e;
    for (Index i = 0; i < a.total_dim(); ++i) e.push_back(a.energy(i));
    for (Index i = 0; i < b.total_dim(); ++i) e.push_back(b.energy(i));
    return SystemLayout::single(label, std::move(e));
}

DensityMatrix embed_first(const DensityMatrix& a, const SystemLayout& sum) {
    Mat m = Mat::Zero(sum.total_dim(), sum.total_dim());
    m.topLeftCorner(a.dim(), a.dim()) = a.matrix();
    return DensityMatrix(sum, m);
}

DensityMatrix embed_second(const DensityMatrix& b, const SystemLayout& sum) {
    Mat m = Mat::Zero(sum.total_dim(), sum.total_dim());
    m.bottomRightCorner(b.dim(), b.dim()) = b.matrix();
    return DensityMatrix(sum, m);
}

// ------------------------------------------------------------ measures

double skew_information(const DensityMatrix& rho) {
    const Eigen::VectorXd h = rho.layout().hamiltonian_diagonal();
    const Mat sq = linalg::sqrt_psd(rho.matrix());
    // Tr(rho H^2) - Tr(sqrt(rho) H sqrt(rho) H) = sum_ij |s_ij|^2 (h_i^2 - h_i h_j).
    double v = 0.0;
    for (Index j = 0; j < sq.cols(); ++j)
        for (Index i = 0; i < sq.rows(); ++i) v += std::norm(sq(i, j)) * (h(i) * h(i) - h(i) * h(j));
    return std::max(v, 0.0);
}

Mat dephase_energy(const DensityMatrix& rho) {
    Mat m = rho.matrix();
    const SystemLayout& l = rho.layout();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (i != j && l.energy(i) != l.energy(j)) m(i, j) = 0.0;
    return m;
}

double relative_entropy_coherence(const DensityMatrix& rho) {
    return std::max(von_neumann_entropy(dephase_energy(rho)) - von_neumann_entropy(rho.matrix()), 0.0);
}

ResourceMeasure skew_measure() { return {"skew_information", skew_information}; }
ResourceMeasure coherence_measure() { return {"relative_entropy_coherence", relative_entropy_coherence}; }

MonotonicityReport check_catalytic_monotonicity(const ResourceMeasure& measure, const CatalyticRecord& record,
                                                double tol) {
    if (record.joint_in.dim() == 0 || record.joint_out.dim() == 0)
        throw InputError("monotonicity: record is missing joint states");
    if (record.system.empty()) throw InputError("monotonicity: record names no system");
    MonotonicityReport r;
    r.measure = measure.name;
    r.joint_in = measure.evaluate(record.joint_in);
    r.joint_out = measure.evaluate(record.joint_out);
    r.system_in = measure.evaluate(partial_trace(record.joint_in, record.system));
    r.system_out = measure.evaluate(partial_trace(record.joint_out, record.system));
    double sum_in = r.system_in;
    r.marginal_sum_out = r.system_out;
    for (const auto& c : record.catalysts) {
        r.catalysts_in.push_back(measure.evaluate(partial_trace(record.joint_in, c)));
        r.catalysts_out.push_back(measure.evaluate(partial_trace(record.joint_out, c)));
        sum_in += r.catalysts_in.back();
        r.marginal_sum_out += r.catalysts_out.back();
        r.max_catalyst_change = std::max(r.max_catalyst_change, std::abs(r.catalysts_out.back() - r.catalysts_in.back()));
    }
    r.tensor_additivity_gap = r.joint_in - sum_in;
    r.superadditivity_gap = r.joint_out - r.marginal_sum_out;
    r.tensor_additivity_holds = std::abs(r.tensor_additivity_gap) <= tol;
    r.superadditivity_holds = r.superadditivity_gap >= -tol;
    r.joint_monotone = r.joint_out <= r.joint_in + tol;
    r.system_monotone = r.system_out <= r.system_in + tol;
    return r;
}

// ------------------------------------------------------------ broadcasting

Mat broadcast_rho_tilde(double delta) {
    Mat m(3, 3);
    m << 0.25, delta, 0.0, delta, 0.5, delta, 0.0, delta, 0.25;
    return m;
}

Mat broadcast_tau(double delta) {
    const double d2 = delta * delta;
    const double a = 0.1 + 152.0 / 225.0 * d2, b = 38.0 / 45.0 * delta, c = 152.0 / 225.0 * d2;
    Mat m(3, 3);
    m << a, b, c, b, 0.8 - 304.0 / 225.0 * d2, b, c, b, a;
    return m;
}

double broadcast_delta_max() {
    auto psd = [](double d) { return linalg::min_eigenvalue(broadcast_tau(d)) >= 0.0; };
    if (psd(0.25)) return 0.25;
    double lo = 0.0, hi = 0.25;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        double mid = 0.5 * (lo + hi);
        (psd(mid) ? lo : hi) = mid;
    }
    return lo;
}

Mat broadcast_default_rho() {
    Mat m(3, 3);
    m << 1.0 / 3, 0.2, 0.0, 0.2, 1.0 / 3, 0.2, 0.0, 0.2, 1.0 / 3;
    return m;
}

KrausChannel broadcast_e1(const Mat& rho, double delta, const SystemLayout& layout) {
    if (rho.rows() != 3) throw InputError("broadcast: rho must be 3x3");
    if (std::abs(rho(0, 2)) > 1e-12) throw InputError("broadcast: rho_13 must vanish");
    if (std::abs(rho(0, 1)) == 0.0 || std::abs(rho(1, 2)) == 0.0)
        throw InputError("broadcast: rho_12 and rho_23 must be nonzero");
    // Phases making rho_12 and rho_23 real positive.
    const double p1 = std::arg(rho(0, 1)), p3 = -std::arg(rho(1, 2));
    Mat phase = Mat::Zero(3, 3);
    phase(0, 0) = std::polar(1.0, -p1);
    phase(1, 1) = 1.0;
    phase(2, 2) = std::polar(1.0, -p3);

    const double r11 = rho(0, 0).real(), r22 = rho(1, 1).real(), r33 = rho(2, 2).real();
    const double a2 = std::sqrt(std::min(1.0, 0.5 / r22));
    const double a1 = delta / (a2 * std::abs(rho(0, 1))), a3 = delta / (a2 * std::abs(rho(1, 2)));
    const Eigen::Vector3d target(0.25, 0.5, 0.25), a(a1, a2, a3), diag(r11, r22, r33);
    for (int k = 0; k < 3; ++k)
        if (a(k) > 1.0 + 1e-12 || a(k) * a(k) * diag(k) > target(k) + 1e-12)
            throw InputError("broadcast: E1 is infeasible for this rho and delta");

    std::vector<Mat> ops;
    Mat damp = Mat::Zero(3, 3);
    for (int k = 0; k < 3; ++k) damp(k, k) = std::min(a(k), 1.0);
    ops.push_back(damp * phase);
    Eigen::Vector3d deficit;
    for (int k = 0; k < 3; ++k) deficit(k) = std::max(target(k) - damp(k, k).real() * damp(k, k).real() * diag(k), 0.0);
    const double total = deficit.sum();
    for (int l = 0; l < 3; ++l) {
        const double left = 1.0 - std::norm(damp(l, l));
        if (left <= 0.0) continue;
        for (int k = 0; k < 3; ++k) {
            const double q = total > 0.0 ? left * deficit(k) / total : (k == l ? left : 0.0);
            if (q <= 0.0) continue;
            ops.push_back(std::sqrt(q) * ket_bra(3, k, l) * phase);
        }
    }
    return KrausChannel(layout, layout, ops);
}

KrausChannel broadcast_e2(const SystemLayout& sc_layout) {
    auto ket = [](int i, int j) {
        Vec v = Vec::Zero(9);
        v(3 * i + j) = 1.0;
        return v;
    };
    const double s = 1.0 / std::sqrt(2.0);
    Mat k0 = Mat::Zero(9, 9);
    for (int i = 0; i < 3; ++i) k0 += ket(i, i) * ket(i, i).adjoint();
    std::vector<Mat> ops;
    const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    std::vector<Mat> comp;
    for (const auto& p : pairs) {
        Vec plus = s * (ket(p[0], p[1]) + ket(p[1], p[0]));
        Vec minus = s * (ket(p[0], p[1]) - ket(p[1], p[0]));
        k0 += plus * plus.adjoint();
        comp.push_back(ket(1, 1) * minus.adjoint());
    }
    ops.push_back(k0);
    for (auto& c : comp) ops.push_back(c);
    return KrausChannel(sc_layout, sc_layout, ops);
}

BroadcastResult broadcast3(const BroadcastConfig& cfg, const std::optional<Mat>& rho_in) {
    if (cfg.energies.size() != 3) throw InputError("broadcast: needs three energies");
    BroadcastResult r;
    r.delta = cfg.delta;
    r.delta_max = broadcast_delta_max();
    if (!(cfg.delta > 0.0) || cfg.delta > r.delta_max)
        throw InputError("broadcast: delta must lie in (0, delta_max]");
    const SystemLayout s = SystemLayout::single("S", cfg.energies);
    const SystemLayout c = SystemLayout::single("C", cfg.energies);
    const Mat rho = rho_in ? *rho_in : broadcast_default_rho();
    DensityMatrix rho_state(s, rho);

    r.e1 = broadcast_e1(rho, cfg.delta, s);
    r.rho_tilde = apply_channel(r.e1, rho_state);
    r.e1_output_residual = max_abs(r.rho_tilde.matrix() - broadcast_rho_tilde(cfg.delta));
    r.tau = DensityMatrix(c, broadcast_tau(cfg.delta));
    r.e2 = broadcast_e2(s.concat(c));
    DensityMatrix joint = tensor(r.rho_tilde, r.tau);
    r.sigma = apply_channel(r.e2, joint);
    r.rho_prime = partial_trace(r.sigma, {"S"});
    const Mat cat = partial_trace(r.sigma, {"C"}).matrix();
    const Mat& t = r.tau.matrix();
    r.catalyst_residual = max_abs(cat - t);
    r.tau12_residual = std::abs(cat(0, 1) - t(0, 1));
    r.tau23_residual = std::abs(cat(1, 2) - t(1, 2));
    r.tau13_residual = std::abs(cat(0, 2) - t(0, 2));
    const SpMat& k0 = r.e2.ops().front();
    Mat sigma0 = k0 * joint.matrix() * k0.adjoint();
    r.k0_only_22_deficit = t(1, 1).real() - partial_trace(sigma0, {3, 3}, {1})(1, 1).real();
    r.rho_prime_13 = r.rho_prime.matrix()(0, 2).real();
    r.expected_rho_prime_13 = 152.0 / 225.0 * cfg.delta * cfg.delta;

    ProtocolReport& rep = r.report;
    rep.name = "broadcast3";
    rep.at_most("E1 output vs rho_tilde", r.e1_output_residual, 1e-12);
    rep.at_most("catalyst restoration (max entry)", r.catalyst_residual, 1e-10);
    rep.at_most("rho'_13 - 152/225 delta^2", std::abs(r.rho_prime_13 - r.expected_rho_prime_13), 1e-10);
    rep.at_least("K0-only (2,2) deficit", r.k0_only_22_deficit, -1e-12);
    rep.at_least("rho'_13", r.rho_prime_13, 1e-15);
    return r;
}

// ------------------------------------------------------------ reuse

namespace {

void schedule_group(const std::vector<int>& copies, int K, int n, std::vector<ReuseRun>& runs) {
    if (n == 0) {
        ReuseRun run;
        for (int s = 0; s < K; ++s) run.instances.push_back({copies.front(), s});
        runs.push_back(std::move(run));
        return;
    }
    const std::size_t g = copies.size() / K;
    for (int q = 0; q < K; ++q)
        schedule_group(std::vector<int>(copies.begin() + q * g, copies.begin() + (q + 1) * g), K, n - 1, runs);
    // Combine the t-th copy of each group: slot s from group (r + s) mod K.
    for (std::size_t t = 0; t < g; ++t)
        for (int r = 0; r < K; ++r) {
            ReuseRun run;
            for (int s = 0; s < K; ++s) run.instances.push_back({copies[((r + s) % K) * g + t], s});
            runs.push_back(std::move(run));
        }
}

}  // namespace

ReuseSchedule reuse_schedule(int K, int n) {
    if (K < 2 || n < 1) throw InputError("reuse: needs K >= 2 and n >= 1");
    double copies = std::pow(static_cast<double>(K), n);
    if (copies * K > static_cast<double>(dimension_cap()))
        throw InputError("reuse: K^n copies exceed the configured cap");
    ReuseSchedule s;
    s.K = K;
    s.n = n;
    s.copies = static_cast<int>(copies);
    std::vector<int> ids(s.copies);
    for (int i = 0; i < s.copies; ++i) ids[i] = i;
    schedule_group(ids, K, n, s.runs);
    return s;
}

ReuseValidation validate_reuse(const ReuseSchedule& s) {
    ReuseValidation v;
    const int N = s.copies * s.K;
    std::vector<std::vector<char>> corr(N, std::vector<char>(N, 0));
    auto id = [&](const CatalystInstance& c) { return c.copy * s.K + c.slot; };
    for (const auto& run : s.runs) {
        std::set<int> slots;
        std::vector<int> members;
        for (const auto& c : run.instances) {
            if (c.copy < 0 || c.copy >= s.copies || c.slot < 0 || c.slot >= s.K) {
                ++v.slot_violations;
                continue;
            }
            slots.insert(c.slot);
            members.push_back(id(c));
        }
        if (static_cast<int>(slots.size()) != s.K || static_cast<int>(run.instances.size()) != s.K) ++v.slot_violations;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                if (corr[members[a]][members[b]] || members[a] == members[b]) ++v.correlated_pair_violations;
        // Outside partners of any member become correlated with every member.
        std::vector<char> in_run(N, 0);
        for (int m : members) in_run[m] = 1;
        std::vector<int> partners;
        for (int y = 0; y < N; ++y) {
            if (in_run[y]) continue;
            for (int m : members)
                if (corr[m][y]) {
                    partners.push_back(y);
                    break;
                }
        }
        for (int m : members) {
            for (int y : partners) corr[m][y] = corr[y][m] = 1;
            for (int m2 : members)
                if (m != m2) corr[m][m2] = 1;
        }
    }
    v.runs = static_cast<int>(s.runs.size());
    v.expected_runs = (s.n + 1) * s.copies;
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) v.correlated_pairs_final += corr[a][b];
    v.valid = v.correlated_pair_violations == 0 && v.slot_violations == 0 && v.runs == v.expected_runs;
    return v;
}

}  // namespace qcat
