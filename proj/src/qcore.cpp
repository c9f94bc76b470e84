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

#include "qcat/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "qcat/linalg.hpp"

namespace qcat {

// ---------------------------------------------------------------- layouts

SystemLayout::SystemLayout(std::vector<Subsystem> subs) : subs_(std::move(subs)) {
    std::set<std::string> seen;
    for (const auto& s : subs_) {
        if (s.label.empty()) throw InputError("subsystem label must be nonempty");
        if (!seen.insert(s.label).second) throw InputError("duplicate subsystem label '" + s.label + "'");
        if (s.dim <= 0) throw InputError("subsystem '" + s.label + "' has nonpositive dimension");
        if (static_cast<int>(s.energies.size()) != s.dim)
            throw InputError("subsystem '" + s.label + "' energies length differs from dimension");
    }
}

SystemLayout SystemLayout::single(const std::string& label, std::vector<Rational> energies) {
    int d = static_cast<int>(energies.size());
    return SystemLayout({Subsystem{label, d, std::move(energies)}});
}

SystemLayout SystemLayout::qubit(const std::string& label, const Rational& gap) {
    return single(label, {Rational(0), gap});
}

Index SystemLayout::total_dim() const {
    Index d = 1;
    for (const auto& s : subs_) d *= s.dim;
    return d;
}

std::vector<int> SystemLayout::dims() const {
    std::vector<int> d;
    for (const auto& s : subs_) d.push_back(s.dim);
    return d;
}

std::vector<std::string> SystemLayout::labels() const {
    std::vector<std::string> l;
    for (const auto& s : subs_) l.push_back(s.label);
    return l;
}

bool SystemLayout::has(const std::string& label) const {
    return std::any_of(subs_.begin(), subs_.end(), [&](const Subsystem& s) { return s.label == label; });
}

std::size_t SystemLayout::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < subs_.size(); ++i)
        if (subs_[i].label == label) return i;
    throw InputError("unknown subsystem label '" + label + "'");
}

Rational SystemLayout::energy(Index i) const {
    Rational e(0);
    for (std::size_t k = subs_.size(); k-- > 0;) {
        e += subs_[k].energies[static_cast<std::size_t>(i % subs_[k].dim)];
        i /= subs_[k].dim;
    }
    return e;
}

Eigen::VectorXd SystemLayout::hamiltonian_diagonal() const {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(1);
    for (const auto& s : subs_) {
        Eigen::VectorXd next(h.size() * s.dim);
        for (Index a = 0; a < h.size(); ++a)
            for (int b = 0; b < s.dim; ++b) next(a * s.dim + b) = h(a) + s.energies[b].to_double();
        h = next;
    }
    return h;
}

SystemLayout SystemLayout::concat(const SystemLayout& other) const {
    std::vector<Subsystem> all = subs_;
    all.insert(all.end(), other.subs_.begin(), other.subs_.end());
    return SystemLayout(std::move(all));
}

SystemLayout SystemLayout::subset(const std::vector<std::string>& keep) const {
    std::set<std::string> k(keep.begin(), keep.end());
    for (const auto& l : keep) index_of(l);
    std::vector<Subsystem> out;
    for (const auto& s : subs_)
        if (k.count(s.label)) out.push_back(s);
    return SystemLayout(std::move(out));
}

SystemLayout SystemLayout::reordered(const std::vector<std::size_t>& order) const {
    std::vector<Subsystem> out;
    for (auto i : order) out.push_back(subs_.at(i));
    return SystemLayout(std::move(out));
}

SystemLayout SystemLayout::with_labels(const std::vector<std::string>& labels) const {
    if (labels.size() != subs_.size()) throw InputError("relabel: label count mismatch");
    std::vector<Subsystem> out = subs_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].label = labels[i];
    return SystemLayout(std::move(out));
}

bool SystemLayout::isomorphic(const SystemLayout& other) const {
    if (subs_.size() != other.subs_.size()) return false;
    for (std::size_t i = 0; i < subs_.size(); ++i)
        if (subs_[i].dim != other.subs_[i].dim || subs_[i].energies != other.subs_[i].energies) return false;
    return true;
}

bool operator==(const SystemLayout& a, const SystemLayout& b) {
    if (!a.isomorphic(b)) return false;
    for (std::size_t i = 0; i < a.subs_.size(); ++i)
        if (a.subs_[i].label != b.subs_[i].label) return false;
    return true;
}

// ---------------------------------------------------------------- states

std::string density_diagnostic(const Mat& m, Index expected_dim) {
    std::ostringstream os;
    if (m.rows() != m.cols()) return "matrix is not square";
    if (m.rows() != expected_dim) {
        os << "dimension " << m.rows() << " does not match layout dimension " << expected_dim;
        return os.str();
    }
    if (!m.allFinite()) return "matrix has non-finite entries";
    double herm = max_abs(m - m.adjoint());
    if (herm > Tolerances::hermitian) {
        os << "not Hermitian (deviation " << herm << ")";
        return os.str();
    }
    cd tr = m.trace();
    if (std::abs(tr - cd(1.0)) > Tolerances::trace) {
        os.precision(15);
        os << "trace " << tr.real() << " differs from 1";
        return os.str();
    }
    const Index n = m.rows();
    if (n <= 256) {
        double lmin = linalg::min_eigenvalue(m);
        if (lmin < -Tolerances::psd) {
            os << "not positive semidefinite (minimum eigenvalue " << lmin << ")";
            return os.str();
        }
    } else {
        // M + tol I is positive definite exactly when the minimum eigenvalue exceeds -tol.
        Mat shifted = 0.5 * (m + m.adjoint());
        shifted.diagonal().array() += Tolerances::psd;
        Eigen::LLT<Mat> llt(shifted);
        if (llt.info() != Eigen::Success) {
            os << "not positive semidefinite (minimum eigenvalue " << linalg::min_eigenvalue(m) << ")";
            return os.str();
        }
    }
    return {};
}

DensityMatrix::DensityMatrix(SystemLayout layout, Mat m) : layout_(std::move(layout)), m_(std::move(m)) {
    std::string diag = density_diagnostic(m_, layout_.total_dim());
    if (!diag.empty()) throw InvariantError("density matrix invalid: " + diag);
}

DensityMatrix DensityMatrix::pure(const SystemLayout& layout, const Vec& psi) {
    Vec v = psi / psi.norm();
    return DensityMatrix(layout, v * v.adjoint());
}

DensityMatrix DensityMatrix::basis(const SystemLayout& layout, Index i) {
    Mat m = Mat::Zero(layout.total_dim(), layout.total_dim());
    m(i, i) = 1.0;
    return DensityMatrix(layout, m);
}

DensityMatrix DensityMatrix::maximally_mixed(const SystemLayout& layout) {
    Index d = layout.total_dim();
    return DensityMatrix(layout, Mat::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::relabeled(const std::vector<std::string>& labels) const {
    DensityMatrix r;
    r.layout_ = layout_.with_labels(labels);
    r.m_ = m_;
    return r;
}

// ---------------------------------------------------------------- channels

KrausChannel::KrausChannel(SystemLayout in, SystemLayout out, std::vector<SpMat> ops, double tol)
    : in_(std::move(in)), out_(std::move(out)), ops_(std::move(ops)) {
    if (ops_.empty()) throw InputError("Kraus channel needs at least one operator");
    for (auto& k : ops_) {
        if (k.rows() != out_.total_dim() || k.cols() != in_.total_dim())
            throw InputError("Kraus operator shape does not match layouts");
        k.makeCompressed();
    }
    double err = completeness_error();
    if (err > tol) {
        std::ostringstream os;
        os << "Kraus completeness violated (deviation " << err << ")";
        throw InvariantError(os.str());
    }
}

KrausChannel::KrausChannel(SystemLayout in, SystemLayout out, const std::vector<Mat>& ops, double tol)
    : KrausChannel(std::move(in), std::move(out),
                   [&]() {
                       std::vector<SpMat> s;
                       for (const auto& k : ops) s.push_back(k.sparseView(1.0, 0.0));
                       return s;
                   }(),
                   tol) {}

KrausChannel KrausChannel::identity(const SystemLayout& layout) {
    Index d = layout.total_dim();
    return KrausChannel(layout, layout, std::vector<Mat>{Mat::Identity(d, d)});
}

KrausChannel KrausChannel::unitary(const SystemLayout& layout, const Mat& u) {
    return KrausChannel(layout, layout, std::vector<Mat>{u});
}

std::vector<Mat> KrausChannel::dense_ops() const {
    std::vector<Mat> d;
    for (const auto& k : ops_) d.push_back(Mat(k));
    return d;
}

double KrausChannel::completeness_error() const {
    Index n = in_.total_dim();
    SpMat acc(n, n);
    for (const auto& k : ops_) acc += SpMat(k.adjoint()) * k;
    SpMat id(n, n);
    id.setIdentity();
    SpMat diff = acc - id;
    double m = 0.0;
    for (int c = 0; c < diff.outerSize(); ++c)
        for (SpMat::InnerIterator it(diff, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

KrausChannel KrausChannel::then(const KrausChannel& after) const {
    if (after.in_.total_dim() != out_.total_dim()) throw InputError("channel composition dimension mismatch");
    std::vector<SpMat> prod;
    for (const auto& b : after.ops_)
        for (const auto& a : ops_) {
            SpMat p = b * a;
            p.prune(cd(0.0), 0.0);
            if (p.nonZeros() > 0) prod.push_back(p);
        }
    if (prod.empty()) prod.push_back(SpMat(after.out_.total_dim(), in_.total_dim()));
    return KrausChannel(in_, after.out_, std::move(prod));
}

// ---------------------------------------------------------------- basic ops

Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

SpMat kron(const SpMat& a, const SpMat& b) {
    std::vector<Eigen::Triplet<cd>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (int ca = 0; ca < a.outerSize(); ++ca)
        for (SpMat::InnerIterator ia(a, ca); ia; ++ia)
            for (int cb = 0; cb < b.outerSize(); ++cb)
                for (SpMat::InnerIterator ib(b, cb); ib; ++ib)
                    t.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                   static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
    SpMat r(a.rows() * b.rows(), a.cols() * b.cols());
    r.setFromTriplets(t.begin(), t.end());
    return r;
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    for (const auto& l : b.layout().labels())
        if (a.layout().has(l)) throw InputError("tensor: label collision on '" + l + "'");
    return DensityMatrix(a.layout().concat(b.layout()), kron(a.matrix(), b.matrix()));
}

namespace {

std::vector<Index> strides_of(const std::vector<int>& dims) {
    std::vector<Index> s(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
    return s;
}

// Flat offsets of every multi-index over the listed subsystems, first listed most significant.
std::vector<Index> offsets_over(const std::vector<int>& dims, const std::vector<Index>& strides,
                                const std::vector<std::size_t>& which) {
    std::vector<Index> offs{0};
    for (auto w : which) {
        std::vector<Index> next;
        next.reserve(offs.size() * dims[w]);
        for (Index o : offs)
            for (int v = 0; v < dims[w]; ++v) next.push_back(o + v * strides[w]);
        offs = std::move(next);
    }
    return offs;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& which) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(which.begin(), which.end(), i) == which.end()) rest.push_back(i);
    return rest;
}

}  // namespace

Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<std::size_t>& keep) {
    auto strides = strides_of(dims);
    std::vector<std::size_t> k = keep;
    std::sort(k.begin(), k.end());
    auto traced = complement(dims.size(), k);
    auto ko = offsets_over(dims, strides, k);
    auto to = offsets_over(dims, strides, traced);
    const Index dk = static_cast<Index>(ko.size());
    Mat r = Mat::Zero(dk, dk);
    for (Index j = 0; j < dk; ++j)
        for (Index t : to) {
            const Index col = ko[j] + t;
            for (Index i = 0; i < dk; ++i) r(i, j) += m(ko[i] + t, col);
        }
    return r;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    std::vector<std::size_t> idx;
    for (const auto& l : keep) idx.push_back(rho.layout().index_of(l));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<std::string> ordered;
    for (auto i : idx) ordered.push_back(rho.layout().subsystems()[i].label);
    return DensityMatrix(rho.layout().subset(ordered), partial_trace(rho.matrix(), rho.layout().dims(), idx));
}

double trace_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() <= 64) {
        Eigen::JacobiSVD<Mat> svd(m);
        return svd.singularValues().sum();
    }
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

double trace_distance(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("trace_distance: dimension mismatch");
    return 0.5 * trace_norm(a - b);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw InputError("trace_distance: dimension mismatch");
    return trace_distance(a.matrix(), b.matrix());
}

Mat apply_kraus(const std::vector<SpMat>& ops, const Mat& m) {
    Mat out = Mat::Zero(ops.front().rows(), ops.front().rows());
    for (const auto& k : ops) {
        Mat km = k * m;
        out.noalias() += km * k.adjoint();
    }
    return out;
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
    if (rho.dim() != ch.input_layout().total_dim())
        throw InputError("apply_channel: state dimension does not match channel input");
    if (ch.completeness_error() > Tolerances::completeness)
        throw InvariantError("apply_channel: channel violates completeness");
    return DensityMatrix(ch.output_layout(), apply_kraus(ch.ops(), rho.matrix()));
}

namespace {

// Returns (op acting on targets) * m, with rows of m grouped by target multi-index.
Mat left_apply_local(const Mat& op, const Mat& m, const std::vector<Index>& toff, const std::vector<Index>& roff) {
    const Index dl = static_cast<Index>(toff.size());
    Mat out(m.rows(), m.cols());
    Mat gather(dl, m.cols());
    for (Index r : roff) {
        for (Index a = 0; a < dl; ++a) gather.row(a) = m.row(r + toff[a]);
        Mat res = op * gather;
        for (Index a = 0; a < dl; ++a) out.row(r + toff[a]) = res.row(a);
    }
    return out;
}

}  // namespace

Mat apply_local(const std::vector<Mat>& ops, const Mat& m, const std::vector<int>& dims,
                const std::vector<std::size_t>& targets) {
    auto strides = strides_of(dims);
    auto toff = offsets_over(dims, strides, targets);
    auto roff = offsets_over(dims, strides, complement(dims.size(), targets));
    Mat out = Mat::Zero(m.rows(), m.cols());
    for (const auto& k : ops) {
        if (k.rows() != static_cast<Index>(toff.size()) || k.cols() != static_cast<Index>(toff.size()))
            throw InputError("apply_local: operator shape does not match target subsystems");
        Mat a = left_apply_local(k, m, toff, roff);
        Mat b = left_apply_local(k, a.adjoint(), toff, roff);
        out += b.adjoint();
    }
    return out;
}

DensityMatrix apply_local(const KrausChannel& ch, const DensityMatrix& rho, const std::vector<std::string>& targets) {
    std::vector<std::size_t> idx;
    std::vector<int> tdims;
    for (const auto& l : targets) {
        idx.push_back(rho.layout().index_of(l));
        tdims.push_back(rho.layout().subsystems()[idx.back()].dim);
    }
    if (tdims != ch.input_layout().dims() || ch.input_layout().total_dim() != ch.output_layout().total_dim())
        throw InputError("apply_local: channel layout does not match target subsystems");
    return DensityMatrix(rho.layout(), apply_local(ch.dense_ops(), rho.matrix(), rho.layout().dims(), idx));
}

namespace {

// map[i] is the flat index of basis state i after moving subsystem order[k] to slot k.
std::vector<Index> permutation_map(const std::vector<int>& dims, const std::vector<std::size_t>& order) {
    const std::size_t n = dims.size();
    if (order.size() != n) throw InputError("permutation: order length mismatch");
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
        if (sorted[i] != i) throw InputError("permutation: order is not a permutation");
    std::vector<int> new_dims;
    for (auto o : order) new_dims.push_back(dims[o]);
    auto old_strides = strides_of(dims);
    auto new_strides = strides_of(new_dims);
    std::vector<std::size_t> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
    Index d = 1;
    for (int x : dims) d *= x;
    std::vector<Index> map(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
        Index rem = i, j = 0;
        for (std::size_t k = 0; k < n; ++k) {
            j += (rem / old_strides[k]) * new_strides[pos[k]];
            rem %= old_strides[k];
        }
        map[static_cast<std::size_t>(i)] = j;
    }
    return map;
}

}  // namespace

Mat permutation_unitary(const std::vector<int>& dims, const std::vector<std::size_t>& order) {
    auto map = permutation_map(dims, order);
    const Index d = static_cast<Index>(map.size());
    Mat p = Mat::Zero(d, d);
    for (Index i = 0; i < d; ++i) p(map[i], i) = 1.0;
    return p;
}

DensityMatrix permute(const DensityMatrix& rho, const std::vector<std::size_t>& order) {
    auto map = permutation_map(rho.layout().dims(), order);
    Mat out(rho.dim(), rho.dim());
    for (Index j = 0; j < rho.dim(); ++j)
        for (Index i = 0; i < rho.dim(); ++i) out(map[i], map[j]) = rho.matrix()(i, j);
    return DensityMatrix(rho.layout().reordered(order), out);
}

DensityMatrix swap_subsystems(const DensityMatrix& rho, const std::string& a, const std::string& b) {
    std::size_t ia = rho.layout().index_of(a), ib = rho.layout().index_of(b);
    const auto& sa = rho.layout().subsystems()[ia];
    const auto& sb = rho.layout().subsystems()[ib];
    if (sa.dim != sb.dim || sa.energies != sb.energies)
        throw InputError("swap: subsystems '" + a + "' and '" + b + "' are not isomorphic");
    std::vector<std::size_t> order(rho.layout().size());
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[ia], order[ib]);
    DensityMatrix moved = permute(rho, order);
    return moved.relabeled(rho.layout().labels());
}

// ---------------------------------------------------------------- covariance

Mat time_evolve(const Mat& m, const Eigen::VectorXd& hdiag, double t) {
    Vec ph(hdiag.size());
    for (Index i = 0; i < hdiag.size(); ++i) ph(i) = std::exp(cd(0.0, -hdiag(i) * t));
    return ph.asDiagonal() * m * ph.conjugate().asDiagonal();
}

CovarianceReport check_covariance(const KrausChannel& ch, const std::vector<double>& times, int trials, double tol,
                                  std::uint64_t seed) {
    if (trials < 1) throw InputError("check_covariance: trials must be >= 1");
    CovarianceReport rep;
    rep.sampled_times = times;
    const Eigen::VectorXd hin = ch.input_layout().hamiltonian_diagonal();
    const Eigen::VectorXd hout = ch.output_layout().hamiltonian_diagonal();
    const Index d = ch.input_layout().total_dim();
    const int rank = d <= 64 ? static_cast<int>(d) : 3;
    for (int trial = 0; trial < trials; ++trial) {
        Mat rho = random_density(d, rank, seed + static_cast<std::uint64_t>(trial));
        Mat out = apply_kraus(ch.ops(), rho);
        for (double t : times) {
            Mat lhs = time_evolve(out, hout, t);
            Mat rhs = apply_kraus(ch.ops(), time_evolve(rho, hin, t));
            rep.max_deviation = std::max(rep.max_deviation, trace_norm(lhs - rhs));
        }
    }
    rep.passed = rep.max_deviation <= tol;
    return rep;
}

double commutator_norm_with_hamiltonian(const Mat& u, const SystemLayout& layout) {
    Eigen::VectorXd h = layout.hamiltonian_diagonal();
    if (u.rows() != h.size() || u.cols() != h.size()) throw InputError("unitary shape does not match layout");
    Mat c(u.rows(), u.cols());
    for (Index i = 0; i < u.rows(); ++i)
        for (Index j = 0; j < u.cols(); ++j) c(i, j) = u(i, j) * (h(j) - h(i));
    // Operator norm of [U, H].
    Eigen::JacobiSVD<Mat> svd(c);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

bool check_energy_conserving_unitary(const Mat& u, const SystemLayout& layout, double tol) {
    if (u.rows() != u.cols()) throw InputError("unitary must be square");
    double unit = max_abs(u.adjoint() * u - Mat::Identity(u.rows(), u.cols()));
    if (unit > tol) throw InputError("matrix is not unitary within tolerance");
    return commutator_norm_with_hamiltonian(u, layout) <= tol;
}

// ---------------------------------------------------------------- information

double von_neumann_entropy(const Mat& m) {
    Eigen::VectorXd w = linalg::eigvalsh(m);
    double s = 0.0;
    for (Index i = 0; i < w.size(); ++i)
        if (w(i) > 1e-15) s -= w(i) * std::log(w(i));
    return s;
}

double mutual_information(const DensityMatrix& rho, const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
    std::vector<std::string> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    return von_neumann_entropy(partial_trace(rho, a).matrix()) + von_neumann_entropy(partial_trace(rho, b).matrix()) -
           von_neumann_entropy(partial_trace(rho, ab).matrix());
}

double fidelity_with_pure(const DensityMatrix& rho, const Vec& psi) {
    Vec v = psi / psi.norm();
    return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

double product_residual(const DensityMatrix& rho, const std::vector<std::string>& a) {
    std::vector<std::string> rest;
    for (const auto& l : rho.layout().labels())
        if (std::find(a.begin(), a.end(), l) == a.end()) rest.push_back(l);
    if (rest.empty()) return 0.0;
    DensityMatrix ra = partial_trace(rho, a);
    DensityMatrix rb = partial_trace(rho, rest);
    DensityMatrix prod = tensor(ra, rb);
    // Bring the product back into the original subsystem order.
    std::vector<std::size_t> order;
    for (const auto& l : rho.layout().labels()) order.push_back(prod.layout().index_of(l));
    return trace_distance(permute(prod, order).matrix(), rho.matrix());
}

Mat random_density(Index d, int rank, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(d, rank);
    for (Index i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = cd(g(rng), g(rng));
    Mat r = a * a.adjoint();
    return r / r.trace().real();
}

Mat random_unitary(Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) a(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < d; ++j) {
        cd ph = r(j, j) / std::abs(r(j, j));
        q.col(j) *= ph;
    }
    return q;
}

Index dimension_cap() {
    if (const char* env = std::getenv("QCAT_DIM_CAP")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<Index>(v);
        throw InputError("QCAT_DIM_CAP must be a positive integer");
    }
    return 4096;
}

}  // namespace qcat
