#include "schottky/poincare.hpp"

#include <cmath>
#include <limits>

namespace schottky {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compensated matrix accumulator; thousands of terms feed each series.
struct KahanMat {
    Mat sum, comp;
    void init(int rows, int cols) {
        sum = Mat::Zero(rows, cols);
        comp = sum;
    }
    void add(const Mat& term) {
        const Mat y = term - comp;
        const Mat t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Geometric tail estimation from measured length-shell norms.
struct TailTracker {
    std::vector<double> norms;
    double ratio = 0.0;
    double tail = kInf;

    void push(double h) {
        norms.push_back(h);
        const std::size_t p = norms.size() - 1;
        if (p == 0) return;
        double r = 0.0;
        bool any = false;
        const std::size_t first = (p > 2) ? p - 2 : 1;
        for (std::size_t k = first; k <= p; ++k) {
            if (norms[k - 1] > 1e-300) {
                r = std::max(r, norms[k] / norms[k - 1]);
                any = true;
            } else if (norms[k] > 1e-300) {
                r = std::max(r, 1.0);
                any = true;
            }
        }
        if (!any) {  // identically vanishing series
            ratio = 0.0;
            tail = 0.0;
            return;
        }
        ratio = r;
        tail = (ratio < 1.0) ? norms[p] * ratio / (1.0 - ratio) : kInf;
    }

    bool converged(double target) const { return tail <= target; }
};

}  // namespace

PoincareEngine::PoincareEngine(AlgebraSpec spec, SchottkyData s, PhasePoint p,
                               TruncationPolicy t)
    : spec_(std::move(spec)), s_(std::move(s)), p_(std::move(p)), t_(t) {
    check_phase_point(spec_, p_);
    if (p_.factors() != s_.genus())
        throw IndexOutOfRange("phase point and Schottky data disagree on genus");
    kappa_ = contraction_factor(p_, s_);
    near_pole_scale_ = kInf;
    for (const auto& c : s_.all_circles())
        near_pole_scale_ = std::min(near_pole_scale_, c.radius);
    for (int i = 0; i < s_.genus(); ++i) poles_.push_back(s_.pole(i));

    const int n = spec_.n;
    shells_.push_back({Entry{Word{}, MoebiusMap::identity(), Mat::Identity(n, n),
                             Mat::Identity(n, n)}});
    jet_ops_.emplace_back();
    r2_cache_.emplace_back();
}

void PoincareEngine::require_convergent() const {
    if (kappa_ >= 1.0)
        throw ConvergenceCriterionViolated(
            "contraction factor κ = " + std::to_string(kappa_) + " is not < 1");
}

void PoincareEngine::ensure_shells(int length) const {
    const int l = s_.genus();
    if (reduced_word_count(l, length) > t_.capacity)
        throw CapacityExceeded("word enumeration exceeds policy capacity");
    std::vector<MoebiusMap> gen(l), gen_inv(l);
    std::vector<Mat> gmat(l), gmat_inv(l);
    for (int i = 0; i < l; ++i) {
        gen[i] = s_.pairs[i].gamma;
        gen_inv[i] = gen[i].inverse();
        gmat[i] = p_.g[i];
        gmat_inv[i] = inverse_of(p_.g[i]);
    }
    while (static_cast<int>(shells_.size()) <= length) {
        const auto& prev = shells_.back();
        std::vector<Entry> next;
        next.reserve(prev.size() * (2 * l));
        for (const auto& e : prev) {
            for (int g = 0; g < l; ++g) {
                for (int sign : {+1, -1}) {
                    if (!e.word.empty()) {
                        const Letter& last = e.word.letters().back();
                        if (last.gen == g && last.sign == -sign) continue;
                    }
                    Entry ne;
                    ne.word = e.word.extended({g, sign});
                    ne.map = compose(e.map, sign > 0 ? gen[g] : gen_inv[g]);
                    ne.hol = e.hol * (sign > 0 ? gmat[g] : gmat_inv[g]);
                    ne.hol_inv = (sign > 0 ? gmat_inv[g] : gmat[g]) * e.hol_inv;
                    next.push_back(std::move(ne));
                }
            }
        }
        shells_.push_back(std::move(next));
        jet_ops_.emplace_back();
        r2_cache_.emplace_back();
    }
}

complex PoincareEngine::weight_checked(const MoebiusMap& map, int i, complex z) const {
    const ExtComplex gz = map.apply(z);
    if (gz.infinite) throw NearPole("γ(z) at infinity");
    const complex den = gz.value - poles_[i];
    if (std::abs(den) < 1e-8 * near_pole_scale_)
        throw NearPole("kernel denominator below threshold");
    complex deriv;
    try {
        deriv = map.derivative(z);
    } catch (const PoleAtZ& e) {
        throw NearPole(e.what());
    }
    return deriv / den;
}

complex PoincareEngine::kernel_weight(const Word& w, int i, complex z) const {
    if (i < 0 || i >= s_.genus()) throw IndexOutOfRange("kernel index out of range");
    return weight_checked(word_to_map(w, s_), i, z);
}

MatSeries PoincareEngine::xi(complex z) const {
    require_convergent();
    const int n = spec_.n;
    const int l = s_.genus();
    KahanMat acc;
    acc.init(n, n);
    TailTracker tracker;
    MatSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(n, n);
        for (const auto& e : shells_[p]) {
            for (int i = 0; i < l; ++i)
                shell += weight_checked(e.map, i, z) * (e.hol_inv * p_.xi[i] * e.hol);
        }
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = acc.sum;
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("ξ series tail " + std::to_string(out.tail_estimate) +
                         " above target at max word length");
    return out;
}

MatSeries PoincareEngine::poincare_kernel(complex z, int i, const Mat& x) const {
    require_convergent();
    if (i < 0 || i >= s_.genus()) throw IndexOutOfRange("kernel index out of range");
    const int n = spec_.n;
    KahanMat acc;
    acc.init(n, n);
    TailTracker tracker;
    MatSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(n, n);
        for (const auto& e : shells_[p])
            shell += weight_checked(e.map, i, z) * (e.hol_inv * x * e.hol);
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = acc.sum;
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("kernel series tail above target at max word length");
    return out;
}

MatSeries PoincareEngine::xi_derivative_xi(complex z, int i, int basis_index) const {
    if (i < 0 || i >= s_.genus()) throw IndexOutOfRange("factor index beyond genus");
    if (basis_index < 0 || basis_index >= spec_.dim())
        throw IndexOutOfRange("basis index out of range");
    return poincare_kernel(z, i, spec_.basis[basis_index]);
}

MatSeries PoincareEngine::xi_derivative_g(complex z, int j, const Mat& x) const {
    require_convergent();
    if (j < 0 || j >= s_.genus()) throw IndexOutOfRange("factor index beyond genus");
    const int n = spec_.n;
    const int l = s_.genus();
    KahanMat acc;
    acc.init(n, n);
    TailTracker tracker;
    MatSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(n, n);
        for (const auto& e : shells_[p]) {
            const auto pairs = holonomy_derivative_pairs(e.word, p_, j);
            if (pairs.empty()) continue;
            Mat mixed = Mat::Zero(n, n);
            for (int i = 0; i < l; ++i)
                mixed += weight_checked(e.map, i, z) * p_.xi[i];
            Mat delta = Mat::Zero(n, n);
            for (const auto& pr : pairs) delta += pr.left * x * pr.right;
            shell += -e.hol_inv * delta * e.hol_inv * mixed * e.hol +
                     e.hol_inv * mixed * delta;
        }
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = acc.sum;
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("ξ g-derivative series tail above target");
    return out;
}

XiJet PoincareEngine::jet(complex z) const {
    require_convergent();
    const int n = spec_.n;
    const int l = s_.genus();
    KahanMat value;
    value.init(n, n);
    std::vector<KahanMat> xi_op(l), g_op(l);
    for (int i = 0; i < l; ++i) {
        xi_op[i].init(n * n, n * n);
        g_op[i].init(n * n, n * n);
    }
    TailTracker tracker;
    XiJet out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        // Per-word z-independent operators, built once and reused across nodes.
        if (jet_ops_[p].empty()) {
            jet_ops_[p].resize(shells_[p].size());
            for (std::size_t k = 0; k < shells_[p].size(); ++k) {
                const auto& e = shells_[p][k];
                auto& slots = jet_ops_[p][k];
                slots.assign(l, std::vector<Mat>(l, Mat::Zero(n * n, n * n)));
                for (int j = 0; j < l; ++j) {
                    const auto pairs = holonomy_derivative_pairs(e.word, p_, j);
                    if (pairs.empty()) continue;
                    for (int i = 0; i < l; ++i) {
                        Mat op = Mat::Zero(n * n, n * n);
                        for (const auto& pr : pairs) {
                            op -= left_right_op(e.hol_inv * pr.left,
                                                pr.right * e.hol_inv * p_.xi[i] * e.hol);
                            op += left_right_op(e.hol_inv * p_.xi[i] * pr.left, pr.right);
                        }
                        slots[i][j] = std::move(op);
                    }
                }
            }
        }
        Mat shell_value = Mat::Zero(n, n);
        std::vector<Mat> shell_xi(l, Mat::Zero(n * n, n * n));
        std::vector<Mat> shell_g(l, Mat::Zero(n * n, n * n));
        for (std::size_t k = 0; k < shells_[p].size(); ++k) {
            const auto& e = shells_[p][k];
            const Mat ad_inv = left_right_op(e.hol_inv, e.hol);
            for (int i = 0; i < l; ++i) {
                const complex wgt = weight_checked(e.map, i, z);
                shell_value += wgt * (e.hol_inv * p_.xi[i] * e.hol);
                shell_xi[i] += wgt * ad_inv;
                for (int j = 0; j < l; ++j) {
                    const Mat& op = jet_ops_[p][k][i][j];
                    if (op.size() != 0) shell_g[j] += wgt * op;
                }
            }
        }
        value.add(shell_value);
        double norm_sq = shell_value.squaredNorm();
        for (int i = 0; i < l; ++i) {
            xi_op[i].add(shell_xi[i]);
            g_op[i].add(shell_g[i]);
            norm_sq += shell_xi[i].squaredNorm() + shell_g[i].squaredNorm();
        }
        tracker.push(std::sqrt(norm_sq));
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = value.sum;
    for (int i = 0; i < l; ++i) {
        out.xi_op.push_back(xi_op[i].sum);
        out.g_op.push_back(g_op[i].sum);
    }
    out.tail_estimate = tracker.tail;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("ξ jet tail above target at max word length");
    return out;
}

TensorSeries PoincareEngine::r_matrix(complex z, complex w) const {
    require_convergent();
    const int n = spec_.n;
    const Mat p_op = casimir(spec_).op;
    const Mat id = Mat::Identity(n, n);
    KahanMat acc;
    acc.init(n * n, n * n);
    TailTracker tracker;
    TensorSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        if (r2_cache_[p].empty()) {
            r2_cache_[p].reserve(shells_[p].size());
            for (const auto& e : shells_[p])
                r2_cache_[p].push_back(kron(id, e.hol) * p_op * kron(id, e.hol_inv));
        }
        Mat shell = Mat::Zero(n * n, n * n);
        for (std::size_t k = 0; k < shells_[p].size(); ++k) {
            const auto& e = shells_[p][k];
            const ExtComplex gz = e.map.apply(z);
            if (gz.infinite) throw NearPole("γ(z) at infinity in r-matrix");
            const complex den = gz.value - w;
            if (std::abs(den) < 1e-8 * near_pole_scale_)
                throw NearPole("r-matrix denominator γ(z) − w below threshold");
            shell += (e.map.derivative(z) / den) * r2_cache_[p][k];
        }
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = TensorElement{n, acc.sum};
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("r-matrix series tail above target");
    return out;
}

TensorSeries PoincareEngine::s_matrix(complex z, complex w) const {
    require_convergent();
    const int n = spec_.n;
    const Mat p_op = casimir(spec_).op;
    const Mat id = Mat::Identity(n, n);
    KahanMat acc;
    acc.init(n * n, n * n);
    TailTracker tracker;
    TensorSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(n * n, n * n);
        for (const auto& e : shells_[p]) {
            const ExtComplex gw = e.map.apply(w);
            if (gw.infinite) throw NearPole("γ(w) at infinity in s-matrix");
            const complex den = z - gw.value;
            if (std::abs(den) < 1e-8 * near_pole_scale_)
                throw NearPole("s-matrix denominator z − γ(w) below threshold");
            shell += (e.map.derivative(w) / den) *
                     (kron(e.hol, id) * p_op * kron(e.hol_inv, id));
        }
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = TensorElement{n, acc.sum};
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("s-matrix series tail above target");
    return out;
}

TensorSeries PoincareEngine::r_derivative_g(complex z, complex w, int j,
                                            const Mat& x) const {
    require_convergent();
    if (j < 0 || j >= s_.genus()) throw IndexOutOfRange("factor index beyond genus");
    const int n = spec_.n;
    const Mat p_op = casimir(spec_).op;
    const Mat id = Mat::Identity(n, n);
    KahanMat acc;
    acc.init(n * n, n * n);
    TailTracker tracker;
    TensorSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(n * n, n * n);
        for (const auto& e : shells_[p]) {
            const auto pairs = holonomy_derivative_pairs(e.word, p_, j);
            if (pairs.empty()) continue;
            Mat delta = Mat::Zero(n, n);
            for (const auto& pr : pairs) delta += pr.left * x * pr.right;
            const ExtComplex gz = e.map.apply(z);
            if (gz.infinite) throw NearPole("γ(z) at infinity in r-matrix derivative");
            const complex den = gz.value - w;
            if (std::abs(den) < 1e-8 * near_pole_scale_)
                throw NearPole("r-matrix derivative denominator below threshold");
            const complex wgt = e.map.derivative(z) / den;
            shell += wgt * (kron(id, delta) * p_op * kron(id, e.hol_inv) -
                            kron(id, e.hol) * p_op *
                                kron(id, e.hol_inv * delta * e.hol_inv));
        }
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = TensorElement{n, acc.sum};
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("r-matrix g-derivative series tail above target");
    return out;
}

MatSeries PoincareEngine::xi_based_at(complex z, complex z0) const {
    require_convergent();
    const int n = spec_.n;
    const int l = s_.genus();
    std::vector<complex> shifted_pole(l);
    for (int i = 0; i < l; ++i)
        shifted_pole[i] = s_.pairs[i].gamma.inverse().apply(z0).finite();
    KahanMat acc;
    acc.init(n, n);
    TailTracker tracker;
    MatSeries out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(n, n);
        for (const auto& e : shells_[p]) {
            const ExtComplex gz = e.map.apply(z);
            if (gz.infinite) throw NearPole("γ(z) at infinity in based series");
            const complex deriv = e.map.derivative(z);
            const complex den0 = gz.value - z0;
            if (std::abs(den0) < 1e-8 * near_pole_scale_)
                throw NearPole("based series denominator γ(z) − z0 below threshold");
            for (int i = 0; i < l; ++i) {
                const complex den_i = gz.value - shifted_pole[i];
                if (std::abs(den_i) < 1e-8 * near_pole_scale_)
                    throw NearPole("based series denominator below threshold");
                shell += deriv * (1.0 / den_i - 1.0 / den0) *
                         (e.hol_inv * p_.xi[i] * e.hol);
            }
        }
        acc.add(shell);
        tracker.push(shell.norm());
        out.shells_used = p + 1;
        if (p >= 1 && tracker.converged(t_.target_tail)) break;
    }
    out.value = acc.sum;
    out.tail_estimate = tracker.tail;
    out.measured_ratio = tracker.ratio;
    if (out.tail_estimate > t_.target_tail && !t_.allow_partial)
        throw TailNotMet("basepoint series tail above target");
    return out;
}

Mat PoincareEngine::residue_at_circle(int i, const std::function<Mat(complex)>& f,
                                      double tol, int start_nodes, int max_nodes) const {
    if (i < 0 || i >= s_.genus()) throw IndexOutOfRange("circle index beyond genus");
    ContourSpec spec{s_.pairs[i].inner, start_nodes};
    try {
        return contour_integral_adaptive(spec, f, tol, max_nodes).value;
    } catch (const NotConverged& e) {
        throw NotConverged(std::string("residue quadrature: ") + e.what());
    }
}

std::vector<double> PoincareEngine::shell_norms(complex z) const {
    require_convergent();
    const int l = s_.genus();
    std::vector<double> out;
    for (int p = 0; p <= t_.max_word_length; ++p) {
        ensure_shells(p);
        Mat shell = Mat::Zero(spec_.n, spec_.n);
        for (const auto& e : shells_[p])
            for (int i = 0; i < l; ++i)
                shell += weight_checked(e.map, i, z) * (e.hol_inv * p_.xi[i] * e.hol);
        out.push_back(shell.norm());
    }
    return out;
}

}  // namespace schottky
