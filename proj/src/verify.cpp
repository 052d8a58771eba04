#include "schottky/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "schottky/config.hpp"

namespace schottky {

namespace {

class Stopwatch {
  public:
    double ms() const {
        using namespace std::chrono;
        return duration<double, std::milli>(steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Gradient matrix of the entry map η -> (unvec(op vec η))_{ab}:
// tr(M η) = Σ_{cd} op(a + b n, c + d n) η_{cd}.
Mat entry_grad(const Mat& op, int a, int b, int n) {
    Mat m(n, n);
    for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) m(d, c) = op(a + b * n, c + d * n);
    return m;
}

// Gradient matrix of η -> tr(A · unvec(op vec η)).
Mat traced_grad(const Mat& op, const Mat& A) {
    const int n = static_cast<int>(A.rows());
    const CVec v = op.transpose() * vec(Mat(A.transpose()));
    return unvec(v, n, n).transpose();
}

// Per-entry gradients of ξ(z) w.r.t. every factor, built once per jet.
struct GradTable {
    Mat value;
    int n = 0, l = 0;
    std::vector<Mat> g, xi;  // index (a*n + b)*l + m

    const Mat& g_at(int a, int b, int m) const { return g[(a * n + b) * l + m]; }
    const Mat& xi_at(int a, int b, int m) const { return xi[(a * n + b) * l + m]; }
};

GradTable build_grad_table(const AlgebraSpec& spec, const XiJet& jet) {
    GradTable t;
    t.value = jet.value;
    t.n = static_cast<int>(jet.value.rows());
    t.l = static_cast<int>(jet.xi_op.size());
    t.g.reserve(t.n * t.n * t.l);
    t.xi.reserve(t.n * t.n * t.l);
    for (int a = 0; a < t.n; ++a)
        for (int b = 0; b < t.n; ++b)
            for (int m = 0; m < t.l; ++m) {
                t.g.push_back(entry_grad(jet.g_op[m], a, b, t.n));
                t.xi.push_back(spec.project(entry_grad(jet.xi_op[m], a, b, t.n)));
            }
    return t;
}

TensorElement bracket_from_tables(const PhasePoint& p, const GradTable& fz,
                                  const GradTable& hw) {
    const int n = fz.n, l = fz.l;
    TensorElement out = TensorElement::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int q = 0; q < n; ++q) {
                    complex acc = 0.0;
                    for (int m = 0; m < l; ++m) {
                        const Mat& fg = fz.g_at(i, j, m);
                        const Mat& fx = fz.xi_at(i, j, m);
                        const Mat& hg = hw.g_at(k, q, m);
                        const Mat& hx = hw.xi_at(k, q, m);
                        acc += (fg * hx).trace() - (fx * hg).trace() -
                               (p.xi[m] * commutator(fx, hx)).trace();
                    }
                    out.op(i * n + k, j * n + q) = acc;
                }
    return out;
}

TensorElement defect_from_parts(const TensorElement& A, const TensorElement& r,
                                const TensorElement& s, const Mat& xi_z,
                                const Mat& xi_w) {
    return A - tensor_commutator(r, xi_w, 2) - tensor_commutator(s, xi_z, 1);
}

// t acting in slots (sa, sb) of C^n ⊗ C^n ⊗ C^n, identity elsewhere.
Mat embed_pair3(const TensorElement& t, int sa, int sb) {
    const int n = t.n;
    Mat out = Mat::Zero(n * n * n, n * n * n);
    Mat eij = Mat::Zero(n, n), ekl = Mat::Zero(n, n);
    const Mat id = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            eij(i, j) = 1.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const complex c = t.coeff(i, j, k, l);
                    if (c == complex{}) {
                        continue;
                    }
                    ekl(k, l) = 1.0;
                    const Mat* slot[3] = {&id, &id, &id};
                    slot[sa] = &eij;
                    slot[sb] = &ekl;
                    out += c * kron(kron(*slot[0], *slot[1]), *slot[2]);
                    ekl(k, l) = 0.0;
                }
            eij(i, j) = 0.0;
        }
    return out;
}

Mat embed_single3(const Mat& x, int s) {
    const int n = static_cast<int>(x.rows());
    const Mat id = Mat::Identity(n, n);
    const Mat* slot[3] = {&id, &id, &id};
    slot[s] = &x;
    return kron(kron(*slot[0], *slot[1]), *slot[2]);
}

PhasePoint with_g_step(const PhasePoint& p, int j, const Mat& x, double h) {
    PhasePoint q = p;
    q.g[j] = q.g[j] * (h * x).exp();
    return q;
}

PhasePoint with_xi_step(const PhasePoint& p, int i, const Mat& x, double h) {
    PhasePoint q = p;
    q.xi[i] = q.xi[i] + h * x;
    return q;
}

}  // namespace

nlohmann::json report_to_json(const CheckReport& r) {
    nlohmann::json samples = nlohmann::json::array();
    for (const complex s : r.samples) samples.push_back({s.real(), s.imag()});
    return {{"checkName", r.check_name}, {"residual", r.residual},
            {"tolerance", r.tolerance}, {"tailBudget", r.tail_budget},
            {"samples", samples},       {"pass", r.pass},
            {"runtimeMs", r.runtime_ms}};
}

Observable xi_entry_observable(const AlgebraSpec& spec, const SchottkyData& s,
                               const TruncationPolicy& t, complex z, int row, int col) {
    Observable o;
    o.eval = [=](const PhasePoint& p) {
        return PoincareEngine(spec, s, p, t).xi(z).value(row, col);
    };
    o.g_grads = [=](const PhasePoint& p) {
        const XiJet jet = PoincareEngine(spec, s, p, t).jet(z);
        std::vector<Mat> out;
        for (const Mat& op : jet.g_op) out.push_back(entry_grad(op, row, col, spec.n));
        return out;
    };
    o.xi_grads = [=](const PhasePoint& p) {
        const XiJet jet = PoincareEngine(spec, s, p, t).jet(z);
        std::vector<Mat> out;
        for (const Mat& op : jet.xi_op) out.push_back(entry_grad(op, row, col, spec.n));
        return out;
    };
    return o;
}

Observable spectral_observable(const AlgebraSpec& spec, const SchottkyData& s,
                               const TruncationPolicy& t, complex z, int power) {
    auto matrix_power = [power](const Mat& m) {
        Mat acc = Mat::Identity(m.rows(), m.cols());
        for (int k = 0; k < power; ++k) acc = acc * m;
        return acc;
    };
    Observable o;
    o.eval = [=](const PhasePoint& p) {
        return matrix_power(PoincareEngine(spec, s, p, t).xi(z).value).trace();
    };
    auto grads = [=](const PhasePoint& p, bool wrt_g) {
        const XiJet jet = PoincareEngine(spec, s, p, t).jet(z);
        Mat pre = Mat::Identity(spec.n, spec.n);
        for (int k = 0; k < power - 1; ++k) pre = pre * jet.value;
        pre *= static_cast<double>(power);  // d tr ξ^k = k tr(ξ^{k-1} dξ)
        std::vector<Mat> out;
        const auto& ops = wrt_g ? jet.g_op : jet.xi_op;
        for (const Mat& op : ops) out.push_back(traced_grad(op, pre));
        return out;
    };
    o.g_grads = [=](const PhasePoint& p) { return grads(p, true); };
    o.xi_grads = [=](const PhasePoint& p) { return grads(p, false); };
    return o;
}

complex spectral_invariant(const PoincareEngine& eng, complex z, int power) {
    const Mat xi = eng.xi(z).value;
    Mat acc = Mat::Identity(xi.rows(), xi.cols());
    for (int k = 0; k < power; ++k) acc = acc * xi;
    return acc.trace();
}

TensorElement xi_xi_bracket(const AlgebraSpec& spec, const PhasePoint& p,
                            const XiJet& jz, const XiJet& jw) {
    return bracket_from_tables(p, build_grad_table(spec, jz), build_grad_table(spec, jw));
}

TensorElement bracket_defect(const PoincareEngine& eng, complex z, complex w) {
    const XiJet jz = eng.jet(z), jw = eng.jet(w);
    const TensorElement A = xi_xi_bracket(eng.algebra(), eng.phase(), jz, jw);
    return defect_from_parts(A, eng.r_matrix(z, w).value, eng.s_matrix(z, w).value,
                             jz.value, jw.value);
}

CheckReport check_convergence(const PoincareEngine& eng, int sample_count,
                              std::uint64_t seed, double ratio_slack) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "lemma1-convergence";
    rep.tolerance = 1.0;  // residual is normalized: max(tail/target, ratio/(κ+slack))
    const double target = eng.policy().target_tail;
    const double ratio_bound = eng.kappa() + ratio_slack;
    double worst = 0.0;
    for (const complex z : fundamental_domain_samples(eng.schottky(), sample_count, seed)) {
        const auto shells = eng.shell_norms(z);
        // Geometric-fit decay rate from shell 2 on; successive ratios carry a
        // transient near the circles that the asymptotic rate does not.
        const std::size_t last = shells.size() - 1, first = std::min<std::size_t>(2, last);
        double ratio = 1.0;
        if (last > first && shells[first] > 0.0)
            ratio = std::pow(shells[last] / shells[first],
                             1.0 / static_cast<double>(last - first));
        const double tail =
            ratio < 1.0 ? shells.back() * ratio / (1.0 - ratio) : shells.back();
        worst = std::max(worst, std::max(tail / target, ratio / ratio_bound));
        rep.samples.push_back(z);
    }
    rep.residual = worst;
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_twist(const PoincareEngine& eng, int sample_count, double tolerance) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "twist-equivariance";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const auto& s = eng.schottky();
    const auto& p = eng.phase();
    // Sample points sit on the circles and their images at orbit depth up to
    // two, where the series needs a few extra shells beyond the policy cutoff;
    // run the check on a deeper engine and charge its measured tail to the
    // budget instead of failing the tail gate.
    TruncationPolicy deep = eng.policy();
    deep.max_word_length += 3;
    deep.allow_partial = true;
    const PoincareEngine deep_eng(eng.algebra(), s, p, deep);
    double worst = 0.0;
    for (int i = 0; i < s.genus(); ++i) {
        const auto& pair = s.pairs[i];
        for (int k = 0; k < sample_count; ++k) {
            const complex z = pair.inner.point(2.0 * M_PI * k / sample_count + 0.3);
            const complex gz = pair.gamma.apply(z).finite();
            const MatSeries img = deep_eng.xi(gz);
            const Mat lhs = img.value * pair.gamma.derivative(z);
            const Mat rhs = adjoint(p.g[i], deep_eng.xi(z).value);
            worst = std::max(worst, (lhs - rhs).norm());
            rep.tail_budget = std::max(rep.tail_budget, img.tail_estimate);
            if (k == 0) rep.samples.push_back(z);
        }
    }
    // One composite word through the holonomy homomorphism.
    const int second = s.genus() > 1 ? 1 : 0;
    const Word w({Letter{0, 1}, Letter{second, 1}});
    const MoebiusMap map = word_to_map(w, s);
    const Mat gw = holonomy(w, p);
    for (int k = 0; k < 3; ++k) {
        const complex z = s.pairs[second].inner.point(2.0 * M_PI * k / 3.0 + 0.45);
        const complex wz = map.apply(z).finite();
        const MatSeries lhs = deep_eng.xi(wz);
        const Mat rhs = adjoint(gw, deep_eng.xi(z).value);
        worst = std::max(worst, (lhs.value * map.derivative(z) - rhs).norm());
        rep.tail_budget = std::max(rep.tail_budget, lhs.tail_estimate);
    }
    rep.residual = worst;
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_pairing(const PoincareEngine& eng, double tolerance, int max_nodes) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "residue-pairing";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const auto f = [&](complex z) { return eng.xi(z).value; };
    double worst = 0.0;
    for (int i = 0; i < eng.schottky().genus(); ++i) {
        const Mat res = eng.residue_at_circle(i, f, 0.1 * tolerance, 256, max_nodes);
        worst = std::max(worst, (res - eng.phase().xi[i]).norm());
    }
    rep.residual = worst;
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_antisymmetry(const PoincareEngine& eng, int pair_count,
                               std::uint64_t seed, double tolerance) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "rs-antisymmetry";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const auto pts = fundamental_domain_samples(eng.schottky(), 2 * pair_count, seed);
    double worst = 0.0;
    for (int k = 0; k < pair_count; ++k) {
        const complex z = pts[2 * k], w = pts[2 * k + 1];
        const TensorElement lhs = eng.s_matrix(z, w).value;
        const TensorElement rhs = tensor_swap(eng.r_matrix(w, z).value);
        worst = std::max(worst, (lhs + rhs).norm());
        rep.samples.push_back(z);
        rep.samples.push_back(w);
    }
    rep.residual = worst;
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_rmatrix(const PoincareEngine& eng, int pair_count, std::uint64_t seed,
                          double tolerance) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "bracket-defect";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const auto pts = fundamental_domain_samples(eng.schottky(), 2 * pair_count, seed);
    double worst = 0.0;
    for (int k = 0; k < pair_count; ++k) {
        const complex z = pts[2 * k], w = pts[2 * k + 1];
        worst = std::max(worst, bracket_defect(eng, z, w).norm());
        rep.samples.push_back(z);
        rep.samples.push_back(w);
    }
    rep.residual = worst;
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

Lemma3Result check_lemma3_contours(const PoincareEngine& eng, double epsilon,
                                   double tolerance, double intermediate_tolerance,
                                   int nodes) {
    Stopwatch sw;
    const auto& s = eng.schottky();
    const AlgebraSpec& spec = eng.algebra();
    const TensorElement P = casimir(spec);
    const int l = s.genus(), n = spec.n;

    Lemma3Result out;
    out.report.check_name = "lemma3-contours";
    out.report.tolerance = tolerance;

    double worst_c = 0.0, worst_mid = 0.0, worst_quad = 0.0;
    for (int i = 0; i < l; ++i) {
        const Circle ci = s.pairs[i].inner;
        for (int j = 0; j < l; ++j) {
            const Circle cj = (i == j) ? deformed_circle(s.pairs[j].inner, epsilon, s)
                                       : s.pairs[j].inner;
            std::vector<complex> zs(nodes), ws(nodes), dz(nodes), dw(nodes);
            std::vector<GradTable> gz(nodes), gw(nodes);
            for (int k = 0; k < nodes; ++k) {
                const double a = 2.0 * M_PI * k / nodes;
                zs[k] = ci.point(a);
                ws[k] = cj.point(a + M_PI / nodes);  // stagger the grids
                dz[k] = (zs[k] - ci.center) / static_cast<double>(nodes);
                dw[k] = (ws[k] - cj.center) / static_cast<double>(nodes);
                gz[k] = build_grad_table(spec, eng.jet(zs[k]));
                gw[k] = build_grad_table(spec, eng.jet(ws[k]));
            }
            TensorElement c_full = TensorElement::zero(n), c_half = TensorElement::zero(n);
            TensorElement a_int = TensorElement::zero(n), b_int = TensorElement::zero(n);
            for (int k = 0; k < nodes; ++k)
                for (int m = 0; m < nodes; ++m) {
                    const TensorElement A =
                        bracket_from_tables(eng.phase(), gz[k], gw[m]);
                    const TensorElement R = eng.r_matrix(zs[k], ws[m]).value;
                    const TensorElement S = eng.s_matrix(zs[k], ws[m]).value;
                    const TensorElement B = tensor_commutator(R, gw[m].value, 2) +
                                            tensor_commutator(S, gz[k].value, 1);
                    const complex wgt = dz[k] * dw[m];
                    c_full += wgt * (A - B);
                    a_int += wgt * A;
                    b_int += wgt * B;
                    if (k % 2 == 0 && m % 2 == 0) c_half += (4.0 * wgt) * (A - B);
                }
            worst_c = std::max(worst_c, c_full.norm());
            worst_quad = std::max(worst_quad, (c_full - c_half).norm());
            // ∮∮A = {ξ_i^{(1)}, ξ_j^{(2)}} = −δ_ij[P, ξ_i^{(1)}] with the
            // Jacobi-consistent sign of the ξ-term.
            const TensorElement expected =
                (i == j) ? -1.0 * tensor_commutator(P, eng.phase().xi[i], 1)
                         : TensorElement::zero(n);
            worst_mid = std::max(worst_mid, (a_int - expected).norm());
            worst_mid = std::max(worst_mid, (b_int - expected).norm());
        }
    }
    out.report.residual = worst_c;
    out.report.tail_budget = worst_quad;
    out.report.finalize();
    out.intermediate_residual = worst_mid;
    if (worst_mid > intermediate_tolerance) out.report.pass = false;
    out.report.runtime_ms = sw.ms();
    return out;
}

CheckReport check_involution(const PoincareEngine& eng, complex z, complex w, int k,
                             int m, double tolerance, double fd_step) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "spectral-involution";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const Observable F = spectral_observable(eng.algebra(), eng.schottky(), eng.policy(),
                                             z, k);
    const Observable H = spectral_observable(eng.algebra(), eng.schottky(), eng.policy(),
                                             w, m);
    const complex pb = poisson_bracket(eng.algebra(), F, H, eng.phase());
    const complex pb_fd = poisson_bracket_fd(eng.algebra(), F, H, eng.phase(), fd_step);
    rep.residual = std::abs(pb);
    rep.samples = {pb, pb_fd};
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

CheckReport check_dybe(const PoincareEngine& eng, complex z2, complex z3, complex z_aux,
                       double tolerance) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "dybe";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const complex z1 = z_aux;
    const AlgebraSpec& spec = eng.algebra();
    // Slots: z1 -> 0, z2 -> 1, z3 -> 2; r^{jk} = r(z_j, z_k) in factors (j, k).
    // Collecting the coefficient of ξ^{(3)} in the cyclic Jacobi sum of the
    // exchange relation gives
    //   [r^{23}, r^{13}] + [r^{21}, r^{13}] - [r^{12}, r^{23}]
    //     - Σ k_i(z1; e^a)^{(1)} ∂_{e_a^{(i)}} r^{23}
    //     + Σ k_i(z2; e^a)^{(2)} ∂_{e_a^{(i)}} r^{13} = 0.
    const Mat r23 = embed_pair3(eng.r_matrix(z2, z3).value, 1, 2);
    const Mat r13 = embed_pair3(eng.r_matrix(z1, z3).value, 0, 2);
    const Mat r21 = embed_pair3(eng.r_matrix(z2, z1).value, 1, 0);
    const Mat r12 = embed_pair3(eng.r_matrix(z1, z2).value, 0, 1);
    Mat total = r23 * r13 - r13 * r23;
    total += r21 * r13 - r13 * r21;
    total -= r12 * r23 - r23 * r12;
    for (int i = 0; i < eng.schottky().genus(); ++i)
        for (int a = 0; a < spec.dim(); ++a) {
            const Mat k1 = eng.poincare_kernel(z1, i, spec.dual_basis[a]).value;
            total -= embed_single3(k1, 0) *
                     embed_pair3(eng.r_derivative_g(z2, z3, i, spec.basis[a]).value, 1, 2);
            const Mat k2 = eng.poincare_kernel(z2, i, spec.dual_basis[a]).value;
            total += embed_single3(k2, 1) *
                     embed_pair3(eng.r_derivative_g(z1, z3, i, spec.basis[a]).value, 0, 2);
        }
    rep.residual = total.norm();
    rep.samples = {z1, z2, z3};
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

double jacobi_residual(const AlgebraSpec& spec, const SchottkyData& s,
                       const TruncationPolicy& t, const PhasePoint& p, complex z1,
                       complex z2, complex z3, int probe_count, std::uint64_t seed,
                       double fd_step) {
    std::mt19937_64 rng(seed ^ 0x9acb1ULL);
    std::uniform_int_distribution<int> pick(0, spec.n - 1);
    double worst = 0.0;
    for (int probe = 0; probe < probe_count; ++probe) {
        int idx[3][2];
        for (auto& e : idx) {
            e[0] = pick(rng);
            e[1] = pick(rng);
        }
        const Observable F = xi_entry_observable(spec, s, t, z1, idx[0][0], idx[0][1]);
        const Observable G = xi_entry_observable(spec, s, t, z2, idx[1][0], idx[1][1]);
        const Observable H = xi_entry_observable(spec, s, t, z3, idx[2][0], idx[2][1]);
        // Inner brackets analytic, outer bracket by finite differences.
        auto inner = [&](const Observable& a, const Observable& b) {
            Observable o;
            o.eval = [&spec, a, b](const PhasePoint& q) {
                return poisson_bracket(spec, a, b, q);
            };
            return o;
        };
        const complex cyc =
            poisson_bracket_fd(spec, F, inner(G, H), p, fd_step) +
            poisson_bracket_fd(spec, H, inner(F, G), p, fd_step) +
            poisson_bracket_fd(spec, G, inner(H, F), p, fd_step);
        worst = std::max(worst, std::abs(cyc));
    }
    return worst;
}

CheckReport check_basepoint(const PoincareEngine& eng, complex z, complex z0a,
                            complex z0b, double tolerance) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "basepoint-independence";
    rep.tolerance = tolerance;
    rep.tail_budget = eng.policy().target_tail;
    const Mat a = eng.xi_based_at(z, z0a).value;
    const Mat b = eng.xi_based_at(z, z0b).value;
    rep.residual = (a - b).norm();
    rep.samples = {z, z0a, z0b};
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

double basepoint_derivative_residual(const PoincareEngine& eng, complex z, complex z0,
                                     double fd_step) {
    const auto& s = eng.schottky();
    const auto& p = eng.phase();
    const Mat mom = moment_map(p);
    Mat closed = Mat::Zero(mom.rows(), mom.cols());
    for (const Word& w :
         enumerate_words(s.genus(), eng.policy().max_word_length, eng.policy().capacity)) {
        const MoebiusMap inv = word_to_map(w, s).inverse();
        const complex iz0 = inv.apply(z0).finite();
        const Mat hol = holonomy(w, p);
        closed += adjoint(inverse_of(hol), mom) * (inv.derivative(z0) / ((z - iz0) * (z - iz0)));
    }
    const Mat fd = (eng.xi_based_at(z, z0 + fd_step).value -
                    eng.xi_based_at(z, z0 - fd_step).value) /
                   (2.0 * fd_step);
    return (closed - fd).norm() / std::max(1.0, closed.norm());
}

CheckReport check_oracles(const PoincareEngine& eng, int probe_count, std::uint64_t seed,
                          double tolerance) {
    Stopwatch sw;
    CheckReport rep;
    rep.check_name = "derivative-oracles";
    rep.tolerance = tolerance;
    const AlgebraSpec& spec = eng.algebra();
    const SchottkyData& s = eng.schottky();
    const PhasePoint& p = eng.phase();
    const TruncationPolicy& t = eng.policy();
    const int l = s.genus();

    std::mt19937_64 rng(seed ^ 0x0c0deULL);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    std::uniform_int_distribution<int> factor(0, l - 1);
    auto random_dir = [&] {
        Mat x(spec.n, spec.n);
        for (int r = 0; r < spec.n; ++r)
            for (int c = 0; c < spec.n; ++c) x(r, c) = complex{unif(rng), unif(rng)};
        return spec.project(x);
    };
    auto random_word = [&] {
        std::vector<Letter> letters;
        std::uniform_int_distribution<int> len(1, 3), sign(0, 1);
        const int target = len(rng);
        while (static_cast<int>(letters.size()) < target) {
            const Letter cand{factor(rng), sign(rng) ? 1 : -1};
            if (!letters.empty() && letters.back().gen == cand.gen &&
                letters.back().sign == -cand.sign)
                continue;
            letters.push_back(cand);
        }
        return Word(letters);
    };

    const auto pts = fundamental_domain_samples(s, probe_count + 1, seed ^ 0xfeedULL);
    const double h = 1e-5;
    double worst = 0.0;
    for (int probe = 0; probe < probe_count; ++probe) {
        const int j = factor(rng);
        const Mat x = random_dir();
        const complex z = pts[probe];
        const complex w = pts[probe + 1];

        const Word word = random_word();
        const Mat dh_an = holonomy_derivative(word, p, j, x);
        const Mat dh_fd = (holonomy(word, with_g_step(p, j, x, h)) -
                           holonomy(word, with_g_step(p, j, x, -h))) /
                          (2.0 * h);
        worst = std::max(worst, (dh_an - dh_fd).norm());

        const Mat dxg_an = eng.xi_derivative_g(z, j, x).value;
        const Mat dxg_fd =
            (PoincareEngine(spec, s, with_g_step(p, j, x, h), t).xi(z).value -
             PoincareEngine(spec, s, with_g_step(p, j, x, -h), t).xi(z).value) /
            (2.0 * h);
        worst = std::max(worst, (dxg_an - dxg_fd).norm());

        const int a = probe % spec.dim();
        const Mat dxx_an = eng.xi_derivative_xi(z, j, a).value;
        const Mat dxx_fd =
            (PoincareEngine(spec, s, with_xi_step(p, j, spec.basis[a], h), t).xi(z).value -
             PoincareEngine(spec, s, with_xi_step(p, j, spec.basis[a], -h), t).xi(z).value) /
            (2.0 * h);
        worst = std::max(worst, (dxx_an - dxx_fd).norm());

        const TensorElement dr_an = eng.r_derivative_g(z, w, j, x).value;
        const TensorElement dr_fd =
            (1.0 / (2.0 * h)) *
            (PoincareEngine(spec, s, with_g_step(p, j, x, h), t).r_matrix(z, w).value -
             PoincareEngine(spec, s, with_g_step(p, j, x, -h), t).r_matrix(z, w).value);
        worst = std::max(worst, (dr_an - dr_fd).norm());
    }
    rep.residual = worst;
    rep.finalize();
    rep.runtime_ms = sw.ms();
    return rep;
}

}  // namespace schottky
