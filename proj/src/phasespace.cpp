#include "schottky/phasespace.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace schottky {

void check_phase_point(const AlgebraSpec& spec, const PhasePoint& p) {
    if (p.g.size() != p.xi.size())
        throw IndexOutOfRange("phase point has mismatched g/xi lists");
    for (int i = 0; i < p.factors(); ++i) {
        if (p.g[i].rows() != spec.n || p.g[i].cols() != spec.n ||
            p.xi[i].rows() != spec.n || p.xi[i].cols() != spec.n)
            throw IndexOutOfRange("phase point matrix has wrong shape");
        Eigen::FullPivLU<Mat> lu(p.g[i]);
        if (!lu.isInvertible())
            throw SingularGroupElement("g_" + std::to_string(i + 1) + " not invertible");
        if (spec.kind == AlgebraKind::sl) {
            if (std::abs(lu.determinant() - complex{1.0}) > 1e-10)
                throw Error("NotUnimodular", "det(g_i) != 1 for sl algebra");
            if (std::abs(p.xi[i].trace()) > 1e-12)
                throw Error("NotTraceless", "tr(xi_i) != 0 for sl algebra");
        }
    }
}

Mat holonomy(const Word& w, const PhasePoint& p) {
    const int n = p.g.empty() ? 0 : static_cast<int>(p.g[0].rows());
    Mat out = Mat::Identity(n, n);
    for (const auto& letter : w.letters()) {
        if (letter.gen < 0 || letter.gen >= p.factors())
            throw IndexOutOfRange("word letter outside phase-point factors");
        if (letter.sign > 0)
            out = out * p.g[letter.gen];
        else
            out = out * inverse_of(p.g[letter.gen]);
    }
    return out;
}

std::vector<LeftRightPair> holonomy_derivative_pairs(const Word& w, const PhasePoint& p,
                                                     int j) {
    const int n = static_cast<int>(p.g[0].rows());
    const auto& letters = w.letters();
    const std::size_t len = letters.size();

    // prefix[k] = product of letters [0,k), suffix[k] = product of [k, len).
    std::vector<Mat> prefix(len + 1), suffix(len + 1);
    prefix[0] = Mat::Identity(n, n);
    suffix[len] = Mat::Identity(n, n);
    auto letter_mat = [&](const Letter& l) {
        return l.sign > 0 ? p.g[l.gen] : inverse_of(p.g[l.gen]).eval();
    };
    for (std::size_t k = 0; k < len; ++k)
        prefix[k + 1] = prefix[k] * letter_mat(letters[k]);
    for (std::size_t k = len; k-- > 0;)
        suffix[k] = letter_mat(letters[k]) * suffix[k + 1];

    std::vector<LeftRightPair> out;
    for (std::size_t k = 0; k < len; ++k) {
        if (letters[k].gen != j) continue;
        if (letters[k].sign > 0) {
            // d(g_j e^{tx}) = g_j x
            out.push_back({prefix[k] * p.g[j], suffix[k + 1]});
        } else {
            // d((g_j e^{tx})^{-1}) = -x g_j^{-1}
            out.push_back({-prefix[k], inverse_of(p.g[j]) * suffix[k + 1]});
        }
    }
    return out;
}

Mat holonomy_derivative(const Word& w, const PhasePoint& p, int j, const Mat& x) {
    const int n = static_cast<int>(p.g[0].rows());
    Mat out = Mat::Zero(n, n);
    for (const auto& pr : holonomy_derivative_pairs(w, p, j))
        out += pr.left * x * pr.right;
    return out;
}

Mat holonomy_derivative_op(const Word& w, const PhasePoint& p, int j) {
    const int n = static_cast<int>(p.g[0].rows());
    Mat op = Mat::Zero(n * n, n * n);
    for (const auto& pr : holonomy_derivative_pairs(w, p, j))
        op += left_right_op(pr.left, pr.right);
    return op;
}

complex poisson_bracket(const AlgebraSpec& spec, const Observable& f,
                        const Observable& h, const PhasePoint& p) {
    if (!f.has_derivatives() || !h.has_derivatives())
        throw DerivativeUnavailable("analytic bracket needs analytic gradients");
    const auto fg = f.g_grads(p), fx = f.xi_grads(p);
    const auto hg = h.g_grads(p), hx = h.xi_grads(p);
    complex out = 0.0;
    for (int i = 0; i < p.factors(); ++i) {
        const Mat fgi = spec.project(fg[i]), fxi = spec.project(fx[i]);
        const Mat hgi = spec.project(hg[i]), hxi = spec.project(hx[i]);
        out += (fgi * hxi).trace() - (fxi * hgi).trace() -
               (p.xi[i] * commutator(fxi, hxi)).trace();
    }
    return out;
}

std::vector<Mat> fd_g_grads(const AlgebraSpec& spec, const Observable& f,
                            const PhasePoint& p, double step) {
    std::vector<Mat> grads;
    for (int i = 0; i < p.factors(); ++i) {
        Mat grad = Mat::Zero(spec.n, spec.n);
        for (int a = 0; a < spec.dim(); ++a) {
            PhasePoint plus = p, minus = p;
            const Mat dir = step * spec.basis[a];
            plus.g[i] = p.g[i] * dir.exp();
            minus.g[i] = p.g[i] * (-dir).exp();
            const complex da = (f.eval(plus) - f.eval(minus)) / (2.0 * step);
            grad += da * spec.dual_basis[a];
        }
        grads.push_back(std::move(grad));
    }
    return grads;
}

std::vector<Mat> fd_xi_grads(const AlgebraSpec& spec, const Observable& f,
                             const PhasePoint& p, double step) {
    std::vector<Mat> grads;
    for (int i = 0; i < p.factors(); ++i) {
        Mat grad = Mat::Zero(spec.n, spec.n);
        for (int a = 0; a < spec.dim(); ++a) {
            PhasePoint plus = p, minus = p;
            plus.xi[i] = p.xi[i] + step * spec.basis[a];
            minus.xi[i] = p.xi[i] - step * spec.basis[a];
            const complex da = (f.eval(plus) - f.eval(minus)) / (2.0 * step);
            grad += da * spec.dual_basis[a];
        }
        grads.push_back(std::move(grad));
    }
    return grads;
}

complex poisson_bracket_fd(const AlgebraSpec& spec, const Observable& f,
                           const Observable& h, const PhasePoint& p, double step) {
    if (!(step > 0.0)) throw IndexOutOfRange("finite-difference step must be positive");
    Observable ff = f, hh = h;
    ff.g_grads = [&](const PhasePoint& q) { return fd_g_grads(spec, f, q, step); };
    ff.xi_grads = [&](const PhasePoint& q) { return fd_xi_grads(spec, f, q, step); };
    hh.g_grads = [&](const PhasePoint& q) { return fd_g_grads(spec, h, q, step); };
    hh.xi_grads = [&](const PhasePoint& q) { return fd_xi_grads(spec, h, q, step); };
    return poisson_bracket(spec, ff, hh, p);
}

Mat moment_map(const PhasePoint& p) {
    const int n = p.g.empty() ? 0 : static_cast<int>(p.g[0].rows());
    Mat out = Mat::Zero(n, n);
    for (int i = 0; i < p.factors(); ++i)
        out += p.g[i] * p.xi[i] * inverse_of(p.g[i]) - p.xi[i];
    return out;
}

PhasePoint project_moment_zero(const AlgebraSpec& spec, const PhasePoint& p) {
    const int n = spec.n;
    const int dim = spec.dim();
    const int l = p.factors();
    // moment(xi + Δ) = moment(xi) + Σ_i (Ad g_i − 1)Δ_i; least-norm solve for
    // basis coefficients of the Δ_i.
    Mat jac(n * n, l * dim);
    for (int i = 0; i < l; ++i) {
        const Mat op = ad_op(p.g[i]) - Mat::Identity(n * n, n * n);
        for (int a = 0; a < dim; ++a)
            jac.col(i * dim + a) = op * vec(spec.basis[a]);
    }
    const CVec rhs = -vec(moment_map(p));
    const CVec coeffs =
        jac.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    PhasePoint out = p;
    for (int i = 0; i < l; ++i)
        for (int a = 0; a < dim; ++a)
            out.xi[i] += coeffs(i * dim + a) * spec.basis[a];
    return out;
}

double contraction_factor(const PhasePoint& p, const SchottkyData& s) {
    if (p.factors() != s.genus())
        throw IndexOutOfRange("phase point and Schottky data disagree on genus");
    double kappa = 0.0;
    for (int i = 0; i < s.genus(); ++i) {
        const double q = std::abs(multiplier(s.pairs[i].gamma));
        kappa += q * (adjoint_operator_norm(p.g[i]) +
                      adjoint_operator_norm(inverse_of(p.g[i])));
    }
    return kappa;
}

}  // namespace schottky
