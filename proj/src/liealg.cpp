#include "schottky/liealg.hpp"

#include <Eigen/SVD>

namespace schottky {

AlgebraKind algebra_kind_from_string(const std::string& s) {
    if (s == "gl") return AlgebraKind::gl;
    if (s == "sl") return AlgebraKind::sl;
    throw ConfigParseError("unknown algebra kind: " + s);
}

std::string to_string(AlgebraKind k) {
    return k == AlgebraKind::gl ? "gl" : "sl";
}

namespace {

Mat unit_matrix(int n, int i, int j) {
    Mat e = Mat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace

AlgebraSpec AlgebraSpec::make(int n, AlgebraKind kind) {
    if (n < 1) throw IndexOutOfRange("matrix size must be positive");
    AlgebraSpec spec;
    spec.n = n;
    spec.kind = kind;
    if (kind == AlgebraKind::gl) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                spec.basis.push_back(unit_matrix(n, i, j));
                spec.dual_basis.push_back(unit_matrix(n, j, i));
            }
        return spec;
    }
    // sl_n: off-diagonal E_ij plus the simple coroots E_ii - E_{i+1,i+1}.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) spec.basis.push_back(unit_matrix(n, i, j));
    for (int i = 0; i + 1 < n; ++i)
        spec.basis.push_back(unit_matrix(n, i, i) - unit_matrix(n, i + 1, i + 1));
    const int dim = static_cast<int>(spec.basis.size());
    Mat gram(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            gram(a, b) = (spec.basis[a] * spec.basis[b]).trace();
    const Mat gram_inv = inverse_of(gram);
    for (int a = 0; a < dim; ++a) {
        Mat dual = Mat::Zero(n, n);
        for (int b = 0; b < dim; ++b) dual += gram_inv(a, b) * spec.basis[b];
        spec.dual_basis.push_back(dual);
    }
    return spec;
}

Mat AlgebraSpec::project(const Mat& x) const {
    if (kind == AlgebraKind::gl) return x;
    return x - (x.trace() / static_cast<double>(n)) * Mat::Identity(n, n);
}

TensorElement::TensorElement(int n_, Mat op_) : n(n_), op(std::move(op_)) {
    if (op.rows() != n * n || op.cols() != n * n)
        throw IndexOutOfRange("tensor operator has wrong shape");
}

TensorElement TensorElement::zero(int n) {
    return {n, Mat::Zero(n * n, n * n)};
}

TensorElement TensorElement::simple(const Mat& x, const Mat& y) {
    return {static_cast<int>(x.rows()), kron(x, y)};
}

TensorElement& TensorElement::operator+=(const TensorElement& o) {
    op += o.op;
    return *this;
}

TensorElement& TensorElement::operator-=(const TensorElement& o) {
    op -= o.op;
    return *this;
}

TensorElement& TensorElement::operator*=(complex s) {
    op *= s;
    return *this;
}

TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
TensorElement operator*(complex s, TensorElement a) { return a *= s; }

TensorElement casimir(const AlgebraSpec& spec) {
    TensorElement p = TensorElement::zero(spec.n);
    for (int a = 0; a < spec.dim(); ++a)
        p += TensorElement::simple(spec.basis[a], spec.dual_basis[a]);
    return p;
}

namespace {

Mat checked_inverse(const Mat& g, double cond_bound) {
    Eigen::JacobiSVD<Mat> svd(g);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > cond_bound)
        throw SingularGroupElement("group element singular or ill-conditioned");
    return inverse_of(g);
}

}  // namespace

Mat adjoint(const Mat& g, const Mat& x, double cond_bound) {
    return g * x * checked_inverse(g, cond_bound);
}

double adjoint_operator_norm(const Mat& g, double cond_bound) {
    const Mat op = left_right_op(g, checked_inverse(g, cond_bound));
    Eigen::JacobiSVD<Mat> svd(op);
    return svd.singularValues()(0);
}

TensorElement tensor_act(int side, const Mat& g, const TensorElement& t) {
    const int n = t.n;
    const Mat gi = inverse_of(g);
    const Mat id = Mat::Identity(n, n);
    if (side == 1) return {n, kron(g, id) * t.op * kron(gi, id)};
    if (side == 2) return {n, kron(id, g) * t.op * kron(id, gi)};
    throw IndexOutOfRange("tensor side must be 1 or 2");
}

TensorElement tensor_commutator(const TensorElement& t, const Mat& x, int side) {
    const int n = t.n;
    const Mat id = Mat::Identity(n, n);
    const Mat xe = (side == 1) ? kron(x, id) : (side == 2) ? kron(id, x) : Mat{};
    if (xe.size() == 0) throw IndexOutOfRange("tensor side must be 1 or 2");
    return {n, t.op * xe - xe * t.op};
}

TensorElement tensor_swap(const TensorElement& t) {
    const int n = t.n;
    Mat out(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out(i * n + k, j * n + l) = t.op(k * n + i, l * n + j);
    return {n, std::move(out)};
}

TensorElement tensor_mat_commutator(const TensorElement& a, const TensorElement& b) {
    return {a.n, a.op * b.op - b.op * a.op};
}

complex tensor_pair(const TensorElement& t, const Mat& x, const Mat& y) {
    complex out = 0.0;
    const int n = t.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out += t.coeff(i, j, k, l) * x(j, i) * y(l, k);
    return out;
}

}  // namespace schottky
