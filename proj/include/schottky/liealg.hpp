#pragma once

#include <string>
#include <vector>

#include "schottky/linalg.hpp"

namespace schottky {

enum class AlgebraKind { gl, sl };

AlgebraKind algebra_kind_from_string(const std::string& s);
std::string to_string(AlgebraKind k);

// Matrix Lie algebra gl(n,C) or sl(n,C) with a trace-form-dual basis.
struct AlgebraSpec {
    int n = 2;
    AlgebraKind kind = AlgebraKind::gl;
    std::vector<Mat> basis;       // e_a
    std::vector<Mat> dual_basis;  // e^a with tr(e_a e^b) = δ_a^b

    static AlgebraSpec make(int n, AlgebraKind kind);

    int dim() const { return static_cast<int>(basis.size()); }
    // Projection of an arbitrary n×n matrix onto the algebra (traceless part
    // for sl, identity for gl).
    Mat project(const Mat& x) const;
};

// Element of g⊗g stored as the n²×n² operator on C^n ⊗ C^n.
// T = Σ T[i][j][k][l] E_ij ⊗ E_kl  <->  op(i*n+k, j*n+l) = T[i][j][k][l].
struct TensorElement {
    int n = 0;
    Mat op;  // n² × n²

    TensorElement() = default;
    TensorElement(int n_, Mat op_);

    static TensorElement zero(int n);
    static TensorElement simple(const Mat& x, const Mat& y);  // x ⊗ y

    double norm() const { return op.norm(); }
    complex coeff(int i, int j, int k, int l) const { return op(i * n + k, j * n + l); }

    TensorElement& operator+=(const TensorElement& o);
    TensorElement& operator-=(const TensorElement& o);
    TensorElement& operator*=(complex s);
};

TensorElement operator+(TensorElement a, const TensorElement& b);
TensorElement operator-(TensorElement a, const TensorElement& b);
TensorElement operator*(complex s, TensorElement a);

// Split Casimir P = Σ_a e_a ⊗ e^a; the factor swap for gl_n,
// P_gl - (1/n) I⊗I for sl_n.
TensorElement casimir(const AlgebraSpec& spec);

// g x g^{-1}; throws SingularGroupElement for ill-conditioned g.
Mat adjoint(const Mat& g, const Mat& x, double cond_bound = 1e12);

// Operator norm of Ad g on gl_n in the Frobenius norm (largest singular
// value of the n²×n² realization).
double adjoint_operator_norm(const Mat& g, double cond_bound = 1e12);

// Ad g on tensor factor 1 or 2.
TensorElement tensor_act(int side, const Mat& g, const TensorElement& t);
// [T, x⊗1] (side 1) or [T, 1⊗x] (side 2).
TensorElement tensor_commutator(const TensorElement& t, const Mat& x, int side);
// T^{(21)}.
TensorElement tensor_swap(const TensorElement& t);
// Matrix commutator in End(C^n ⊗ C^n); both arguments as tensor elements.
TensorElement tensor_mat_commutator(const TensorElement& a, const TensorElement& b);

// Pairing contraction ⟨T, x⊗y⟩ under the trace form in both slots:
// Σ T[i][j][k][l] tr(E_ij x) tr(E_kl y).
complex tensor_pair(const TensorElement& t, const Mat& x, const Mat& y);

}  // namespace schottky
