#pragma once

#include <Eigen/Dense>
#include <complex>

#include "schottky/errors.hpp"

namespace schottky {

using complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr complex I_UNIT{0.0, 1.0};

// Column-major vectorization, matching Eigen's storage order.
inline CVec vec(const Mat& m) {
    return Eigen::Map<const CVec>(m.data(), m.size());
}

inline Mat unvec(const CVec& v, int rows, int cols) {
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Operator X -> C X D on vec(X): (D^T ⊗ C).
inline Mat left_right_op(const Mat& c, const Mat& d) {
    return kron(d.transpose(), c);
}

// Adjoint action x -> g x g^{-1} as an n²×n² matrix on vec(x).
inline Mat ad_op(const Mat& g) {
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible())
        throw SingularGroupElement("ad_op: group element not invertible");
    return left_right_op(g, lu.inverse());
}

inline Mat inverse_of(const Mat& g) {
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible())
        throw SingularGroupElement("matrix not invertible");
    return lu.inverse();
}

inline double fro(const Mat& m) { return m.norm(); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

}  // namespace schottky
