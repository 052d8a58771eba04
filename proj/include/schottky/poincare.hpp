#pragma once

#include <vector>

#include "schottky/phasespace.hpp"
#include "schottky/quadrature.hpp"

namespace schottky {

// Word-length truncation with a measured geometric tail estimate.
struct TruncationPolicy {
    int max_word_length = 8;
    double target_tail = 1e-9;
    std::size_t capacity = 2'000'000;
    // When set, a series that exhausts max_word_length reports its tail
    // instead of throwing TailNotMet (used by convergence scans).
    bool allow_partial = false;
};

template <class T>
struct Series {
    T value{};
    double tail_estimate = 0.0;
    int shells_used = 0;       // number of length shells summed (last length + 1)
    double measured_ratio = 0.0;
};

using MatSeries = Series<Mat>;
using TensorSeries = Series<TensorElement>;

// First-order data of ξ(z) at a phase point: the value, the operators
// dξ(z)/dξ_i on g, and the left-translation derivative operators in each g_j.
struct XiJet {
    Mat value;                // n×n
    std::vector<Mat> xi_op;   // l × (n²×n²): vec(η) -> vec(dξ(z))
    std::vector<Mat> g_op;    // l × (n²×n²): vec(x)  -> vec(dξ(z))
    double tail_estimate = 0.0;
    int shells_used = 0;
};

// Shared evaluator for every Poincaré series of the construction. Holds the
// word/holonomy cache; all evaluations are const and reuse it.
class PoincareEngine {
  public:
    PoincareEngine(AlgebraSpec spec, SchottkyData s, PhasePoint p, TruncationPolicy t);

    const AlgebraSpec& algebra() const { return spec_; }
    const SchottkyData& schottky() const { return s_; }
    const PhasePoint& phase() const { return p_; }
    const TruncationPolicy& policy() const { return t_; }
    double kappa() const { return kappa_; }

    // γ'(z) / (γ(z) − γ_i^{-1}(∞)) for γ = word_to_map(w).
    complex kernel_weight(const Word& w, int i, complex z) const;

    // The Lax matrix ξ(z), coefficient of dz.
    MatSeries xi(complex z) const;
    // Σ_γ Ad(g_γ^{-1}) x · kernel_weight(γ, i, z).
    MatSeries poincare_kernel(complex z, int i, const Mat& x) const;
    // Column a of the ξ_i-derivative: poincare_kernel(z, i, e_a).
    MatSeries xi_derivative_xi(complex z, int i, int basis_index) const;
    // Left-translation derivative of ξ(z) in g_j along x.
    MatSeries xi_derivative_g(complex z, int j, const Mat& x) const;

    XiJet jet(complex z) const;

    TensorSeries r_matrix(complex z, complex w) const;
    TensorSeries s_matrix(complex z, complex w) const;
    // Termwise left-translation derivative of r(z,w) in g_j along x.
    TensorSeries r_derivative_g(complex z, complex w, int j, const Mat& x) const;

    // Basepoint-z0 variant of ξ(z) (two-term kernel).
    MatSeries xi_based_at(complex z, complex z0) const;

    // (1/2πi)∮_{Γ_i} f(z) dz; for f = ξ returns ξ_i.
    Mat residue_at_circle(int i, const std::function<Mat(complex)>& f,
                          double tol = 1e-10, int start_nodes = 256,
                          int max_nodes = 8192) const;

    // Frobenius norms of the length-p contributions to ξ(z), p = 0..L.
    std::vector<double> shell_norms(complex z) const;

  private:
    struct Entry {
        Word word;
        MoebiusMap map;
        Mat hol, hol_inv;
    };

    void ensure_shells(int length) const;
    void require_convergent() const;
    complex weight_checked(const MoebiusMap& map, int i, complex z) const;

    AlgebraSpec spec_;
    SchottkyData s_;
    PhasePoint p_;
    TruncationPolicy t_;
    double kappa_ = 0.0;
    double near_pole_scale_ = 1.0;  // min circle radius
    std::vector<complex> poles_;    // γ_i^{-1}(∞)

    mutable std::vector<std::vector<Entry>> shells_;
    // Per word, per source index i, per factor j: z-independent operator so a
    // jet costs one scalar kernel weight per (word, i).
    mutable std::vector<std::vector<std::vector<std::vector<Mat>>>> jet_ops_;
    mutable std::vector<std::vector<Mat>> r2_cache_;  // (1 ⊗ Ad g_γ) P per word
};

}  // namespace schottky
