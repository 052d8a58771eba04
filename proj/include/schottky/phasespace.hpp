#pragma once

#include <functional>
#include <vector>

#include "schottky/liealg.hpp"
#include "schottky/moebius.hpp"

namespace schottky {

// Point of T*G^l in left trivialization: group elements g_i and covectors
// ξ_i identified with elements of g via the trace form.
struct PhasePoint {
    std::vector<Mat> g;
    std::vector<Mat> xi;

    int factors() const { return static_cast<int>(g.size()); }
};

// Checks invertibility and, for sl, det(g_i)=1 and tr(ξ_i)=0.
void check_phase_point(const AlgebraSpec& spec, const PhasePoint& p);

// g_w = product of g_i^{±1} in letter order.
Mat holonomy(const Word& w, const PhasePoint& p);

// d/dt|_0 holonomy(w) with g_j -> g_j exp(t x).
Mat holonomy_derivative(const Word& w, const PhasePoint& p, int j, const Mat& x);

// δg_w(x) = Σ_m A_m x B_m for left translation on factor j; the bilinear
// form of the product rule, reused by the series jets.
struct LeftRightPair {
    Mat left, right;
};
std::vector<LeftRightPair> holonomy_derivative_pairs(const Word& w, const PhasePoint& p,
                                                     int j);

// Operator vec(x) -> vec(δg_w(x)).
Mat holonomy_derivative_op(const Word& w, const PhasePoint& p, int j);

// Observable with analytic derivatives: left-invariant gradients w.r.t.
// each g_i (⟨∇_i F, x⟩ = d/dt F(.., g_i e^{tx}, ..)) and trace-pairing
// gradients w.r.t. each ξ_i.
struct Observable {
    std::function<complex(const PhasePoint&)> eval;
    std::function<std::vector<Mat>(const PhasePoint&)> g_grads;
    std::function<std::vector<Mat>(const PhasePoint&)> xi_grads;

    bool has_derivatives() const { return g_grads && xi_grads; }
};

// Canonical bracket on T*G^l in left trivialization; signs pinned by
// {g_i^{(1)}, ξ_i^{(2)}} = g_i^{(1)} P and {ξ_i^{(1)}, ξ_i^{(2)}} = −[P, ξ_i^{(1)}]
// (the relative sign of the ξ-term is forced by the Jacobi identity).
complex poisson_bracket(const AlgebraSpec& spec, const Observable& f,
                        const Observable& h, const PhasePoint& p);

// Same bracket with all gradients replaced by central finite differences.
complex poisson_bracket_fd(const AlgebraSpec& spec, const Observable& f,
                           const Observable& h, const PhasePoint& p, double step);

// Finite-difference gradients of an evaluation-only observable.
std::vector<Mat> fd_g_grads(const AlgebraSpec& spec, const Observable& f,
                            const PhasePoint& p, double step);
std::vector<Mat> fd_xi_grads(const AlgebraSpec& spec, const Observable& f,
                             const PhasePoint& p, double step);

// Σ_i (Ad(g_i)ξ_i − ξ_i).
Mat moment_map(const PhasePoint& p);

// Least-norm correction of the ξ_i putting the point on the zero level of
// the moment map (exact: the moment map is linear in ξ).
PhasePoint project_moment_zero(const AlgebraSpec& spec, const PhasePoint& p);

// κ = Σ_i |q_i| (‖Ad g_i‖ + ‖Ad g_i^{-1}‖); series converge when κ < 1.
double contraction_factor(const PhasePoint& p, const SchottkyData& s);

}  // namespace schottky
