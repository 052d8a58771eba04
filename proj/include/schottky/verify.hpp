#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "schottky/poincare.hpp"

namespace schottky {

struct CheckReport {
    std::string check_name;
    double residual = 0.0;
    double tolerance = 0.0;
    double tail_budget = 0.0;
    std::vector<complex> samples;
    bool pass = false;
    double runtime_ms = 0.0;

    void finalize() { pass = residual <= tolerance + tail_budget; }
};

nlohmann::json report_to_json(const CheckReport& r);

// Observables over the phase point with analytic series derivatives; the
// geometry, truncation and evaluation point are baked into the closure.
Observable xi_entry_observable(const AlgebraSpec& spec, const SchottkyData& s,
                               const TruncationPolicy& t, complex z, int row, int col);
Observable spectral_observable(const AlgebraSpec& spec, const SchottkyData& s,
                               const TruncationPolicy& t, complex z, int power);

// tr(ξ(z)^k).
complex spectral_invariant(const PoincareEngine& eng, complex z, int power);

// {ξ(z)^{(1)}, ξ(w)^{(2)}} assembled entrywise from two jets.
TensorElement xi_xi_bracket(const AlgebraSpec& spec, const PhasePoint& p,
                            const XiJet& jz, const XiJet& jw);

// C(z,w) = {ξ(z)^{(1)}, ξ(w)^{(2)}} − [r(z,w), ξ(w)^{(2)}] − [s(z,w), ξ(z)^{(1)}].
TensorElement bracket_defect(const PoincareEngine& eng, complex z, complex w);

// Geometric decay of the length shells and convergence to the target tail.
CheckReport check_convergence(const PoincareEngine& eng, int sample_count,
                              std::uint64_t seed, double ratio_slack = 0.05);

// ‖ξ(γ_i z)γ_i'(z) − Ad(g_i)ξ(z)‖ over boundary samples, plus one random
// length-two word via the holonomy homomorphism.
CheckReport check_twist(const PoincareEngine& eng, int sample_count, double tolerance);

// max_i ‖(1/2πi)∮_{Γ_i} ξ − ξ_i‖.
CheckReport check_pairing(const PoincareEngine& eng, double tolerance,
                          int max_nodes = 1024);

// s(z,w) + r(w,z)^{(21)} over matched truncation.
CheckReport check_antisymmetry(const PoincareEngine& eng, int pair_count,
                               std::uint64_t seed, double tolerance);

// ‖bracket_defect‖ at random fundamental-domain pairs.
CheckReport check_rmatrix(const PoincareEngine& eng, int pair_count,
                          std::uint64_t seed, double tolerance);

struct Lemma3Result {
    CheckReport report;           // max ‖C_ij‖
    double intermediate_residual = 0.0;  // worst defect of the two proof identities
};

Lemma3Result check_lemma3_contours(const PoincareEngine& eng, double epsilon,
                                   double tolerance, double intermediate_tolerance,
                                   int nodes = 128);

// |{tr ξ(z)^k, tr ξ(w)^m}| with analytic derivatives, cross-checked by
// finite differences.
CheckReport check_involution(const PoincareEngine& eng, complex z, complex w, int k,
                             int m, double tolerance, double fd_step = 1e-5);

// Six-term dynamical Yang-Baxter residual in g⊗g⊗g with the slot
// convention r^{jk} = r(z_j, z_k) acting in factors (j, k).
CheckReport check_dybe(const PoincareEngine& eng, complex z2, complex z3, complex z_aux,
                       double tolerance);

// Jacobi identity of the bracket on ξ-entries at three points; outer bracket
// by finite differences, inner bracket analytic.
double jacobi_residual(const AlgebraSpec& spec, const SchottkyData& s,
                       const TruncationPolicy& t, const PhasePoint& p, complex z1,
                       complex z2, complex z3, int probe_count, std::uint64_t seed,
                       double fd_step = 1e-4);

CheckReport check_basepoint(const PoincareEngine& eng, complex z, complex z0a,
                            complex z0b, double tolerance);

// z0-derivative of the based series, in the closed form carried by the
// moment map, against a central finite difference.
double basepoint_derivative_residual(const PoincareEngine& eng, complex z, complex z0,
                                     double fd_step = 1e-6);

// Analytic derivatives (holonomy, ξ, r) against central finite differences
// at random probes.
CheckReport check_oracles(const PoincareEngine& eng, int probe_count,
                          std::uint64_t seed, double tolerance);

}  // namespace schottky
