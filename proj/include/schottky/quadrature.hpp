#pragma once

#include <functional>

#include "schottky/liealg.hpp"
#include "schottky/moebius.hpp"

namespace schottky {

// Counterclockwise circle contour with a power-of-two node count.
struct ContourSpec {
    Circle circle;
    int nodes = 256;

    ContourSpec() = default;
    ContourSpec(Circle c, int n);
};

struct QuadratureResult {
    Mat value;            // matrix-valued (scalars as 1×1)
    double error = 0.0;   // |N nodes − N/2 nodes|
};

// (1/2πi) ∮ f(z) dz by the trapezoidal rule; spectrally accurate for f
// analytic in an annulus around the circle. Throws NotConverged when the
// N vs N/2 comparison stays above tol.
QuadratureResult contour_integral(const ContourSpec& c,
                                  const std::function<Mat(complex)>& f,
                                  double tol = 1e-10);

Mat contour_integral_value(const ContourSpec& c, const std::function<Mat(complex)>& f,
                           double tol = 1e-10);

// Adaptive node doubling: starts at c.nodes, doubles until the half/full
// discrepancy drops below 0.1·tol or max_nodes is reached.
QuadratureResult contour_integral_adaptive(ContourSpec c,
                                           const std::function<Mat(complex)>& f,
                                           double tol, int max_nodes = 8192);

// (1/2πi)² ∮∮ K(z,w) dz dw over Γ_i × Γ_j, both counterclockwise.
TensorElement double_contour_integral(const ContourSpec& ci, const ContourSpec& cj,
                                      const std::function<TensorElement(complex, complex)>& k,
                                      double tol = 1e-8);

// Concentric circle of radius (1+ε)·r, checked to stay clear of every
// other disc of the Schottky data.
Circle deformed_circle(const Circle& c, double epsilon, const SchottkyData& s);

}  // namespace schottky
