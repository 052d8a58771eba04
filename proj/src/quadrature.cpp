#include "schottky/quadrature.hpp"

#include <cmath>

namespace schottky {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ContourSpec::ContourSpec(Circle c, int n) : circle(c), nodes(n) {
    if (nodes < 16 || !power_of_two(nodes))
        throw IndexOutOfRange("node count must be a power of two, at least 16");
}

QuadratureResult contour_integral(const ContourSpec& c,
                                  const std::function<Mat(complex)>& f,
                                  double tol) {
    const int n = c.nodes;
    const double r = c.circle.radius;
    Mat full, half;
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * M_PI * k / n;
        const complex dir = r * complex{std::cos(ang), std::sin(ang)};
        // (1/2πi)∮ f dz = (1/N) Σ f(z_k) (z_k − center)
        const Mat term = f(c.circle.center + dir) * dir;
        if (full.size() == 0) {
            full = Mat::Zero(term.rows(), term.cols());
            half = full;
        }
        full += term;
        if (k % 2 == 0) half += term;
    }
    full /= static_cast<double>(n);
    half /= static_cast<double>(n / 2);
    QuadratureResult out;
    out.error = (full - half).norm();
    out.value = std::move(full);
    if (out.error > tol)
        throw NotConverged("contour integral: N vs N/2 discrepancy " +
                           std::to_string(out.error));
    return out;
}

Mat contour_integral_value(const ContourSpec& c, const std::function<Mat(complex)>& f,
                           double tol) {
    return contour_integral(c, f, tol).value;
}

QuadratureResult contour_integral_adaptive(ContourSpec c,
                                           const std::function<Mat(complex)>& f,
                                           double tol, int max_nodes) {
    while (true) {
        try {
            return contour_integral(c, f, 0.1 * tol);
        } catch (const NotConverged&) {
            if (c.nodes * 2 > max_nodes) throw;
            c.nodes *= 2;
        }
    }
}

TensorElement double_contour_integral(const ContourSpec& ci, const ContourSpec& cj,
                                      const std::function<TensorElement(complex, complex)>& k,
                                      double tol) {
    const int nz = ci.nodes, nw = cj.nodes;
    const double rz = ci.circle.radius, rw = cj.circle.radius;
    TensorElement full, half;
    bool init = false;
    for (int a = 0; a < nz; ++a) {
        const double az = 2.0 * M_PI * a / nz;
        const complex dz = rz * complex{std::cos(az), std::sin(az)};
        for (int b = 0; b < nw; ++b) {
            const double aw = 2.0 * M_PI * b / nw;
            const complex dw = rw * complex{std::cos(aw), std::sin(aw)};
            TensorElement term;
            try {
                term = k(ci.circle.center + dz, cj.circle.center + dw);
            } catch (const NearPole& e) {
                throw PoleCollision(e.what());
            }
            term *= dz * dw;
            if (!init) {
                full = TensorElement::zero(term.n);
                half = full;
                init = true;
            }
            full += term;
            if (a % 2 == 0 && b % 2 == 0) half += term;
        }
    }
    full *= 1.0 / (static_cast<double>(nz) * nw);
    half *= 1.0 / (static_cast<double>(nz / 2) * (nw / 2));
    const double err = (full - half).norm();
    if (err > tol)
        throw NotConverged("double contour integral: discrepancy " + std::to_string(err));
    return full;
}

Circle deformed_circle(const Circle& c, double epsilon, const SchottkyData& s) {
    if (!(epsilon > 0.0))
        throw LeavesFundamentalDomain("deformation must strictly encircle the contour");
    const double r = (1.0 + epsilon) * c.radius;
    for (const auto& other : s.all_circles()) {
        if (std::abs(other.center - c.center) < 1e-14 && std::abs(other.radius - c.radius) < 1e-14)
            continue;
        if (std::abs(other.center - c.center) <= r + other.radius)
            throw LeavesFundamentalDomain("deformed circle meets another disc");
    }
    return {c.center, r};
}

}  // namespace schottky
