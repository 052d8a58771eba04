#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "schottky/config.hpp"
#include "schottky/poincare.hpp"

using namespace schottky;

namespace {

struct Setup {
    RunConfig cfg = make_reference(ReferenceKind::genus1);
    AlgebraSpec spec = cfg.algebra();
    PoincareEngine eng{spec, cfg.schottky, cfg.phase, cfg.truncation};
    std::vector<complex> pts = fundamental_domain_samples(cfg.schottky, 4, 2);
};

}  // namespace

TEST_CASE("kernel weight of the identity word") {
    Setup su;
    const complex z = su.pts[0];
    const complex pole = su.cfg.schottky.pole(0);
    CHECK(std::abs(su.eng.kernel_weight(Word{}, 0, z) - 1.0 / (z - pole)) < 1e-13);
    // Nontrivial word against direct Möbius arithmetic.
    const Word w({Letter{0, 1}});
    const MoebiusMap g = su.cfg.schottky.pairs[0].gamma;
    const complex direct = g.derivative(z) / (g.apply(z).finite() - pole);
    CHECK(std::abs(su.eng.kernel_weight(w, 0, z) - direct) < 1e-13);
}

TEST_CASE("xi truncated at L=0 is the bare pole sum") {
    Setup su;
    TruncationPolicy t0 = su.cfg.truncation;
    t0.max_word_length = 0;
    t0.allow_partial = true;
    const PoincareEngine e0(su.spec, su.cfg.schottky, su.cfg.phase, t0);
    const complex z = su.pts[1];
    Mat expect = Mat::Zero(2, 2);
    for (int i = 0; i < su.cfg.schottky.genus(); ++i)
        expect += su.cfg.phase.xi[i] / (z - su.cfg.schottky.pole(i));
    CHECK((e0.xi(z).value - expect).norm() < 1e-13);
}

TEST_CASE("xi vanishes with the xi_i and assembles from kernels") {
    Setup su;
    PhasePoint zeroed = su.cfg.phase;
    for (auto& x : zeroed.xi) x.setZero();
    const PoincareEngine ez(su.spec, su.cfg.schottky, zeroed, su.cfg.truncation);
    CHECK(ez.xi(su.pts[0]).value.norm() < 1e-14);

    const complex z = su.pts[2];
    Mat assembled = Mat::Zero(2, 2);
    for (int i = 0; i < su.cfg.schottky.genus(); ++i)
        assembled += su.eng.poincare_kernel(z, i, su.cfg.phase.xi[i]).value;
    CHECK((assembled - su.eng.xi(z).value).norm() < 1e-12);
}

TEST_CASE("poincare kernel is linear in its matrix argument") {
    Setup su;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat x(2, 2), y(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            x(r, c) = complex{u(rng), u(rng)};
            y(r, c) = complex{u(rng), u(rng)};
        }
    const complex z = su.pts[3];
    const Mat lhs = su.eng.poincare_kernel(z, 0, 2.0 * x - 0.5 * y).value;
    const Mat rhs = 2.0 * su.eng.poincare_kernel(z, 0, x).value -
                    0.5 * su.eng.poincare_kernel(z, 0, y).value;
    CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("residue round-trip recovers xi_i") {
    Setup su;
    const Mat res =
        su.eng.residue_at_circle(0, [&](complex z) { return su.eng.xi(z).value; });
    CHECK((res - su.cfg.phase.xi[0]).norm() < 1e-8);
}

TEST_CASE("s is minus the swap of r") {
    Setup su;
    const complex z = su.pts[0], w = su.pts[1];
    const TensorElement s = su.eng.s_matrix(z, w).value;
    const TensorElement r = su.eng.r_matrix(w, z).value;
    CHECK((s.op + tensor_swap(r).op).norm() < 1e-12);
}

TEST_CASE("r truncated at L=0 is P/(z-w)") {
    Setup su;
    TruncationPolicy t0 = su.cfg.truncation;
    t0.max_word_length = 0;
    t0.allow_partial = true;
    const PoincareEngine e0(su.spec, su.cfg.schottky, su.cfg.phase, t0);
    const complex z = su.pts[0], w = su.pts[1];
    const TensorElement got = e0.r_matrix(z, w).value;
    const TensorElement want = (1.0 / (z - w)) * casimir(su.spec);
    CHECK((got.op - want.op).norm() < 1e-13);
}

TEST_CASE("residue of r at infinity is P") {
    // Measured calibration: (1/2πi)∮_{|z|=R} r(z,w) dz = +P with our
    // counterclockwise contour; the sign is pinned here and relied on by
    // the Lemma 3 machinery.
    Setup su;
    const complex w = su.pts[0];
    const ContourSpec big(Circle{0.0, 6.0}, 256);
    const Mat rint = contour_integral_value(
        big, [&](complex z) { return su.eng.r_matrix(z, w).value.op; });
    CHECK((rint - casimir(su.spec).op).norm() < 1e-7);
}

TEST_CASE("residue of xi at infinity is minus the moment map") {
    Setup su;
    const ContourSpec big(Circle{0.0, 6.0}, 256);
    const Mat xint =
        contour_integral_value(big, [&](complex z) { return su.eng.xi(z).value; });
    CHECK((xint + moment_map(su.cfg.phase)).norm() < 1e-10);
}

TEST_CASE("twist equivariance of r in the first slot") {
    Setup su;
    TruncationPolicy deep = su.cfg.truncation;
    deep.max_word_length += 3;
    deep.allow_partial = true;
    const PoincareEngine de(su.spec, su.cfg.schottky, su.cfg.phase, deep);
    const MoebiusMap g = su.cfg.schottky.pairs[0].gamma;
    const complex z = su.cfg.schottky.pairs[0].inner.point(1.1);
    const complex w = su.pts[1];
    const TensorElement lhs =
        g.derivative(z) * de.r_matrix(g.apply(z).finite(), w).value;
    const TensorElement rhs = tensor_act(1, su.cfg.phase.g[0], de.r_matrix(z, w).value);
    CHECK((lhs.op - rhs.op).norm() < 1e-7);
}

TEST_CASE("jet agrees with the scalar series") {
    Setup su;
    const complex z = su.pts[2];
    const XiJet jet = su.eng.jet(z);
    CHECK((jet.value - su.eng.xi(z).value).norm() < 1e-8);
    for (int a = 0; a < su.spec.dim(); ++a) {
        const Mat dir = su.eng.xi_derivative_xi(z, 0, a).value;
        const Mat via_op = unvec(jet.xi_op[0] * vec(su.spec.basis[a]), 2, 2);
        CHECK((dir - via_op).norm() < 1e-8);
    }
    const Mat x = su.spec.basis[1];
    const Mat via_g = unvec(jet.g_op[0] * vec(x), 2, 2);
    CHECK((via_g - su.eng.xi_derivative_g(z, 0, x).value).norm() < 1e-8);
}

TEST_CASE("derivatives match finite differences") {
    Setup su;
    const complex z = su.pts[3];
    const double h = 1e-5;
    const Mat x = su.spec.basis[2];

    PhasePoint plus = su.cfg.phase, minus = su.cfg.phase;
    plus.g[0] = plus.g[0] * (h * x).exp();
    minus.g[0] = minus.g[0] * (-h * x).exp();
    const PoincareEngine ep(su.spec, su.cfg.schottky, plus, su.cfg.truncation);
    const PoincareEngine em(su.spec, su.cfg.schottky, minus, su.cfg.truncation);
    const Mat fd_g = (ep.xi(z).value - em.xi(z).value) / (2.0 * h);
    CHECK((fd_g - su.eng.xi_derivative_g(z, 0, x).value).norm() < 1e-8);

    PhasePoint xplus = su.cfg.phase, xminus = su.cfg.phase;
    xplus.xi[0] += h * su.spec.basis[1];
    xminus.xi[0] -= h * su.spec.basis[1];
    const PoincareEngine exp_(su.spec, su.cfg.schottky, xplus, su.cfg.truncation);
    const PoincareEngine exm(su.spec, su.cfg.schottky, xminus, su.cfg.truncation);
    const Mat fd_xi = (exp_.xi(z).value - exm.xi(z).value) / (2.0 * h);
    CHECK((fd_xi - su.eng.xi_derivative_xi(z, 0, 1).value).norm() < 1e-8);

    const complex w = su.pts[0];
    const TensorElement fd_r =
        (1.0 / (2.0 * h)) * (ep.r_matrix(z, w).value - em.r_matrix(z, w).value);
    CHECK((fd_r.op - su.eng.r_derivative_g(z, w, 0, x).value.op).norm() < 1e-6);
}

TEST_CASE("shell norms decay geometrically") {
    Setup su;
    const auto shells = su.eng.shell_norms(su.pts[0]);
    REQUIRE(shells.size() >= 4);
    for (std::size_t p = 2; p + 1 < shells.size(); ++p)
        CHECK(shells[p + 1] < shells[p]);
    const MatSeries s = su.eng.xi(su.pts[0]);
    CHECK(s.measured_ratio < 1.0);
    CHECK(s.tail_estimate <= su.cfg.truncation.target_tail);
}

TEST_CASE("xi_based_at basics") {
    Setup su;
    PhasePoint zeroed = su.cfg.phase;
    for (auto& x : zeroed.xi) x.setZero();
    const PoincareEngine ez(su.spec, su.cfg.schottky, zeroed, su.cfg.truncation);
    CHECK(ez.xi_based_at(su.pts[0], su.pts[1]).value.norm() < 1e-14);
    // On a moment-zero point the basepoint drops out.
    const PhasePoint pz = project_moment_zero(su.spec, su.cfg.phase);
    const PoincareEngine emz(su.spec, su.cfg.schottky, pz, su.cfg.truncation);
    const Mat a = emz.xi_based_at(su.pts[0], su.pts[1]).value;
    const Mat b = emz.xi_based_at(su.pts[0], su.pts[2]).value;
    CHECK((a - b).norm() < 1e-7);
}

TEST_CASE("failure modes") {
    Setup su;
    // κ ≥ 1: blow up one group element.
    PhasePoint hot = su.cfg.phase;
    hot.g[0] = Mat::Zero(2, 2);
    hot.g[0](0, 0) = 30.0;
    hot.g[0](1, 1) = 1.0 / 30.0;
    CHECK_THROWS_AS(
        PoincareEngine(su.spec, su.cfg.schottky, hot, su.cfg.truncation).xi(su.pts[0]),
        ConvergenceCriterionViolated);
    // L too small for the target tail.
    TruncationPolicy tiny = su.cfg.truncation;
    tiny.max_word_length = 1;
    const PoincareEngine et(su.spec, su.cfg.schottky, su.cfg.phase, tiny);
    CHECK_THROWS_AS(et.xi(su.pts[0]), TailNotMet);
    // r at colliding arguments.
    CHECK_THROWS_AS(su.eng.r_matrix(su.pts[0], su.pts[0]), NearPole);
    // Kernel index out of range.
    CHECK_THROWS_AS(su.eng.xi_derivative_xi(su.pts[0], 7, 0), IndexOutOfRange);
}
