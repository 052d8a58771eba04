#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "schottky/config.hpp"
#include "schottky/phasespace.hpp"
#include "schottky/verify.hpp"

using namespace schottky;

namespace {

Mat random_mat(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = complex{u(rng), u(rng)};
    return m;
}

PhasePoint random_point(int l, std::mt19937_64& rng) {
    PhasePoint p;
    for (int i = 0; i < l; ++i) {
        p.g.push_back(Mat::Identity(2, 2) + 0.4 * random_mat(2, rng));
        p.xi.push_back(random_mat(2, rng));
    }
    return p;
}

// (g_i)_{ab} with analytic gradients.
Observable g_entry(int l, int i, int a, int b) {
    Observable o;
    o.eval = [=](const PhasePoint& p) { return p.g[i](a, b); };
    o.g_grads = [=](const PhasePoint& p) {
        std::vector<Mat> grads(l, Mat::Zero(2, 2));
        // ⟨∇_g, x⟩ = (g_i x)_{ab} = tr(M x) with M(u,v) = δ_{ub} g_i(a,v).
        for (int v = 0; v < 2; ++v) grads[i](b, v) = p.g[i](a, v);
        return grads;
    };
    o.xi_grads = [=](const PhasePoint&) { return std::vector<Mat>(l, Mat::Zero(2, 2)); };
    return o;
}

// tr(ξ_i x) with analytic gradients.
Observable xi_trace(int l, int i, const Mat& x) {
    Observable o;
    o.eval = [=](const PhasePoint& p) { return (p.xi[i] * x).trace(); };
    o.g_grads = [=](const PhasePoint&) { return std::vector<Mat>(l, Mat::Zero(2, 2)); };
    o.xi_grads = [=](const PhasePoint&) {
        std::vector<Mat> grads(l, Mat::Zero(2, 2));
        grads[i] = x;
        return grads;
    };
    return o;
}

// tr(g_i ξ_i) — mixes both gradient channels.
Observable mixed_trace(int l, int i) {
    Observable o;
    o.eval = [=](const PhasePoint& p) { return (p.g[i] * p.xi[i]).trace(); };
    o.g_grads = [=](const PhasePoint& p) {
        std::vector<Mat> grads(l, Mat::Zero(2, 2));
        grads[i] = p.xi[i] * p.g[i];
        return grads;
    };
    o.xi_grads = [=](const PhasePoint& p) {
        std::vector<Mat> grads(l, Mat::Zero(2, 2));
        grads[i] = p.g[i];
        return grads;
    };
    return o;
}

}  // namespace

TEST_CASE("holonomy follows the letters") {
    std::mt19937_64 rng(2);
    const PhasePoint p = random_point(2, rng);
    CHECK((holonomy(Word{}, p) - Mat::Identity(2, 2)).norm() < 1e-14);
    CHECK((holonomy(Word({Letter{0, 1}}), p) - p.g[0]).norm() < 1e-14);
    const Word w({Letter{0, 1}, Letter{1, -1}});
    CHECK((holonomy(w, p) - p.g[0] * inverse_of(p.g[1])).norm() < 1e-12);
    // Homomorphism over reduced concatenation.
    const Word uv({Letter{0, 1}, Letter{1, -1}, Letter{1, -1}});
    CHECK((holonomy(uv, p) - holonomy(w, p) * inverse_of(p.g[1])).norm() < 1e-12);
}

TEST_CASE("holonomy_derivative closed forms and oracle") {
    std::mt19937_64 rng(4);
    const PhasePoint p = random_point(2, rng);
    const Mat x = random_mat(2, rng);
    CHECK((holonomy_derivative(Word({Letter{0, 1}}), p, 0, x) - p.g[0] * x).norm() <
          1e-13);
    CHECK((holonomy_derivative(Word({Letter{0, -1}}), p, 0, x) +
           x * inverse_of(p.g[0]))
              .norm() < 1e-13);
    const Word w({Letter{0, 1}, Letter{1, 1}, Letter{0, -1}, Letter{1, 1}});
    for (int j = 0; j < 2; ++j) {
        const double h = 1e-6;
        PhasePoint plus = p, minus = p;
        plus.g[j] = p.g[j] * (h * x).exp();
        minus.g[j] = p.g[j] * (-h * x).exp();
        const Mat fd = (holonomy(w, plus) - holonomy(w, minus)) / (2.0 * h);
        const Mat an = holonomy_derivative(w, p, j, x);
        CHECK((an - fd).norm() / std::max(1.0, an.norm()) < 1e-6);
    }
}

TEST_CASE("bracket relation {g,xi} = g P entrywise") {
    const AlgebraSpec spec = AlgebraSpec::make(2, AlgebraKind::gl);
    std::mt19937_64 rng(6);
    const PhasePoint p = random_point(2, rng);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < spec.dim(); ++c) {
                const Observable F = g_entry(2, 0, a, b);
                const complex same =
                    poisson_bracket(spec, F, xi_trace(2, 0, spec.basis[c]), p);
                CHECK(std::abs(same - (p.g[0] * spec.basis[c])(a, b)) < 1e-12);
                const complex other =
                    poisson_bracket(spec, F, xi_trace(2, 1, spec.basis[c]), p);
                CHECK(std::abs(other) < 1e-14);
            }
}

TEST_CASE("bracket relation {xi,xi} = -[P, xi] entrywise") {
    // The relative sign of the ξξ-term is forced by the Jacobi identity
    // once {g^{(1)}, ξ^{(2)}} = g^{(1)}P is fixed.
    const AlgebraSpec spec = AlgebraSpec::make(2, AlgebraKind::gl);
    std::mt19937_64 rng(8);
    const PhasePoint p = random_point(1, rng);
    const TensorElement P = casimir(spec);
    for (int a = 0; a < spec.dim(); ++a)
        for (int b = 0; b < spec.dim(); ++b) {
            const complex got = poisson_bracket(spec, xi_trace(1, 0, spec.basis[a]),
                                                xi_trace(1, 0, spec.basis[b]), p);
            const complex want =
                -(p.xi[0] * commutator(spec.basis[a], spec.basis[b])).trace();
            CHECK(std::abs(got - want) < 1e-12);
            // Tensor assembly: ⟨−[P, ξ^{(1)}], e_a⊗e_b⟩ must agree.
            const TensorElement rhs = -1.0 * tensor_commutator(P, p.xi[0], 1);
            CHECK(std::abs(got - tensor_pair(rhs, spec.basis[a], spec.basis[b])) <
                  1e-12);
        }
}

TEST_CASE("bracket algebraic properties and fd oracle") {
    const AlgebraSpec spec = AlgebraSpec::make(2, AlgebraKind::gl);
    std::mt19937_64 rng(10);
    const PhasePoint p = random_point(2, rng);
    const Observable F = mixed_trace(2, 0);
    const Observable H = xi_trace(2, 0, spec.basis[1]);
    CHECK(std::abs(poisson_bracket(spec, F, F, p)) < 1e-12);
    CHECK(std::abs(poisson_bracket(spec, F, H, p) + poisson_bracket(spec, H, F, p)) <
          1e-12);
    CHECK(std::abs(poisson_bracket(spec, F, H, p) -
                   poisson_bracket_fd(spec, F, H, p, 1e-5)) < 1e-5);
    Observable constant;
    constant.eval = [](const PhasePoint&) { return complex{3.0}; };
    CHECK(std::abs(poisson_bracket_fd(spec, F, constant, p, 1e-5)) < 1e-8);
    Observable no_derivs;
    no_derivs.eval = constant.eval;
    CHECK_THROWS_AS(poisson_bracket(spec, F, no_derivs, p), DerivativeUnavailable);
}

TEST_CASE("jacobi identity for polynomial observables") {
    const AlgebraSpec spec = AlgebraSpec::make(2, AlgebraKind::gl);
    std::mt19937_64 rng(12);
    const PhasePoint p = random_point(1, rng);
    const Observable A = mixed_trace(1, 0);
    const Observable B = xi_trace(1, 0, spec.basis[2]);
    const Observable C = g_entry(1, 0, 0, 1);
    auto inner = [&](const Observable& f, const Observable& h) {
        Observable o;
        o.eval = [&spec, f, h](const PhasePoint& q) {
            return poisson_bracket(spec, f, h, q);
        };
        return o;
    };
    const complex cyc = poisson_bracket_fd(spec, A, inner(B, C), p, 1e-4) +
                        poisson_bracket_fd(spec, C, inner(A, B), p, 1e-4) +
                        poisson_bracket_fd(spec, B, inner(C, A), p, 1e-4);
    CHECK(std::abs(cyc) < 1e-6);
}

TEST_CASE("moment map values and projection") {
    const AlgebraSpec spec = AlgebraSpec::make(2, AlgebraKind::gl);
    std::mt19937_64 rng(14);
    PhasePoint p = random_point(2, rng);
    PhasePoint ident = p;
    ident.g[0] = ident.g[1] = Mat::Identity(2, 2);
    CHECK(moment_map(ident).norm() < 1e-14);

    PhasePoint single;
    Mat d(2, 2), e12 = Mat::Zero(2, 2);
    d << 2.0, 0.0, 0.0, 0.5;
    e12(0, 1) = 1.0;
    single.g = {d};
    single.xi = {e12};
    CHECK((moment_map(single) - 3.0 * e12).norm() < 1e-14);

    const PhasePoint projected = project_moment_zero(spec, p);
    CHECK(moment_map(projected).norm() < 1e-10);
}

TEST_CASE("contraction factor arithmetic") {
    SchottkyData s;
    s.pairs.push_back(hyperbolic_pair(0.4, 1.0));  // q = 0.16
    PhasePoint p;
    p.g = {Mat::Identity(2, 2)};
    p.xi = {Mat::Zero(2, 2)};
    CHECK(contraction_factor(p, s) == doctest::Approx(0.32));

    SchottkyData s01;
    s01.pairs.push_back(hyperbolic_pair(std::sqrt(0.1), 1.0));  // q = 0.1
    Mat d(2, 2);
    d << 2.0, 0.0, 0.0, 0.5;
    p.g = {d};
    CHECK(contraction_factor(p, s01) == doctest::Approx(0.8));  // 0.1·(4+4)
    CHECK_THROWS_AS(contraction_factor(p, reference_schottky(2)), IndexOutOfRange);
}

TEST_CASE("phase point validation") {
    const AlgebraSpec gl = AlgebraSpec::make(2, AlgebraKind::gl);
    const AlgebraSpec sl = AlgebraSpec::make(2, AlgebraKind::sl);
    std::mt19937_64 rng(16);
    PhasePoint p = random_point(1, rng);
    CHECK_NOTHROW(check_phase_point(gl, p));
    PhasePoint bad = p;
    bad.g[0] = Mat::Zero(2, 2);
    CHECK_THROWS_AS(check_phase_point(gl, bad), SingularGroupElement);
    CHECK_THROWS_AS(check_phase_point(sl, p), Error);  // det/trace constraints
}

TEST_CASE("moment map generates conjugation: bracket with tr xi(z)^2 vanishes") {
    const RunConfig cfg = make_reference(ReferenceKind::genus1);
    const AlgebraSpec spec = cfg.algebra();
    const complex z = fundamental_domain_samples(cfg.schottky, 1, 3)[0];
    const Observable inv =
        spectral_observable(spec, cfg.schottky, cfg.truncation, z, 2);
    Observable mom;
    mom.eval = [](const PhasePoint& q) { return moment_map(q)(0, 1); };
    CHECK(std::abs(poisson_bracket_fd(spec, mom, inv, cfg.phase, 1e-5)) < 1e-6);
}
