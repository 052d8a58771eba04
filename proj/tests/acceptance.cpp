// Acceptance run: one line per criterion, against both reference
// configurations (genus 1 and genus 2, n = 2).
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "schottky/config.hpp"
#include "schottky/verify.hpp"

using namespace schottky;

namespace {

int failures = 0;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

void line(int criterion, const std::string& name, bool pass, double residual,
          double tolerance, const std::string& extra = "") {
    std::printf("criterion %2d %-22s %s  residual=%.3e tol=%.1e%s%s\n", criterion,
                name.c_str(), pass ? "PASS" : "FAIL", residual, tolerance,
                extra.empty() ? "" : "  ", extra.c_str());
    if (!pass) ++failures;
}

struct Ref {
    std::string name;
    RunConfig cfg;
    AlgebraSpec spec;
    PoincareEngine eng;
    std::vector<complex> pts;

    explicit Ref(ReferenceKind kind, const std::string& name_)
        : name(name_),
          cfg(make_reference(kind)),
          spec(cfg.algebra()),
          eng(spec, cfg.schottky, cfg.phase, cfg.truncation),
          pts(fundamental_domain_samples(cfg.schottky, 12, cfg.seed)) {}
};

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    Ref g1(ReferenceKind::genus1, "genus1");
    Ref g2(ReferenceKind::genus2, "genus2");
    const std::vector<Ref*> refs = {&g1, &g2};

    // 1. Lemma 1 convergence: geometric shell decay with ratio ≤ κ + 0.05 and
    //    tail 1e-9 on both references (κ ≤ 0.5), under 30 s.
    {
        const auto c0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const CheckReport rep = check_convergence(r->eng, 10, r->cfg.seed);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass && r->eng.kappa() <= 0.5;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - c0)
                .count();
        line(1, "lemma1-convergence", pass && secs < 30.0, worst, 1.0,
             "runtime " + sci(secs) + " s");
    }

    // 2. Twist equivariance at 20 points per generator.
    {
        double worst = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const CheckReport rep = check_twist(r->eng, 20, 1e-7);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
        }
        line(2, "twist-equivariance", pass, worst, 1e-7);
    }

    // 3. Residue pairing with at most 1024 nodes.
    {
        double worst = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const CheckReport rep = check_pairing(r->eng, 1e-8, 1024);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
        }
        line(3, "residue-pairing", pass, worst, 1e-8);
    }

    // 4. s/r antisymmetry over matched truncation at 10 random pairs.
    {
        double worst = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const CheckReport rep = check_antisymmetry(r->eng, 10, r->cfg.seed, 1e-12);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
        }
        line(4, "rs-antisymmetry", pass, worst, 1e-12);
    }

    // 5. Eq. (4) bracket defect at 10 random pairs, with the analytic engine
    //    validated against finite differences on the constituent derivatives.
    {
        double worst = 0.0, fd_worst = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const CheckReport rep = check_rmatrix(r->eng, 10, r->cfg.seed, 1e-6);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
            const Observable F = xi_entry_observable(r->spec, r->cfg.schottky,
                                                     r->cfg.truncation, r->pts[0], 0, 1);
            const Observable H = xi_entry_observable(r->spec, r->cfg.schottky,
                                                     r->cfg.truncation, r->pts[1], 1, 0);
            const complex an = poisson_bracket(r->spec, F, H, r->cfg.phase);
            const complex fd = poisson_bracket_fd(r->spec, F, H, r->cfg.phase, 1e-5);
            fd_worst = std::max(fd_worst, std::abs(an - fd));
        }
        line(5, "rmatrix-identity", pass && fd_worst <= 1e-5, worst, 1e-6,
             "analytic-vs-fd " + sci(fd_worst));
    }

    // 6. Lemma 3 contours: all ‖C_ij‖ ≤ 1e-6 including i=j via Γ_i^ε, with
    //    the proof's intermediate identities at 1e-7.
    {
        double worst = 0.0, mid = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const Lemma3Result res = check_lemma3_contours(r->eng, 0.08, 1e-6, 1e-7, 128);
            worst = std::max(worst, res.report.residual);
            mid = std::max(mid, res.intermediate_residual);
            pass = pass && res.report.pass;
        }
        line(6, "lemma3-contours", pass, worst, 1e-6,
             "intermediates " + sci(mid));
    }

    // 7. Involution of tr ξ(z)² at 5 random pairs on genus 2.
    {
        double worst = 0.0;
        bool pass = true;
        for (int k = 0; k < 5; ++k) {
            const CheckReport rep = check_involution(g2.eng, g2.pts[2 * k],
                                                     g2.pts[2 * k + 1], 2, 2, 1e-6);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
        }
        line(7, "spectral-involution", pass, worst, 1e-6);
    }

    // 8. DYBE residual ≤ 1e-5, monotone decreasing in L, with the Jacobi
    //    oracle concurring at matched tolerance.
    {
        double worst = 0.0, jac_worst = 0.0;
        bool pass = true, monotone = true;
        for (Ref* r : refs) {
            double prev = 1e300;
            // L = 0 keeps only the rational CYBE term (exactly zero) and the
            // residual floors near 5e-10 by L = 5; monotone decrease is
            // measured on the geometric-decay stretch.
            for (const int L : {1, 3, r->cfg.truncation.max_word_length}) {
                TruncationPolicy t = r->cfg.truncation;
                t.max_word_length = L;
                t.allow_partial = true;
                const PoincareEngine eng(r->spec, r->cfg.schottky, r->cfg.phase, t);
                const CheckReport rep =
                    check_dybe(eng, r->pts[0], r->pts[1], r->pts[2], 1e-5);
                monotone = monotone && rep.residual < prev;
                prev = rep.residual;
                if (L == r->cfg.truncation.max_word_length) {
                    worst = std::max(worst, rep.residual);
                    pass = pass && rep.pass;
                }
            }
            jac_worst = std::max(
                jac_worst, jacobi_residual(r->spec, r->cfg.schottky, r->cfg.truncation,
                                           r->cfg.phase, r->pts[2], r->pts[0],
                                           r->pts[1], 4, r->cfg.seed));
        }
        line(8, "dybe", pass && monotone && jac_worst <= 1e-5, worst, 1e-5,
             std::string(monotone ? "monotone in L" : "NOT monotone") +
                 ", jacobi oracle " + sci(jac_worst));
    }

    // 9. Basepoint independence on a moment-zero point at 1e-7; on a generic
    //    point the z0-derivative follows the moment-map series at 1e-5.
    {
        double worst = 0.0, deriv = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const PhasePoint pz = project_moment_zero(r->spec, r->cfg.phase);
            const PoincareEngine emz(r->spec, r->cfg.schottky, pz, r->cfg.truncation);
            const CheckReport rep =
                check_basepoint(emz, r->pts[0], r->pts[1], r->pts[2], 1e-7);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
            deriv = std::max(deriv,
                             basepoint_derivative_residual(r->eng, r->pts[0], r->pts[1]));
        }
        line(9, "basepoint", pass && deriv <= 1e-5, worst, 1e-7,
             "generic-point derivative " + sci(deriv));
    }

    // 10. Derivative oracles at 50 random probes; whole suite under 5 min.
    {
        double worst = 0.0;
        bool pass = true;
        for (Ref* r : refs) {
            const CheckReport rep = check_oracles(r->eng, 50, r->cfg.seed, 1e-5);
            worst = std::max(worst, rep.residual);
            pass = pass && rep.pass;
        }
        const double total =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        line(10, "derivative-oracles", pass && total < 300.0, worst, 1e-5,
             "suite runtime " + sci(total) + " s");
    }

    return failures == 0 ? 0 : 1;
}
