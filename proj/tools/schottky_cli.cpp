#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "schottky/config.hpp"
#include "schottky/verify.hpp"

using namespace schottky;

namespace {

int log_level() {
    const char* env = std::getenv("SCHOTTKY_LOG");
    return (env && *env) ? std::atoi(env) : 0;
}

void logline(const std::string& msg) {
    if (log_level() > 0) std::cerr << "[schottky] " << msg << "\n";
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> max_word_length;
    std::vector<std::string> tolerance_kv;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.max_word_length) cfg.truncation.max_word_length = *ov.max_word_length;
    for (const auto& kv : ov.tolerance_kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("--tolerance expects NAME=VALUE, got: " + kv);
        cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ConfigParseError("cannot open output file: " + path);
    return file;
}

const std::vector<std::string> kAllChecks = {
    "convergence", "twist",      "pairing", "antisymmetry", "rmatrix",
    "lemma3",      "involution", "dybe",    "basepoint",    "oracles"};

CheckReport run_check(const std::string& name, const PoincareEngine& eng,
                      const RunConfig& cfg) {
    const auto pts = fundamental_domain_samples(cfg.schottky, 4, cfg.seed);
    if (name == "convergence")
        return check_convergence(eng, cfg.sample_count, cfg.seed);
    if (name == "twist") return check_twist(eng, 20, cfg.tolerance("twist", 1e-7));
    if (name == "pairing") return check_pairing(eng, cfg.tolerance("pairing", 1e-8));
    if (name == "antisymmetry")
        return check_antisymmetry(eng, 10, cfg.seed, cfg.tolerance("antisymmetry", 1e-12));
    if (name == "rmatrix")
        return check_rmatrix(eng, 10, cfg.seed, cfg.tolerance("rmatrix", 1e-6));
    if (name == "lemma3")
        return check_lemma3_contours(eng, 0.05, cfg.tolerance("lemma3", 1e-6),
                                     cfg.tolerance("lemma3Intermediate", 1e-7), 128)
            .report;
    if (name == "involution")
        return check_involution(eng, pts[0], pts[1], 2, 2,
                                cfg.tolerance("involution", 1e-6));
    if (name == "dybe")
        return check_dybe(eng, pts[0], pts[1], pts[2], cfg.tolerance("dybe", 1e-5));
    if (name == "basepoint") {
        // The independence statement holds on the zero level of the moment map.
        const PhasePoint p0 = project_moment_zero(eng.algebra(), eng.phase());
        const PoincareEngine at_zero(eng.algebra(), eng.schottky(), p0, eng.policy());
        return check_basepoint(at_zero, pts[0], pts[1], pts[2],
                               cfg.tolerance("basepoint", 1e-7));
    }
    if (name == "oracles")
        return check_oracles(eng, 10, cfg.seed, cfg.tolerance("oracles", 1e-5));
    throw ConfigParseError("unknown check name: " + name);
}

int cmd_validate(const RunConfig& cfg) {
    const ValidationReport rep = validate(cfg.schottky);
    std::cout << rep.summary() << "\n";
    check_phase_point(cfg.algebra(), cfg.phase);
    const double kappa = contraction_factor(cfg.phase, cfg.schottky);
    std::cout << "lemma1-criterion: kappa = " << kappa
              << (kappa < 1.0 ? " (pass)" : " (FAIL)") << "\n";
    if (!rep.ok()) return 1;
    if (kappa >= 1.0) return 2;
    return 0;
}

int cmd_check(const RunConfig& cfg, std::vector<std::string> names,
              const std::string& out_path) {
    if (names.empty()) names = kAllChecks;
    for (const auto& n : names)
        if (std::find(kAllChecks.begin(), kAllChecks.end(), n) == kAllChecks.end()) {
            std::cerr << "unknown check name: " << n << "\nknown checks:";
            for (const auto& k : kAllChecks) std::cerr << " " << k;
            std::cerr << "\n";
            return 64;
        }
    const PoincareEngine eng(cfg.algebra(), cfg.schottky, cfg.phase, cfg.truncation);
    std::ofstream file;
    std::ostream& out = open_out(out_path, file);
    bool all_pass = true;
    for (const auto& n : names) {
        logline("running check: " + n);
        const CheckReport rep = run_check(n, eng, cfg);
        out << report_to_json(rep).dump() << "\n";
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? 0 : 1;
}

std::vector<int> parse_range(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

int cmd_scan(const RunConfig& cfg, const std::string& parameter,
             const std::string& range_text, const std::string& out_path) {
    const std::vector<int> values = parse_range(range_text);
    if (values.empty()) {
        std::cerr << "empty scan range\n";
        return 64;
    }
    std::ofstream file;
    std::ostream& out = open_out(out_path, file);
    out << "parameter,value,check,residual\n";
    if (parameter == "maxWordLength") {
        for (const int L : values) {
            RunConfig c = cfg;
            c.truncation.max_word_length = L;
            c.truncation.allow_partial = true;
            const PoincareEngine eng(c.algebra(), c.schottky, c.phase, c.truncation);
            for (const std::string& n : {"twist", "antisymmetry", "rmatrix", "dybe"}) {
                logline("scan L=" + std::to_string(L) + " check=" + n);
                const CheckReport rep = run_check(n, eng, c);
                out << parameter << "," << L << "," << n << "," << rep.residual << "\n";
            }
        }
        return 0;
    }
    if (parameter == "quadratureNodes") {
        const PoincareEngine eng(cfg.algebra(), cfg.schottky, cfg.phase, cfg.truncation);
        const auto f = [&](complex z) { return eng.xi(z).value; };
        for (const int N : values) {
            double worst = 0.0;
            for (int i = 0; i < cfg.schottky.genus(); ++i) {
                const Mat res = contour_integral_value(
                    ContourSpec(cfg.schottky.pairs[i].inner, N), f, 1e30);
                worst = std::max(worst, (res - cfg.phase.xi[i]).norm());
            }
            out << parameter << "," << N << ",pairing," << worst << "\n";
        }
        return 0;
    }
    std::cerr << "unknown scan parameter: " << parameter
              << " (expected maxWordLength or quadratureNodes)\n";
    return 64;
}

int cmd_make_reference(const std::string& kind_text, std::uint64_t seed,
                       const std::string& out_path) {
    const RunConfig cfg = make_reference(reference_kind_from_string(kind_text), seed);
    const ValidationReport rep = validate(cfg.schottky);
    if (!rep.ok() || contraction_factor(cfg.phase, cfg.schottky) >= 1.0) {
        std::cerr << "generated reference failed validation:\n" << rep.summary() << "\n";
        return 1;
    }
    if (out_path.empty())
        std::cout << config_to_json(cfg).dump(2) << "\n";
    else
        save_config(cfg, out_path);
    logline("reference written: " + (out_path.empty() ? "<stdout>" : out_path));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lax operators on Schottky-uniformized curves: build, verify, scan"};
    app.require_subcommand(1);

    std::string config_path, out_path, checks_csv, scan_param, scan_range, ref_kind;
    Overrides ov;
    std::uint64_t ref_seed = 1;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (needs_config) opt->required();
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--seed", ov.seed, "override sampling seed");
        sub->add_option("--max-word-length", ov.max_word_length,
                        "override truncation length");
        sub->add_option("--tolerance", ov.tolerance_kv, "override tolerance, NAME=VALUE");
    };

    auto* v = app.add_subcommand("validate", "validate a configuration");
    add_common(v, true);

    auto* c = app.add_subcommand("check", "run verification checks");
    add_common(c, true);
    c->add_option("--checks", checks_csv, "comma-separated check names (default: all)");

    auto* sc = app.add_subcommand("scan", "residual-vs-parameter CSV");
    add_common(sc, true);
    sc->add_option("parameter", scan_param, "maxWordLength | quadratureNodes")->required();
    sc->add_option("range", scan_range, "e.g. 0..8 or 64,128,256")->required();

    auto* mr = app.add_subcommand("make-reference", "emit a reference configuration");
    mr->add_option("kind", ref_kind, "genus1 | genus2")->required();
    mr->add_option("--out", out_path, "output path (default: stdout)");
    mr->add_option("--seed", ref_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (mr->parsed()) return cmd_make_reference(ref_kind, ref_seed, out_path);

        RunConfig cfg = load_config(config_path);
        apply_overrides(cfg, ov);
        if (v->parsed()) return cmd_validate(cfg);
        if (c->parsed()) {
            std::vector<std::string> names;
            std::stringstream ss(checks_csv);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) names.push_back(item);
            return cmd_check(cfg, names, out_path);
        }
        if (sc->parsed()) return cmd_scan(cfg, scan_param, scan_range, out_path);
    } catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const ConvergenceCriterionViolated& e) {
        std::cerr << "lemma1-criterion: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error [" << e.code << "]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
