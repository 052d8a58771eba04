#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "schottky/poincare.hpp"

namespace schottky {

// Everything a batch run needs: geometry, phase point, truncation,
// per-check tolerances, sampling parameters.
struct RunConfig {
    int n = 2;
    AlgebraKind kind = AlgebraKind::gl;
    SchottkyData schottky;
    PhasePoint phase;
    TruncationPolicy truncation;
    std::map<std::string, double> tolerances;
    int sample_count = 10;
    std::uint64_t seed = 1;
    std::string output_path;

    AlgebraSpec algebra() const { return AlgebraSpec::make(n, kind); }
    double tolerance(const std::string& name, double fallback) const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

enum class ReferenceKind { genus1, genus2 };
ReferenceKind reference_kind_from_string(const std::string& s);

// Hyperbolic generator pairing its isometric circles, fixed points ±1
// rotated by `rotate`; |multiplier| = lambda².
SchottkyPair hyperbolic_pair(double lambda, complex rotate);

// Well-separated isometric-circle Schottky data of the given genus.
SchottkyData reference_schottky(int genus, double lambda = 0.1);

// Seeded reference configuration with g_i scaled toward the identity until
// the contraction factor is at most 0.5 and unit-norm ξ_i.
RunConfig make_reference(ReferenceKind kind, std::uint64_t seed = 1);

// Sample points in the fundamental domain, away from every disc.
std::vector<complex> fundamental_domain_samples(const SchottkyData& s, int count,
                                                std::uint64_t seed);

}  // namespace schottky
