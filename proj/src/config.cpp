#include "schottky/config.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace schottky {

using nlohmann::json;

double RunConfig::tolerance(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

namespace {

json complex_to_json(complex z) { return json::array({z.real(), z.imag()}); }

complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigParseError("complex value must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Mat matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigParseError("matrix must be a row array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols)
            throw ConfigParseError("ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
    }
    return m;
}

json circle_to_json(const Circle& c) {
    return {{"center", complex_to_json(c.center)}, {"radius", c.radius}};
}

Circle circle_from_json(const json& j) {
    return {complex_from_json(j.at("center")), j.at("radius").get<double>()};
}

json moebius_to_json(const MoebiusMap& m) {
    return {{"a", complex_to_json(m.a)},
            {"b", complex_to_json(m.b)},
            {"c", complex_to_json(m.c)},
            {"d", complex_to_json(m.d)}};
}

MoebiusMap moebius_from_json(const json& j) {
    return {complex_from_json(j.at("a")), complex_from_json(j.at("b")),
            complex_from_json(j.at("c")), complex_from_json(j.at("d"))};
}

}  // namespace

json config_to_json(const RunConfig& cfg) {
    json pairs = json::array();
    for (const auto& p : cfg.schottky.pairs)
        pairs.push_back({{"gamma", moebius_to_json(p.gamma)},
                         {"inner", circle_to_json(p.inner)},
                         {"outer", circle_to_json(p.outer)}});
    json g = json::array(), xi = json::array();
    for (const auto& m : cfg.phase.g) g.push_back(matrix_to_json(m));
    for (const auto& m : cfg.phase.xi) xi.push_back(matrix_to_json(m));
    return {{"algebra", {{"n", cfg.n}, {"kind", to_string(cfg.kind)}}},
            {"schottky", {{"pairs", pairs}}},
            {"phase", {{"g", g}, {"xi", xi}}},
            {"truncation",
             {{"maxWordLength", cfg.truncation.max_word_length},
              {"targetTail", cfg.truncation.target_tail},
              {"capacity", cfg.truncation.capacity}}},
            {"tolerances", cfg.tolerances},
            {"samples", {{"count", cfg.sample_count}, {"seed", cfg.seed}}},
            {"outputPath", cfg.output_path}};
}

RunConfig config_from_json(const json& j) {
    try {
        RunConfig cfg;
        cfg.n = j.at("algebra").at("n").get<int>();
        cfg.kind = algebra_kind_from_string(j.at("algebra").at("kind").get<std::string>());
        for (const auto& p : j.at("schottky").at("pairs")) {
            cfg.schottky.pairs.push_back({moebius_from_json(p.at("gamma")),
                                          circle_from_json(p.at("inner")),
                                          circle_from_json(p.at("outer"))});
        }
        for (const auto& m : j.at("phase").at("g")) cfg.phase.g.push_back(matrix_from_json(m));
        for (const auto& m : j.at("phase").at("xi"))
            cfg.phase.xi.push_back(matrix_from_json(m));
        const auto& t = j.at("truncation");
        cfg.truncation.max_word_length = t.at("maxWordLength").get<int>();
        cfg.truncation.target_tail = t.at("targetTail").get<double>();
        cfg.truncation.capacity = t.at("capacity").get<std::size_t>();
        if (j.contains("tolerances"))
            cfg.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
        if (j.contains("samples")) {
            cfg.sample_count = j.at("samples").value("count", 10);
            cfg.seed = j.at("samples").value("seed", std::uint64_t{1});
        }
        cfg.output_path = j.value("outputPath", std::string{});
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigParseError(e.what());
    } catch (const Error&) {
        throw;
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigParseError("cannot open output file: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

ReferenceKind reference_kind_from_string(const std::string& s) {
    if (s == "genus1") return ReferenceKind::genus1;
    if (s == "genus2") return ReferenceKind::genus2;
    throw ConfigParseError("unknown reference kind: " + s);
}

SchottkyPair hyperbolic_pair(double lambda, complex rotate) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ConfigParseError("lambda must lie in (0,1)");
    const double ch = 0.5 * (lambda + 1.0 / lambda);
    const double sh = 0.5 * (1.0 / lambda - lambda);
    // Conjugate of diag(λ, 1/λ) with fixed points ±rotate; Γ and Γ' are the
    // isometric circles of γ and γ^{-1}.
    const MoebiusMap gamma{ch, rotate * sh, sh / rotate, ch};
    const double radius = std::abs(rotate) / sh;
    const complex coth = rotate * (ch / sh);
    return {gamma, Circle{-coth, radius}, Circle{coth, radius}};
}

SchottkyData reference_schottky(int genus, double lambda) {
    if (genus < 1) throw ConfigParseError("genus must be at least 1");
    SchottkyData s;
    for (int k = 0; k < genus; ++k) {
        const double angle = M_PI * k / genus;
        s.pairs.push_back(hyperbolic_pair(lambda, std::polar(1.0, angle)));
    }
    return s;
}

RunConfig make_reference(ReferenceKind kind, std::uint64_t seed) {
    RunConfig cfg;
    cfg.n = 2;
    cfg.kind = AlgebraKind::gl;
    const int genus = (kind == ReferenceKind::genus1) ? 1 : 2;
    // Genus 2 uses a smaller multiplier: with two generators the shells grow
    // threefold per length step, and λ=0.1 leaves circle-boundary tails just
    // above the 1e-9 target at L=8.
    cfg.schottky = reference_schottky(genus, genus == 1 ? 0.1 : 0.05);
    cfg.seed = seed;
    cfg.truncation = TruncationPolicy{8, 1e-9, 2'000'000, false};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    auto random_matrix = [&](int n) {
        Mat m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = complex{unif(rng), unif(rng)};
        return m;
    };

    std::vector<Mat> offsets, xis;
    for (int i = 0; i < genus; ++i) {
        offsets.push_back(random_matrix(cfg.n));
        Mat xi = random_matrix(cfg.n);
        xi /= xi.norm();
        xis.push_back(std::move(xi));
    }
    double scale = 0.7;
    for (int attempt = 0; attempt < 60; ++attempt) {
        PhasePoint p;
        for (int i = 0; i < genus; ++i) {
            p.g.push_back(Mat::Identity(cfg.n, cfg.n) + scale * offsets[i]);
            p.xi.push_back(xis[i]);
        }
        if (contraction_factor(p, cfg.schottky) <= 0.5) {
            cfg.phase = std::move(p);
            return cfg;
        }
        scale *= 0.5;
    }
    throw Error("ReferenceConstruction", "could not reach contraction factor 0.5");
}

std::vector<complex> fundamental_domain_samples(const SchottkyData& s, int count,
                                                std::uint64_t seed) {
    const auto circles = s.all_circles();
    double extent = 1.0, min_radius = 1.0;
    for (const auto& c : circles) {
        extent = std::max(extent, std::abs(c.center) + 3.0 * c.radius);
        min_radius = std::min(min_radius, c.radius);
    }
    std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
    std::uniform_real_distribution<double> unif(-extent, extent);
    std::vector<complex> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++guard > 100000)
            throw Error("SamplingFailed", "cannot place fundamental-domain samples");
        const complex z{unif(rng), unif(rng)};
        bool clear = true;
        for (const auto& c : circles)
            if (std::abs(z - c.center) < c.radius * 1.2 + 0.2 * min_radius) clear = false;
        if (clear) out.push_back(z);
    }
    return out;
}

}  // namespace schottky
