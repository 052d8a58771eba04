#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schottky/linalg.hpp"

namespace schottky {

// Point of the Riemann sphere; infinity is tagged, never a large float.
struct ExtComplex {
    complex value{};
    bool infinite = false;

    static ExtComplex inf() { return {complex{}, true}; }
    static ExtComplex at(complex z) { return {z, false}; }

    complex finite() const;  // throws PoleAtZ if infinite
};

bool sphere_close(const ExtComplex& a, const ExtComplex& b, double tol = 1e-10);

// Element of SL(2,C) acting on the sphere by z -> (az+b)/(cz+d).
// The constructor rescales so that ad - bc = 1.
struct MoebiusMap {
    complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    MoebiusMap() = default;
    MoebiusMap(complex a_, complex b_, complex c_, complex d_);

    static MoebiusMap identity() { return {}; }
    // Coefficients already known to have det = 1 (products of unimodular
    // maps); skips the normalization, whose determinant evaluation is
    // ill-conditioned for long compositions.
    static MoebiusMap unimodular(complex a_, complex b_, complex c_, complex d_);

    ExtComplex apply(const ExtComplex& z) const;
    ExtComplex apply(complex z) const { return apply(ExtComplex::at(z)); }

    // d/dz of the action, 1/(cz+d)².
    complex derivative(complex z) const;

    MoebiusMap inverse() const { return unimodular(d, -b, -c, a); }
    complex trace() const { return a + d; }
    bool is_loxodromic(double tol = 1e-10) const;
};

MoebiusMap compose(const MoebiusMap& f, const MoebiusMap& g);

// (attracting, repelling); throws ParabolicOrIdentity when trace² = 4.
std::pair<ExtComplex, ExtComplex> fixed_points(const MoebiusMap& m);

// q with |q| < 1; the square of the small eigenvalue.
complex multiplier(const MoebiusMap& m);

struct Circle {
    complex center{};
    double radius = 1.0;

    Circle() = default;
    Circle(complex center_, double radius_);

    complex point(double angle) const;
    bool strictly_inside(complex z, double margin = 0.0) const;
};

struct SchottkyPair {
    MoebiusMap gamma;
    Circle inner;  // Γ_i, contains γ_i^{-1}(∞)
    Circle outer;  // Γ'_i = γ_i(Γ_i)
};

struct SchottkyData {
    std::vector<SchottkyPair> pairs;

    int genus() const { return static_cast<int>(pairs.size()); }
    std::vector<Circle> all_circles() const;
    // γ_i^{-1}(∞) = -d_i/c_i, the pole of the identity-word kernel.
    complex pole(int i) const;
};

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0;  // positive margins are good
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool ok() const;
    std::string summary() const;
};

ValidationReport validate(const SchottkyData& s, double eps_geom = -1.0);

struct Letter {
    int gen = 0;   // 0-based generator index
    int sign = 1;  // ±1

    bool operator==(const Letter&) const = default;
};

// Reduced word in the free group on l generators.
struct Word {
    Word() = default;
    explicit Word(std::vector<Letter> letters);  // throws if not reduced

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    // Appends a letter; throws if it would cancel against the last one.
    Word extended(Letter next) const;
    std::string str() const;

  private:
    std::vector<Letter> letters_;
};

bool is_reduced(const std::vector<Letter>& letters);

// All reduced words of length ≤ max_length, length-then-lexicographic.
std::vector<Word> enumerate_words(int num_generators, int max_length,
                                  std::size_t capacity = 2'000'000);

std::size_t reduced_word_count(int num_generators, int max_length);

MoebiusMap word_to_map(const Word& w, const SchottkyData& s);

}  // namespace schottky
