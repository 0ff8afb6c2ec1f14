#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace persuasion {

// Exact rational arithmetic. GMP keeps values canonical: lowest terms,
// positive denominator.
using Rational = boost::multiprecision::mpq_rational;
using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

// Parses "p/q" or "p" with optional sign. Throws on anything else
// (including q = 0); never rounds.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t slash = text.find('/');
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool ok = (c >= '0' && c <= '9') || c == '/' ||
                  ((c == '+' || c == '-') && (i == 0 || text[i - 1] == '/'));
        if (!ok) throw std::invalid_argument("bad rational literal: " + text);
    }
    if (slash != std::string::npos &&
        (slash == 0 || slash + 1 == text.size() || text.find('/', slash + 1) != std::string::npos))
        throw std::invalid_argument("bad rational literal: " + text);
    try {
        using Int = boost::multiprecision::mpz_int;
        if (slash == std::string::npos) return Rational(Int(text));
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num) / Rational(den);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal: " + text);
    }
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline RatVec rat_vec(std::initializer_list<Rational> xs) { return RatVec(xs); }

inline Rational vec_sum(const RatVec& v) {
    Rational s = 0;
    for (const auto& x : v) s += x;
    return s;
}

inline Rational dot(const RatVec& a, const RatVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace persuasion
