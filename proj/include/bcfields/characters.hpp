#pragma once

// Dirichlet characters mod m, indexed by exponent vectors over the canonical
// cyclic decomposition of (Z/m)*: odd prime powers via their smallest
// primitive root, the 2-part via {-1, 5}.  Characters act on ideals through
// the norm: chi(a) = chi(N(a) mod m), zero when gcd(N(a), m) > 1.

#include "number_field.hpp"

namespace bcf {

struct Character {
    i64 modulus = 1;
    std::vector<int> exponents;       // one entry per cyclic factor
    std::vector<cplx> table;          // chi on residues mod m; 0 off units

    bool is_trivial() const {
        for (int e : exponents)
            if (e != 0) return false;
        return true;
    }
    cplx operator()(i64 n) const { return table[size_t(pmod(n, modulus))]; }
    std::string str() const {
        std::string s = std::to_string(modulus) + ":";
        for (size_t i = 0; i < exponents.size(); ++i) s += (i ? "," : "") + std::to_string(exponents[i]);
        if (exponents.empty()) s += "0";
        return s;
    }
};

namespace detail {

struct CyclicFactor {
    i64 generator; // residue mod m (CRT-lifted)
    i64 order;
};

inline std::vector<CyclicFactor> unit_group_decomposition(i64 m) {
    std::vector<CyclicFactor> fs;
    auto crt_lift = [&](i64 g, i64 q) {
        // residue mod m that is g mod q and 1 mod m/q
        i64 rest = m / q;
        if (rest == 1) return pmod(g, m);
        i64 x = mul_mod(mul_mod(pmod(g, q), rest % m, m), inv_mod(rest % q, q), m);
        return pmod(x + mul_mod(q % m, inv_mod(q % rest, rest), m), m);
    };
    for (auto& [p, a] : factorize(m)) {
        i64 q = ipow(p, a);
        if (p == 2) {
            if (a == 1) continue; // (Z/2)* trivial
            if (a == 2) {
                fs.push_back({crt_lift(3, q), 2});
            } else {
                fs.push_back({crt_lift(q - 1, q), 2});
                fs.push_back({crt_lift(5, q), i64(1) << (a - 2)});
            }
        } else {
            i64 g = primitive_root_mod_prime_power(p, int(a));
            fs.push_back({crt_lift(g, q), ipow(p, int(a - 1)) * (p - 1)});
        }
    }
    return fs;
}

// exact value of exp(2*pi*i*num/den) at the quarter points, cos/sin otherwise
inline cplx root_of_unity(i64 num, i64 den) {
    num = pmod(num, den);
    if (4 * num % den == 0) {
        switch (4 * num / den) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        case 3: return {0.0, -1.0};
        }
    }
    double t = 2.0 * M_PI * double(num) / double(den);
    return {std::cos(t), std::sin(t)};
}

} // namespace detail

inline Character make_character(i64 m, const std::vector<int>& exponents) {
    if (m < 1) throw std::invalid_argument("make_character: modulus must be >= 1");
    auto fs = detail::unit_group_decomposition(m);
    if (exponents.size() != fs.size())
        throw std::invalid_argument("make_character: exponent vector has " +
                                    std::to_string(exponents.size()) + " entries, expected " +
                                    std::to_string(fs.size()));
    for (size_t i = 0; i < fs.size(); ++i)
        if (exponents[i] < 0 || exponents[i] >= fs[i].order)
            throw std::invalid_argument("make_character: exponent " + std::to_string(exponents[i]) +
                                        " out of range for factor of order " + std::to_string(fs[i].order));
    Character chi;
    chi.modulus = m;
    chi.exponents = exponents;
    chi.table.assign(size_t(m), cplx(0.0, 0.0));

    // walk the whole group as exponent tuples on the generators
    i64 total = 1;
    for (auto& f : fs) total *= f.order;
    std::vector<i64> idx(fs.size(), 0);
    for (i64 count = 0; count < total; ++count) {
        i64 r = 1 % m;
        i64 phase_num = 0, phase_den = 1;
        for (size_t i = 0; i < fs.size(); ++i) {
            r = mul_mod(r, pow_mod(fs[i].generator, idx[i], m), m);
            // accumulate exponents[i] * idx[i] / order_i
            i64 g = std::gcd(phase_den, fs[i].order);
            i64 den = phase_den / g * fs[i].order;
            phase_num = phase_num * (den / phase_den) + exponents[i] * idx[i] * (den / fs[i].order);
            phase_den = den;
            phase_num = pmod(phase_num, phase_den);
        }
        chi.table[size_t(r)] = detail::root_of_unity(phase_num, phase_den);
        for (size_t i = 0; i < fs.size(); ++i) {
            if (++idx[i] < fs[i].order) break;
            idx[i] = 0;
        }
    }
    if (m == 1) chi.table[0] = cplx(1.0, 0.0); // chi mod 1 is identically 1
    return chi;
}

inline Character trivial_character() { return make_character(1, {}); }

inline cplx char_on_ideal(const FieldSpec&, const Character& chi, const Ideal& a) {
    if (!a.is_integral()) throw std::invalid_argument("char_on_ideal: ideal must be integral");
    return chi(a.norm_integral() % chi.modulus);
}

inline cplx char_on_prime(const Character& chi, const PrimeIdeal& P) { return chi(P.norm() % chi.modulus); }

// prime ideals of F over the rational primes dividing the character modulus
inline std::vector<PrimeIdeal> character_ramified_primes(const FieldSpec& F, const Character& chi) {
    std::vector<PrimeIdeal> out;
    for (auto& [p, e] : factorize(chi.modulus))
        for (auto& P : split_prime(F, p)) out.push_back(P);
    std::sort(out.begin(), out.end());
    return out;
}

// parses "m:e1,e2,..." (exponents optional for m with trivial unit group)
inline Character parse_character(const std::string& s) {
    auto colon = s.find(':');
    i64 m = std::stoll(colon == std::string::npos ? s : s.substr(0, colon));
    std::vector<int> exps;
    if (colon != std::string::npos && colon + 1 < s.size()) {
        std::string rest = s.substr(colon + 1);
        size_t pos = 0;
        while (pos < rest.size()) {
            size_t next = rest.find(',', pos);
            if (next == std::string::npos) next = rest.size();
            exps.push_back(std::stoi(rest.substr(pos, next - pos)));
            pos = next + 1;
        }
    }
    return make_character(m, exps);
}

} // namespace bcf
