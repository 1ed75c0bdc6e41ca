#pragma once

// Integer and modular arithmetic helpers shared by the whole library.
// Everything here is exact 64-bit arithmetic; 128-bit intermediates are
// used where products can exceed the 64-bit range.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcf {

using i64 = std::int64_t;
using i128 = __int128;
using cplx = std::complex<double>;

inline i64 ipow(i64 base, int exp) {
    i64 r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<i64>::max() / std::max<i64>(std::abs(base), 1))
            throw std::overflow_error("ipow overflow");
        r *= base;
    }
    return r;
}

// positive representative of x mod n, n > 0
inline i64 pmod(i64 x, i64 n) {
    i64 r = x % n;
    return r < 0 ? r + n : r;
}

inline i64 mul_mod(i64 a, i64 b, i64 n) { return i64((i128(a) * b) % n); }

inline i64 pow_mod(i64 base, i64 exp, i64 n) {
    i64 r = 1 % n;
    base = pmod(base, n);
    while (exp > 0) {
        if (exp & 1) r = mul_mod(r, base, n);
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    return r;
}

inline void ext_gcd(i64 a, i64 b, i64& g, i64& x, i64& y) {
    if (b == 0) { g = a; x = 1; y = 0; return; }
    i64 x1, y1;
    ext_gcd(b, a % b, g, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
}

// inverse of a mod n; throws when gcd(a, n) != 1
inline i64 inv_mod(i64 a, i64 n) {
    i64 g, x, y;
    ext_gcd(pmod(a, n), n, g, x, y);
    if (g != 1) throw std::domain_error("inv_mod: element not invertible mod " + std::to_string(n));
    return pmod(x, n);
}

inline int valuation(i64 n, i64 p) {
    if (n == 0) throw std::domain_error("valuation of zero");
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

inline bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    // deterministic Miller-Rabin for 64-bit inputs
    i64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        i64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < s - 1 && witness; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) witness = false;
        }
        if (witness) return false;
    }
    return true;
}

inline std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> out;
    if (n < 2) return out;
    std::vector<bool> comp(size_t(n) + 1, false);
    for (i64 i = 2; i <= n; ++i) {
        if (!comp[size_t(i)]) {
            out.push_back(i);
            for (i64 j = i * i; j <= n; j += i) comp[size_t(j)] = true;
        }
    }
    return out;
}

inline std::vector<std::pair<i64, int>> factorize(i64 n) {
    if (n <= 0) throw std::domain_error("factorize expects a positive integer");
    std::vector<std::pair<i64, int>> f;
    for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            f.emplace_back(p, e);
        }
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline bool is_squarefree(i64 d) {
    d = std::abs(d);
    if (d == 0) return false;
    for (i64 p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

// Legendre symbol (a|p) for odd prime p, extended at p=2 by the usual
// discriminant rule (a|2) = 0, 1, -1 for a even, a = +-1 (8), a = +-3 (8).
inline int kronecker_at_prime(i64 a, i64 p) {
    if (p == 2) {
        i64 r = pmod(a, 8);
        if (r % 2 == 0) return 0;
        return (r == 1 || r == 7) ? 1 : -1;
    }
    i64 r = pow_mod(a, (p - 1) / 2, p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

// Tonelli-Shanks square root mod an odd prime; requires (a|p) = 1.
inline i64 sqrt_mod(i64 a, i64 p) {
    a = pmod(a, p);
    if (a == 0) return 0;
    if (kronecker_at_prime(a, p) != 1) throw std::domain_error("sqrt_mod: not a quadratic residue");
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
    i64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    i64 z = 2;
    while (kronecker_at_prime(z, p) != -1) ++z;
    i64 m = s, c = pow_mod(z, q, p), t = pow_mod(a, q, p), r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        i64 t2 = t;
        int i = 0;
        while (t2 != 1) { t2 = mul_mod(t2, t2, p); ++i; }
        i64 b = pow_mod(c, i64(1) << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    return r;
}

inline i64 mult_order(i64 a, i64 n) {
    a = pmod(a, n);
    i64 x = a % n, ord = 1;
    while (x != 1 % n) {
        x = mul_mod(x, a, n);
        if (++ord > n) throw std::domain_error("mult_order: element not invertible");
    }
    return ord;
}

inline i64 primitive_root_mod_prime(i64 p) {
    if (p == 2) return 1;
    auto fac = factorize(p - 1);
    for (i64 g = 2; g < p; ++g) {
        bool ok = true;
        for (auto& [q, e] : fac)
            if (pow_mod(g, (p - 1) / q, p) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw std::logic_error("no primitive root found");
}

// generator of (Z/p^a)* for odd prime p
inline i64 primitive_root_mod_prime_power(i64 p, int a) {
    i64 g = primitive_root_mod_prime(p);
    if (a == 1) return g;
    // g or g + p generates (Z/p^2)*, and then all higher powers
    if (pow_mod(g, p - 1, p * p) == 1) g += p;
    return g;
}

// Neumaier-compensated accumulator; summation order is fixed by callers.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Reduced fraction with 64-bit parts; enough for ideal norms and K-lattice data.
struct Rational {
    i64 num = 0;
    i64 den = 1;

    Rational() = default;
    Rational(i64 n) : num(n), den(1) {}
    Rational(i64 n, i64 d) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        i64 g = std::gcd(std::abs(num), den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }
    Rational operator*(const Rational& o) const {
        Rational r;
        i64 g1 = std::gcd(std::abs(num), o.den), g2 = std::gcd(std::abs(o.num), den);
        r.num = (num / g1) * (o.num / g2);
        r.den = (den / g2) * (o.den / g1);
        r.reduce();
        return r;
    }
    Rational inverse() const {
        if (num == 0) throw std::domain_error("inverse of zero");
        return Rational(den, num);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool is_integer() const { return den == 1; }
    double to_double() const { return double(num) / double(den); }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

} // namespace bcf
