#pragma once

// Exact arithmetic for K = Q or a quadratic field Q(sqrt(d)): the ring of
// integers O = Z[theta], prime splitting, and the semigroup/group of
// integral/fractional ideals in factored form.
//
// Basis convention: theta = sqrt(d) when d = 2,3 (mod 4) and
// theta = (1+sqrt(d))/2 when d = 1 (mod 4), so theta^2 = s1*theta + s0 with
// (s1, s0) = (0, d) resp. (1, (d-1)/4).

#include <map>
#include <optional>
#include <sstream>

#include "arith.hpp"

namespace bcf {

enum class FieldKind { rational, quadratic };

struct FieldSpec {
    FieldKind kind = FieldKind::rational;
    i64 d = 0;            // squarefree, absent (0) for Q
    i64 discriminant = 1; // d or 4d for quadratic, 1 for Q
    i64 s1 = 0, s0 = 0;   // theta^2 = s1*theta + s0 (quadratic only)
    bool is_imaginary = false;
    int w_K = 2;          // number of roots of unity
    bool cn1_imaginary = false;

    bool is_rational() const { return kind == FieldKind::rational; }
    bool is_quadratic() const { return kind == FieldKind::quadratic; }
    std::string name() const {
        if (is_rational()) return "Q";
        return "Q(sqrt" + std::to_string(d) + ")";
    }
};

inline FieldSpec make_field() {
    FieldSpec f;
    f.kind = FieldKind::rational;
    f.discriminant = 1;
    f.w_K = 2;
    return f;
}

inline FieldSpec make_field(i64 d) {
    if (d == 0 || d == 1) throw std::invalid_argument("make_field: d must not be 0 or 1");
    if (!is_squarefree(d)) throw std::invalid_argument("make_field: d must be squarefree");
    FieldSpec f;
    f.kind = FieldKind::quadratic;
    f.d = d;
    f.is_imaginary = d < 0;
    if (pmod(d, 4) == 1) {
        f.discriminant = d;
        f.s1 = 1;
        f.s0 = (d - 1) / 4;
    } else {
        f.discriminant = 4 * d;
        f.s1 = 0;
        f.s0 = d;
    }
    f.w_K = (d == -1) ? 4 : (d == -3) ? 6 : 2;
    static const i64 cn1[] = {-1, -2, -3, -7, -11, -19, -43, -67, -163};
    f.cn1_imaginary = std::find(std::begin(cn1), std::end(cn1), d) != std::end(cn1);
    return f;
}

// accepts "Q", "Q(sqrt-1)", "Q(sqrt5)"
inline FieldSpec parse_field(const std::string& s) {
    if (s == "Q") return make_field();
    if (s.rfind("Q(sqrt", 0) == 0 && s.back() == ')') {
        std::string body = s.substr(6, s.size() - 7);
        size_t pos = 0;
        i64 d = std::stoll(body, &pos);
        if (pos != body.size()) throw std::invalid_argument("parse_field: bad field descriptor '" + s + "'");
        return make_field(d);
    }
    throw std::invalid_argument("parse_field: bad field descriptor '" + s + "'");
}

// Element a + b*theta of O (b = 0 over Q).
struct OElement {
    i64 a = 0, b = 0;

    OElement() = default;
    OElement(i64 a_, i64 b_ = 0) : a(a_), b(b_) {}

    bool operator==(const OElement& o) const { return a == o.a && b == o.b; }
};

inline OElement mul(const FieldSpec& F, const OElement& x, const OElement& y) {
    if (F.is_rational()) return OElement(x.a * y.a);
    // (a+bt)(c+et) with t^2 = s1 t + s0
    return OElement(x.a * y.a + x.b * y.b * F.s0, x.a * y.b + x.b * y.a + x.b * y.b * F.s1);
}

inline OElement conj(const FieldSpec& F, const OElement& x) {
    if (F.is_rational()) return x;
    return OElement(x.a + x.b * F.s1, -x.b);
}

inline i64 elem_norm(const FieldSpec& F, const OElement& x) {
    if (F.is_rational()) return std::abs(x.a);
    return x.a * x.a + x.a * x.b * F.s1 - x.b * x.b * F.s0;
}

// All roots of unity of O; w_K elements for Q and imaginary quadratic fields.
inline std::vector<OElement> roots_of_unity(const FieldSpec& F) {
    if (F.is_rational() || !F.is_imaginary) return {OElement(1), OElement(-1)};
    std::vector<OElement> us;
    for (i64 a = -2; a <= 2; ++a)
        for (i64 b = -2; b <= 2; ++b)
            if (elem_norm(F, OElement(a, b)) == 1) us.emplace_back(a, b);
    return us;
}

struct PrimeIdeal {
    i64 p = 0;        // rational prime below
    int f = 1;        // residue degree (1 or 2)
    bool ramified = false;
    i64 root = 0;     // split case: root of the minimal polynomial of theta mod p

    i64 norm() const { return f == 2 ? p * p : p; }
    int ramification_index() const { return ramified ? 2 : 1; }

    friend bool operator==(const PrimeIdeal& x, const PrimeIdeal& y) {
        return x.p == y.p && x.f == y.f && x.ramified == y.ramified && x.root == y.root;
    }
    friend bool operator<(const PrimeIdeal& x, const PrimeIdeal& y) {
        if (x.norm() != y.norm()) return x.norm() < y.norm();
        if (x.p != y.p) return x.p < y.p;
        return x.root < y.root;
    }
    std::string str() const {
        std::string s = "p" + std::to_string(p);
        if (f == 1 && !ramified && root != 0) s += "r" + std::to_string(root);
        return s;
    }
};

// Double root of the minimal polynomial mod p at a ramified prime;
// theta - r is then a uniformizer (its norm has p-valuation exactly 1).
inline i64 ramified_double_root(const FieldSpec& F, i64 p) {
    if (p == 2) return pmod(F.s0, 2); // x^2 - d mod 2: root d mod 2
    return mul_mod(F.s1, inv_mod(2, p), p);
}

inline std::vector<PrimeIdeal> split_prime(const FieldSpec& F, i64 p) {
    if (!is_prime(p)) throw std::invalid_argument("split_prime: " + std::to_string(p) + " is not prime");
    if (F.is_rational()) return {PrimeIdeal{p, 1, false, 0}};
    int k = kronecker_at_prime(F.discriminant, p);
    if (k == 0) return {PrimeIdeal{p, 1, true, ramified_double_root(F, p)}};
    if (k == -1) return {PrimeIdeal{p, 2, false, 0}};
    // split: roots of x^2 - s1 x - s0 mod p
    i64 r1, r2;
    if (p == 2) {
        r1 = 0; r2 = 1; // only d = 1 (mod 8) splits at 2, and x^2 - x - s0 = x(x-1) mod 2
    } else {
        i64 sq = sqrt_mod(pmod(F.discriminant, p), p);
        i64 half = inv_mod(2, p);
        r1 = mul_mod(pmod(F.s1 + sq, p), half, p);
        r2 = mul_mod(pmod(F.s1 - sq, p), half, p);
    }
    if (r1 > r2) std::swap(r1, r2);
    return {PrimeIdeal{p, 1, false, r1}, PrimeIdeal{p, 1, false, r2}};
}

inline std::vector<PrimeIdeal> prime_ideals_up_to(const FieldSpec& F, i64 bound) {
    std::vector<PrimeIdeal> out;
    for (i64 p : primes_up_to(bound))
        for (const auto& P : split_prime(F, p))
            if (P.norm() <= bound) out.push_back(P);
    std::sort(out.begin(), out.end());
    return out;
}

// Fractional ideal in factored form; empty factor list is the unit ideal (1).
// Factors are kept sorted by the canonical prime order with nonzero exponents.
struct Ideal {
    std::vector<std::pair<PrimeIdeal, int>> factors;

    Ideal() = default;
    explicit Ideal(std::vector<std::pair<PrimeIdeal, int>> f) : factors(std::move(f)) { normalize(); }

    void normalize() {
        std::sort(factors.begin(), factors.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<std::pair<PrimeIdeal, int>> out;
        for (auto& [P, e] : factors) {
            if (!out.empty() && out.back().first == P)
                out.back().second += e;
            else
                out.emplace_back(P, e);
        }
        out.erase(std::remove_if(out.begin(), out.end(), [](const auto& x) { return x.second == 0; }),
                  out.end());
        factors = std::move(out);
    }

    bool is_unit() const { return factors.empty(); }
    bool is_integral() const {
        return std::all_of(factors.begin(), factors.end(), [](const auto& x) { return x.second > 0; });
    }
    int exponent(const PrimeIdeal& P) const {
        for (auto& [Q, e] : factors)
            if (Q == P) return e;
        return 0;
    }
    Rational norm() const {
        Rational n(1);
        for (auto& [P, e] : factors) {
            if (e > 0)
                n = n * Rational(ipow(P.norm(), e));
            else
                n = n * Rational(1, ipow(P.norm(), -e));
        }
        return n;
    }
    i64 norm_integral() const {
        i64 n = 1;
        for (auto& [P, e] : factors) {
            if (e < 0) throw std::domain_error("norm_integral on a non-integral ideal");
            n *= ipow(P.norm(), e);
        }
        return n;
    }
    Ideal operator*(const Ideal& o) const {
        Ideal r = *this;
        r.factors.insert(r.factors.end(), o.factors.begin(), o.factors.end());
        r.normalize();
        return r;
    }
    Ideal inverse() const {
        Ideal r = *this;
        for (auto& [P, e] : r.factors) e = -e;
        return r;
    }
    friend bool operator==(const Ideal& x, const Ideal& y) { return x.factors == y.factors; }
    friend bool operator<(const Ideal& x, const Ideal& y) {
        Rational nx = x.norm(), ny = y.norm();
        if (!(nx == ny)) return nx.num * i128(ny.den) < ny.num * i128(nx.den);
        return x.factors < y.factors;
    }
    std::string str() const {
        if (factors.empty()) return "1";
        std::ostringstream os;
        bool first = true;
        for (auto& [P, e] : factors) {
            if (!first) os << "*";
            first = false;
            os << P.str();
            if (e != 1) os << "^" << e;
        }
        return os.str();
    }
};

inline Ideal unit_ideal() { return Ideal(); }

inline Ideal principal_ideal(const FieldSpec& F, i64 n) {
    if (n == 0) throw std::invalid_argument("principal_ideal: zero");
    n = std::abs(n);
    std::vector<std::pair<PrimeIdeal, int>> fs;
    for (auto& [p, e] : factorize(n))
        for (const auto& P : split_prime(F, p)) {
            // valuation of the rational integer n at P: e per ramification index
            fs.emplace_back(P, e * P.ramification_index());
        }
    return Ideal(fs);
}

inline Rational ideal_norm(const FieldSpec&, const Ideal& a) { return a.norm(); }

// All integral ideals of norm <= B, ordered by (norm, factorization).  Norms
// are tracked through the recursion so the sort never recomputes them.
inline std::vector<Ideal> enumerate_ideals(const FieldSpec& F, i64 B) {
    if (B < 1) throw std::invalid_argument("enumerate_ideals: bound must be >= 1");
    std::vector<PrimeIdeal> ps = prime_ideals_up_to(F, B);
    std::vector<std::pair<i64, Ideal>> out;
    std::vector<std::pair<PrimeIdeal, int>> cur;
    // depth-first over the sorted prime list keeps each factorization
    // canonical; once a prime no longer fits the norm budget, none of the
    // later ones do either, so the remaining exponents are forced to zero
    auto rec = [&](auto&& self, size_t i, i64 norm) -> void {
        if (i == ps.size() || ps[i].norm() > B / norm) {
            out.emplace_back(norm, Ideal{cur});
            return;
        }
        self(self, i + 1, norm);
        i64 q = ps[i].norm();
        int e = 0;
        while (norm <= B / q) {
            norm *= q;
            ++e;
            if (e == 1)
                cur.emplace_back(ps[i], 1);
            else
                cur.back().second = e;
            self(self, i + 1, norm);
        }
        if (e > 0) cur.pop_back();
    };
    rec(rec, 0, 1);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second.factors < y.second.factors;
    });
    std::vector<Ideal> ideals;
    ideals.reserve(out.size());
    for (auto& [n, a] : out) ideals.push_back(std::move(a));
    return ideals;
}

// Enumerate the integral ideals supported on the given primes with norm <= cap
// (the "smooth" ideals of the Euler product), ordered like enumerate_ideals.
inline std::vector<Ideal> enumerate_smooth_ideals(std::vector<PrimeIdeal> ps, i64 cap) {
    std::sort(ps.begin(), ps.end()); // the budget cutoff needs ascending norms
    std::vector<Ideal> out;
    std::vector<std::pair<PrimeIdeal, int>> cur;
    auto rec = [&](auto&& self, size_t i, i64 norm) -> void {
        if (i == ps.size() || ps[i].norm() > cap / norm) {
            out.emplace_back(Ideal{cur});
            return;
        }
        self(self, i + 1, norm);
        i64 q = ps[i].norm();
        int e = 0;
        while (norm <= cap / q) {
            norm *= q;
            ++e;
            if (e == 1)
                cur.emplace_back(ps[i], 1);
            else
                cur.back().second = e;
            self(self, i + 1, norm);
        }
        if (e > 0) cur.pop_back();
    };
    rec(rec, 0, 1);
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

// smallest generator search radius: any element of norm n has |a|,|b| bounded
// in terms of n for imaginary fields
inline i64 coeff_bound_for_norm(const FieldSpec& F, i64 n) {
    // N(a+bt) = a^2 + s1 ab - s0 b^2 >= (a + s1 b/2)^2 + |D|/4 b^2 for d < 0
    double disc = std::abs(double(F.discriminant));
    return i64(std::sqrt(4.0 * double(n) / disc) + std::sqrt(double(n)) + 2);
}

} // namespace detail

// A generator of the prime ideal P over a cn1 imaginary field (or Q).
inline OElement prime_generator(const FieldSpec& F, const PrimeIdeal& P) {
    if (F.is_rational()) return OElement(P.p);
    if (!F.cn1_imaginary) throw std::domain_error("prime_generator: field must be cn1 imaginary");
    if (P.f == 2) return OElement(P.p);
    i64 target = P.p;
    i64 r = P.ramified ? ramified_double_root(F, P.p) : P.root;
    i64 bound = detail::coeff_bound_for_norm(F, target);
    for (i64 b = -bound; b <= bound; ++b)
        for (i64 a = -bound; a <= bound; ++a) {
            OElement x(a, b);
            if (elem_norm(F, x) == target && pmod(a + b * r, P.p) == 0) return x;
        }
    throw std::logic_error("prime_generator: no generator found (field not class number one?)");
}

// Canonical associate: maximal first coordinate, ties broken by the minimal
// nonnegative second coordinate (least negative when no associate at the
// maximal first coordinate has b >= 0).
inline OElement canonical_associate(const FieldSpec& F, const OElement& x) {
    auto rank = [](const OElement& y) {
        return std::tuple<i64, int, i64>(-y.a, y.b < 0 ? 1 : 0, y.b < 0 ? -y.b : y.b);
    };
    OElement best = x;
    for (const auto& u : roots_of_unity(F)) {
        OElement y = mul(F, u, x);
        if (rank(y) < rank(best)) best = y;
    }
    return best;
}

// Canonical generator of an integral ideal over a cn1 imaginary field.
inline OElement canonical_generator(const FieldSpec& F, const Ideal& a) {
    if (!F.cn1_imaginary && !F.is_rational())
        throw std::domain_error("canonical_generator: unsupported field " + F.name());
    if (!a.is_integral()) throw std::domain_error("canonical_generator: ideal must be integral");
    if (F.is_rational()) {
        i64 n = 1;
        for (auto& [P, e] : a.factors) n *= ipow(P.p, e);
        return OElement(n);
    }
    OElement g(1);
    for (auto& [P, e] : a.factors) {
        OElement gp = prime_generator(F, P);
        for (int i = 0; i < e; ++i) g = mul(F, g, gp);
    }
    return canonical_associate(F, g);
}

} // namespace bcf
