#pragma once

// Finite quotients O/m for an integral ideal m = prod P^k, with exact
// componentwise arithmetic.
//
// Component representations per prime power P^k:
//   * rational or split P: a single residue mod p^k, using the Hensel lift
//     of the root of the minimal polynomial of theta;
//   * inert P: a pair (a, b) mod p^k in the basis {1, theta};
//   * ramified P: a pair in the basis {1, theta} at the pair precision
//     ceil(k/2); for odd k the representative is canonicalized modulo
//     p^j * P (k = 2j+1), leaving a in [0, p^{j+1}) and b in [0, p^j).
// In every case the component has exactly N(P)^k distinct values.

#include "number_field.hpp"

namespace bcf {

enum class CompKind { single, pair_inert, pair_ramified };

struct ComponentShape {
    PrimeIdeal prime;
    int depth = 1;   // k
    CompKind kind = CompKind::single;
    i64 mod_a = 1;   // canonical range of the first coordinate
    i64 mod_b = 1;   // canonical range of the second coordinate
    i64 root = 0;    // Hensel-lifted root (single) or the double root (ramified)

    i64 card() const { return mod_a * mod_b; }
};

// residue of one component; (a, b) canonical per the shape
struct CompValue {
    i64 a = 0, b = 0;
    bool operator==(const CompValue& o) const { return a == o.a && b == o.b; }
};

// Lift the root r0 of x^2 - s1 x - s0 from mod p to mod p^k (simple root).
inline i64 hensel_lift_root(const FieldSpec& F, i64 p, i64 r0, int k) {
    i64 mod = p, r = pmod(r0, p);
    for (int i = 1; i < k; ++i) {
        mod *= p;
        i64 fr = pmod(i64((i128(r) * r - i128(F.s1) * r - F.s0) % mod), mod);
        i64 fpr = pmod(2 * r - F.s1, mod);
        r = pmod(r - i64((i128(fr) * inv_mod(fpr, mod)) % mod), mod);
    }
    return r;
}

inline ComponentShape make_component_shape(const FieldSpec& F, const PrimeIdeal& P, int depth) {
    if (depth < 1) throw std::invalid_argument("component depth must be >= 1");
    ComponentShape s;
    s.prime = P;
    s.depth = depth;
    if (F.is_rational()) {
        s.kind = CompKind::single;
        s.mod_a = ipow(P.p, depth);
    } else if (P.ramified) {
        s.kind = CompKind::pair_ramified;
        int j = depth / 2;
        s.root = ramified_double_root(F, P.p);
        if (depth % 2 == 0) {
            s.mod_a = ipow(P.p, j);
            s.mod_b = s.mod_a;
        } else {
            s.mod_a = ipow(P.p, j + 1);
            s.mod_b = ipow(P.p, j);
        }
    } else if (P.f == 2) {
        s.kind = CompKind::pair_inert;
        s.mod_a = ipow(P.p, depth);
        s.mod_b = s.mod_a;
    } else {
        s.kind = CompKind::single;
        s.mod_a = ipow(P.p, depth);
        s.root = hensel_lift_root(F, P.p, P.root, depth);
    }
    return s;
}

namespace detail {

// canonicalize a raw pair (a, b) for a ramified component of odd depth:
// kill the top digit of b using the relation p^j * (theta - r) = 0 in O/P^k
inline CompValue canon_ramified(const ComponentShape& s, i64 a, i64 b) {
    CompValue v;
    if (s.mod_a == s.mod_b) { // even depth
        v.a = pmod(a, s.mod_a);
        v.b = pmod(b, s.mod_b);
        return v;
    }
    i64 pj = s.mod_b;          // p^j
    i64 pj1 = s.mod_a;         // p^{j+1}
    a = pmod(a, pj1);
    b = pmod(b, pj1);
    i64 t = b / pj;
    v.b = b - t * pj;
    v.a = pmod(a + t * pj * s.root, pj1);
    return v;
}

} // namespace detail

inline CompValue comp_canon(const ComponentShape& s, i64 a, i64 b) {
    switch (s.kind) {
    case CompKind::single: return CompValue{pmod(a, s.mod_a), 0};
    case CompKind::pair_inert: return CompValue{pmod(a, s.mod_a), pmod(b, s.mod_b)};
    case CompKind::pair_ramified: return detail::canon_ramified(s, a, b);
    }
    return {};
}

// image of x = a + b*theta in this component
inline CompValue comp_reduce_element(const FieldSpec&, const ComponentShape& s, const OElement& x) {
    if (s.kind == CompKind::single)
        return comp_canon(s, x.a + i64(i128(x.b) * s.root % s.mod_a), 0);
    return comp_canon(s, x.a, x.b);
}

inline CompValue comp_add(const ComponentShape& s, const CompValue& x, const CompValue& y) {
    return comp_canon(s, x.a + y.a, x.b + y.b);
}

inline CompValue comp_neg(const ComponentShape& s, const CompValue& x) {
    return comp_canon(s, -x.a, -x.b);
}

inline CompValue comp_mul(const FieldSpec& F, const ComponentShape& s, const CompValue& x, const CompValue& y) {
    if (s.kind == CompKind::single)
        return comp_canon(s, i64(i128(x.a) * y.a % s.mod_a), 0);
    i64 m = s.mod_a; // enough precision: changing a product coordinate by mod_a stays in the class
    i64 a = i64((i128(x.a) * y.a + i128(x.b) * y.b % m * F.s0) % m);
    i64 b = i64((i128(x.a) * y.b + i128(x.b) * y.a + i128(x.b) * y.b % m * F.s1) % m);
    return comp_canon(s, a, b);
}

inline bool comp_is_zero(const CompValue& x) { return x.a == 0 && x.b == 0; }

// valuation of the residue class, capped at the component depth
inline int comp_valuation(const FieldSpec&, const ComponentShape& s, const CompValue& x) {
    if (comp_is_zero(x)) return s.depth;
    i64 p = s.prime.p;
    switch (s.kind) {
    case CompKind::single:
        return std::min(valuation(x.a, p), s.depth);
    case CompKind::pair_inert: {
        int va = x.a == 0 ? s.depth : valuation(x.a, p);
        int vb = x.b == 0 ? s.depth : valuation(x.b, p);
        return std::min(std::min(va, vb), s.depth);
    }
    case CompKind::pair_ramified: {
        int sa = x.a == 0 ? 64 : valuation(x.a, p);
        int sb = x.b == 0 ? 64 : valuation(x.b, p);
        int sp = std::min(sa, sb);
        i64 a1 = x.a / ipow(p, sp), b1 = x.b / ipow(p, sp);
        int v = 2 * sp + (pmod(a1 + b1 * s.root, p) == 0 ? 1 : 0);
        return std::min(v, s.depth);
    }
    }
    return 0;
}

inline bool comp_is_unit(const FieldSpec& F, const ComponentShape& s, const CompValue& x) {
    return comp_valuation(F, s, x) == 0;
}

// inverse of a unit; throws naming the prime component otherwise
inline CompValue comp_inv(const FieldSpec& F, const ComponentShape& s, const CompValue& x) {
    if (!comp_is_unit(F, s, x))
        throw std::domain_error("residue not invertible at component " + s.prime.str());
    if (s.kind == CompKind::single)
        return comp_canon(s, inv_mod(x.a, s.mod_a), 0);
    i64 m = s.mod_a;
    i64 n = pmod(i64((i128(x.a) * x.a + i128(x.a) * x.b % m * F.s1 - i128(x.b) * x.b % m * F.s0) % m), m);
    i64 in = inv_mod(n, m);
    CompValue c{pmod(x.a + x.b * F.s1, m), pmod(-x.b, m)};
    return comp_canon(s, i64(i128(c.a) * in % m), i64(i128(c.b) * in % m));
}

// x / pi^v as a value of the component at depth (k - v), for a class of
// valuation >= v.  The uniformizer is p for single and inert components and
// pi = theta - r at a ramified prime, uniformly for every v, so unit parts
// compose multiplicatively across factorizations.  Works on the exact
// canonical representative: peel p^(v/2) = (pi^2 / w)^(v/2) with the unit
// w = pi^2/p, then one exact division by pi when v is odd.
inline CompValue comp_unit_part(const FieldSpec& F, const ComponentShape& s, const ComponentShape& target,
                                const CompValue& x, int v) {
    if (v == 0) return comp_canon(target, x.a, x.b);
    i64 p = s.prime.p;
    if (s.kind == CompKind::single)
        return comp_canon(target, x.a / ipow(p, v), 0);
    if (s.kind == CompKind::pair_inert) {
        i64 q = ipow(p, v);
        return comp_canon(target, x.a / q, x.b / q);
    }
    i64 q = ipow(p, v / 2);
    i64 a = x.a / q, b = x.b / q;
    i64 m = std::max(target.mod_a, target.mod_b);
    if (v % 2 == 1) {
        // divide by pi once: multiply by conj(pi) = (s1 - r) - theta, divide by N(pi) = p*u0
        i64 ca = F.s1 - s.root, cb = -1;
        i64 ya = a * ca + b * cb * F.s0;
        i64 yb = a * cb + b * ca + b * cb * F.s1;
        i64 npi = s.root * s.root - F.s1 * s.root - F.s0; // p-valuation exactly 1
        i64 u0 = npi / p;
        if (ya % p != 0 || yb % p != 0) throw std::logic_error("comp_unit_part: uniformizer division failed");
        i64 iu = inv_mod(pmod(u0, m), m);
        a = i64(i128(ya / p) % m * iu % m);
        b = i64(i128(yb / p) % m * iu % m);
    }
    int s2 = v / 2;
    if (s2 > 0) {
        // dividing by p^s instead of pi^{2s} leaves the unit w^s, w = pi^2/p
        OElement w((s.root * s.root + F.s0) / p, (F.s1 - 2 * s.root) / p);
        CompValue wc = comp_canon(target, w.a, w.b);
        CompValue winv = comp_inv(F, target, wc);
        CompValue r = comp_canon(target, a, b);
        for (int i = 0; i < s2; ++i) r = comp_mul(F, target, r, winv);
        return r;
    }
    return comp_canon(target, a, b);
}

inline i64 comp_encode(const ComponentShape& s, const CompValue& x) { return x.a + s.mod_a * x.b; }

inline CompValue comp_decode(const ComponentShape& s, i64 idx) {
    return CompValue{idx % s.mod_a, idx / s.mod_a};
}

inline std::string comp_str(const ComponentShape& s, const CompValue& x) {
    if (s.kind == CompKind::single) return std::to_string(x.a);
    return std::to_string(x.a) + "+" + std::to_string(x.b) + "t";
}

// --- residue elements over a full modulus -------------------------------

struct ResidueElement {
    FieldSpec field;
    Ideal modulus;
    std::vector<ComponentShape> shapes;
    std::vector<CompValue> comps;

    bool is_unit() const {
        for (size_t i = 0; i < comps.size(); ++i)
            if (!comp_is_unit(field, shapes[i], comps[i])) return false;
        return true;
    }
    bool operator==(const ResidueElement& o) const { return comps == o.comps && modulus == o.modulus; }
    std::string str() const {
        if (comps.empty()) return "0";
        std::string out;
        for (size_t i = 0; i < comps.size(); ++i) {
            if (i) out += ";";
            out += shapes[i].prime.str() + "^" + std::to_string(shapes[i].depth) + ":" +
                   comp_str(shapes[i], comps[i]);
        }
        return out;
    }
};

inline std::vector<ComponentShape> modulus_shapes(const FieldSpec& F, const Ideal& m) {
    if (!m.is_integral()) throw std::invalid_argument("modulus must be an integral ideal");
    std::vector<ComponentShape> out;
    for (auto& [P, e] : m.factors) out.push_back(make_component_shape(F, P, e));
    return out;
}

inline ResidueElement reduce_mod(const FieldSpec& F, const OElement& x, const Ideal& m) {
    ResidueElement r;
    r.field = F;
    r.modulus = m;
    r.shapes = modulus_shapes(F, m);
    for (auto& s : r.shapes) r.comps.push_back(comp_reduce_element(F, s, x));
    return r;
}

inline ResidueElement residue_add(const ResidueElement& x, const ResidueElement& y) {
    ResidueElement r = x;
    for (size_t i = 0; i < r.comps.size(); ++i) r.comps[i] = comp_add(r.shapes[i], x.comps[i], y.comps[i]);
    return r;
}

inline ResidueElement residue_mul(const ResidueElement& x, const ResidueElement& y) {
    ResidueElement r = x;
    for (size_t i = 0; i < r.comps.size(); ++i)
        r.comps[i] = comp_mul(x.field, r.shapes[i], x.comps[i], y.comps[i]);
    return r;
}

inline ResidueElement residue_invert(const FieldSpec& F, const ResidueElement& x) {
    ResidueElement r = x;
    for (size_t i = 0; i < r.comps.size(); ++i) r.comps[i] = comp_inv(F, r.shapes[i], x.comps[i]);
    return r;
}

} // namespace bcf
