#pragma once

// 1-dimensional K-lattices at a finite working level.
//
// A lattice is carried as (ideal_part, sign, t): the fractional ideal class
// of the finite idele s, the archimedean component in K_inf^*/(K_inf^*)^0
// (a sign over Q, trivial for imaginary quadratic fields), and the O^hat
// coordinate t truncated to O/m.  The lifted module map phi~ = s*t has, per
// level prime, a valuation and a unit part at the remaining precision;
// commensurability is exactly equality of phi~ at level precision.  Two data
// sets differing by the O^*-balanced action (u on s, u^{-1} on t) describe
// the same lattice; the stored t is normalized against a fixed generator
// choice for ideal_part, so the balanced action enters through the optional
// unit twist of make_lattice.
//
// The groupoid quotient here is by the connected component of K_inf^* only;
// taking the closure of K^*(K_inf^*)^0 instead would further identify limit
// points of u*phi for units u in the connected component, which no finite
// level can separate, so no operation here attempts to.

#include "adelic.hpp"

namespace bcf {

// Canonical finite-precision form of one component of phi~ = s*t.  The
// valuation is e + val(t), with the sentinel value e + k when the t-component
// vanishes at the level ("infinity at level precision").  The unit part is
// stored at the fixed depth k - max(v, 0): digits beyond what the t-datum
// certifies are canonically zero.  A fixed depth per (level, v) makes
// phi~ equality a plain data comparison, so commensurability is an exact
// equivalence relation at every level; the price is that two truncations of
// the same infinite lattice with different certified precision may compare
// unequal.
struct PhiTildeComponent {
    int cutoff = 0;        // e + k: valuations at or above this are not certified
    int valuation = 0;     // e + val(t), or the sentinel cutoff value
    bool at_cutoff = false;
    CompValue unit{};      // canonical unit part at depth unit_depth
    int unit_depth = 0;    // max(0, k - max(v, 0)); 0 when at_cutoff

    // the cutoff is bookkeeping, not part of the value: commensurable data
    // with different ideal decompositions must still compare equal
    friend bool operator==(const PhiTildeComponent& x, const PhiTildeComponent& y) {
        return x.valuation == y.valuation && x.at_cutoff == y.at_cutoff && x.unit == y.unit &&
               x.unit_depth == y.unit_depth;
    }
};

struct PhiTilde {
    std::vector<PhiTildeComponent> comps;
};

struct KLattice1 {
    FieldSpec field;
    Level level;
    Ideal ideal_part;              // fractional, supported on the level primes
    int sign = +1;                 // archimedean component (Q only)
    std::vector<CompValue> t;      // residue of t in O/m, aligned with level.shapes()
};

namespace detail {

// unit part of the canonical generator of a fractional ideal at one level
// prime, at the requested depth
inline CompValue generator_unit_part(const FieldSpec& F, const Ideal& a, const PrimeIdeal& P, int depth) {
    Ideal num, den;
    for (auto& [Q, e] : a.factors)
        (e > 0 ? num : den).factors.emplace_back(Q, std::abs(e));
    auto unit_of = [&](const Ideal& b) {
        OElement g = canonical_generator(F, b);
        int e = b.exponent(P);
        ComponentShape from = make_component_shape(F, P, depth + e);
        ComponentShape to = make_component_shape(F, P, depth);
        CompValue r = comp_reduce_element(F, from, g);
        return comp_unit_part(F, from, to, r, e);
    };
    ComponentShape to = make_component_shape(F, P, depth);
    CompValue u = unit_of(num);
    CompValue d = unit_of(den);
    return comp_mul(F, to, u, comp_inv(F, to, d));
}

} // namespace detail

inline KLattice1 make_lattice(const FieldSpec& F, const Level& L, const Ideal& ideal_part, int sign,
                              std::vector<CompValue> t, const OElement& unit_twist = OElement(1)) {
    for (auto& [P, e] : ideal_part.factors)
        if (L.component_index(P) < 0)
            throw std::invalid_argument("make_lattice: level primes must include the support of the ideal part");
    if (F.is_quadratic()) sign = +1; // K_inf^* = C^* is connected
    if (sign != +1 && sign != -1) throw std::invalid_argument("make_lattice: sign must be +-1");
    if (t.size() != L.component_count()) throw std::invalid_argument("make_lattice: t has wrong shape");
    KLattice1 lat{F, L, ideal_part, sign, std::move(t)};
    // the balanced action (s, t) -> (s u^-1, u t) fixes ideal_part and twists t
    if (!(unit_twist == OElement(1)))
        for (size_t i = 0; i < lat.t.size(); ++i) {
            const ComponentShape& s = L.shapes()[i];
            CompValue u = comp_reduce_element(F, s, unit_twist);
            if (!comp_is_unit(F, s, u))
                throw std::invalid_argument("make_lattice: twist must be a unit at the level");
            lat.t[i] = comp_mul(F, s, u, lat.t[i]);
        }
    return lat;
}

inline KLattice1 make_lattice(const FieldSpec& F, const Level& L, const Ideal& ideal_part, int sign,
                              const OElement& t, const OElement& unit_twist = OElement(1)) {
    std::vector<CompValue> tc;
    for (auto& s : L.shapes()) tc.push_back(comp_reduce_element(F, s, t));
    return make_lattice(F, L, ideal_part, sign, std::move(tc), unit_twist);
}

inline PhiTilde phi_tilde(const KLattice1& lat) {
    PhiTilde out;
    const Level& L = lat.level;
    for (size_t i = 0; i < L.component_count(); ++i) {
        const ComponentShape& s = L.shapes()[i];
        PhiTildeComponent c;
        int e = lat.ideal_part.exponent(s.prime);
        int k = s.depth;
        c.cutoff = e + k;
        int vt = comp_valuation(lat.field, s, lat.t[i]);
        if (vt >= k) {
            c.at_cutoff = true;
            c.valuation = c.cutoff;
        } else {
            c.valuation = e + vt;
            c.unit_depth = std::max(0, k - std::max(c.valuation, 0));
            if (c.unit_depth > 0) {
                // compute at the certified depth k - vt, then canonicalize to
                // the fixed depth (zero-extending or truncating)
                ComponentShape avail = make_component_shape(lat.field, s.prime, k - vt);
                CompValue tu = comp_unit_part(lat.field, s, avail, lat.t[i], vt);
                CompValue su = detail::generator_unit_part(lat.field, lat.ideal_part, s.prime, k - vt);
                CompValue u = comp_mul(lat.field, avail, su, tu);
                ComponentShape to = make_component_shape(lat.field, s.prime, c.unit_depth);
                c.unit = comp_canon(to, u.a, u.b);
            }
        }
        out.comps.push_back(c);
    }
    return out;
}

inline bool commensurable(const KLattice1& a, const KLattice1& b) {
    if (!(a.level.modulus() == b.level.modulus()) || !(a.field.name() == b.field.name()))
        throw std::invalid_argument("commensurable: lattices carried at incompatible levels");
    PhiTilde pa = phi_tilde(a), pb = phi_tilde(b);
    for (size_t i = 0; i < pa.comps.size(); ++i)
        if (!(pa.comps[i] == pb.comps[i])) return false;
    return true;
}

// scaling action of K_inf^* through its component group
inline KLattice1 scale_lattice(const KLattice1& lat, double k) {
    if (k == 0) throw std::invalid_argument("scale_lattice: k must be nonzero");
    KLattice1 out = lat;
    if (lat.field.is_rational() && k < 0) out.sign = -out.sign;
    return out;
}

struct GroupoidArrow {
    Ideal g;   // ideal_part(lat1)^-1 * ideal_part(lat2)
    int y = 0; // Y-level class of lat1's t-datum
};

inline GroupoidArrow to_groupoid(const KLattice1& lat1, const KLattice1& lat2) {
    if (!commensurable(lat1, lat2))
        throw std::domain_error("to_groupoid: lattices are not commensurable");
    GroupoidArrow arrow;
    arrow.g = lat1.ideal_part.inverse() * lat2.ideal_part;
    arrow.y = lat1.level.point_of_comps(lat1.t);
    return arrow;
}

// target of the arrow with coordinate g out of lat1: ideal part multiplied by
// g, t-datum recomputed from phi~ so the lifted map is unchanged.  When lat1
// is commensurable with some lattice over the target ideal, this reproduces
// that lattice's phi~ exactly; otherwise the finite level cannot represent
// the arrow faithfully (the result may fail commensurability with lat1, or a
// domain error is raised when the valuation leaves the representable window).
inline KLattice1 apply_arrow(const KLattice1& lat1, const Ideal& g) {
    KLattice1 out = lat1;
    out.ideal_part = lat1.ideal_part * g;
    PhiTilde phi = phi_tilde(lat1);
    const Level& L = lat1.level;
    for (size_t i = 0; i < L.component_count(); ++i) {
        const ComponentShape& s = L.shapes()[i];
        int e = out.ideal_part.exponent(s.prime);
        const auto& c = phi.comps[i];
        if (c.at_cutoff || c.valuation - e >= s.depth) {
            out.t[i] = CompValue{0, 0};
            continue;
        }
        int vt = c.valuation - e;
        if (vt < 0)
            throw std::domain_error("apply_arrow: phi~ valuation not representable over the target ideal");
        int m = s.depth - vt; // digits the target t-slot certifies
        ComponentShape mid = make_component_shape(lat1.field, s.prime, m);
        CompValue u0 = c.unit_depth > 0 ? comp_canon(mid, c.unit.a, c.unit.b) : comp_canon(mid, 1, 0);
        CompValue su = detail::generator_unit_part(lat1.field, out.ideal_part, s.prime, m);
        CompValue t = comp_mul(lat1.field, mid, u0, comp_inv(lat1.field, mid, su));
        // multiply by the uniformizer^vt inside the full-depth component
        CompValue lift = comp_canon(s, t.a, t.b);
        OElement pi = s.kind == CompKind::pair_ramified ? OElement(-s.root, 1) : OElement(s.prime.p);
        for (int r = 0; r < vt; ++r) lift = comp_mul(lat1.field, s, lift, comp_reduce_element(lat1.field, s, pi));
        out.t[i] = lift;
    }
    return out;
}

// a lattice has invertible t-datum iff its Y-class lies in Y0-level
inline bool lattice_invertible(const KLattice1& lat) {
    for (size_t i = 0; i < lat.level.component_count(); ++i)
        if (!comp_is_unit(lat.field, lat.level.shapes()[i], lat.t[i])) return false;
    return true;
}

} // namespace bcf
