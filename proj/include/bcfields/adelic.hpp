#pragma once

// Finite-level models of Y = Gal(K^ab/K) x_{O^*} O^hat.
//
// For K = Q the level-m quotient is Z/M with M = prod p^k (Y ~ Zhat).  For a
// cn1 imaginary quadratic field the Galois coordinate is absorbed through the
// identification of Y with O^hat modulo the closure of O^*, which at a finite
// level is the quotient of O/m by the w_K roots of unity; points are stored
// as canonical orbit representatives.  Other fields are not modeled here.
//
// The measure mu_beta is the product over level primes of the local measures
// normalized by mu(O_v^*) = 1 - N(p)^-beta with the scaling rule
// mu(pi Z) = N(p)^-beta mu(Z); at beta = 1 this is additive Haar measure.

#include <memory>

#include "residue.hpp"

namespace bcf {

inline void require_positive_beta(double beta) {
    if (beta < 0) throw std::domain_error("no KMS states for beta < 0");
    if (beta == 0) throw std::domain_error("beta = 0 excluded");
}

struct MeasureParams {
    double beta;
    explicit MeasureParams(double b) : beta(b) { require_positive_beta(b); }
};

// closed-form measure of the coset x + P^k O_v with val(x) = j (j = k means x = 0)
inline double local_coset_measure_v(const PrimeIdeal& P, double beta, int j, int k) {
    require_positive_beta(beta);
    if (j < 0 || j > k || k < 1) throw std::invalid_argument("local_coset_measure: bad valuation/depth");
    double q = double(P.norm());
    if (j == k) return std::pow(q, -beta * k);
    return std::pow(q, -beta * j) * (1.0 - std::pow(q, -beta)) / (double(P.norm() - 1) * std::pow(q, double(k - j - 1)));
}

inline double local_coset_measure(const FieldSpec& F, const PrimeIdeal& P, double beta,
                                  const ComponentShape& shape, const CompValue& x) {
    return local_coset_measure_v(P, beta, comp_valuation(F, shape, x), shape.depth);
}

struct LevelPrime {
    PrimeIdeal prime;
    int depth = 1;
};

class Level {
    struct Data {
        FieldSpec field;
        std::vector<ComponentShape> shapes;
        std::vector<i64> strides;               // mixed-radix encoding of residues
        i64 residue_count = 1;
        bool orbit_quotient = false;            // cn1 imaginary: quotient by roots of unity
        std::vector<std::vector<CompValue>> unit_reps; // reduced roots of unity (orbit case)
        std::vector<std::vector<CompValue>> points;    // canonical orbit representatives
        std::vector<std::int32_t> point_of_residue;    // residue index -> point index
        std::vector<std::int32_t> orbit_sizes;
        std::vector<std::int8_t> valuations;           // flattened [point][component]
        std::vector<std::int32_t> y0;                  // invertible points
        std::vector<std::int32_t> y0_pos;              // point -> position in y0, or -1
    };
    std::shared_ptr<const Data> d_;

    explicit Level(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

public:
    Level() = default;

    static Level make(const FieldSpec& F, std::vector<LevelPrime> lps) {
        if (F.is_quadratic() && !F.is_imaginary)
            throw std::domain_error("unsupported field " + F.name() +
                                    ": real quadratic fields have no finite Y-level model");
        if (F.is_quadratic() && !F.cn1_imaginary)
            throw std::domain_error("unsupported field " + F.name() +
                                    ": only class-number-one imaginary fields are modeled");
        auto d = std::make_shared<Data>();
        d->field = F;
        std::sort(lps.begin(), lps.end(),
                  [](const LevelPrime& a, const LevelPrime& b) { return a.prime < b.prime; });
        for (size_t i = 0; i + 1 < lps.size(); ++i)
            if (lps[i].prime == lps[i + 1].prime)
                throw std::invalid_argument("level primes must be distinct");
        for (auto& lp : lps) {
            if (lp.depth < 1) throw std::invalid_argument("level depth must be >= 1");
            d->shapes.push_back(make_component_shape(F, lp.prime, lp.depth));
        }
        for (auto& s : d->shapes) {
            d->strides.push_back(d->residue_count);
            if (d->residue_count > (i64(1) << 22) / std::max<i64>(s.card(), 1))
                throw std::invalid_argument("level too large to enumerate");
            d->residue_count *= s.card();
        }
        d->orbit_quotient = F.cn1_imaginary;
        if (d->orbit_quotient)
            for (const auto& u : roots_of_unity(F)) {
                std::vector<CompValue> ur;
                for (auto& s : d->shapes) ur.push_back(comp_reduce_element(F, s, u));
                d->unit_reps.push_back(std::move(ur));
            }

        size_t nc = d->shapes.size();
        d->point_of_residue.assign(size_t(d->residue_count), -1);
        std::vector<CompValue> comps(nc);
        for (i64 ridx = 0; ridx < d->residue_count; ++ridx) {
            i64 rem = ridx;
            for (size_t i = 0; i < nc; ++i) {
                comps[i] = comp_decode(d->shapes[i], rem % d->shapes[i].card());
                rem /= d->shapes[i].card();
            }
            i64 canon = ridx;
            if (d->orbit_quotient) {
                for (const auto& u : d->unit_reps) {
                    i64 enc = 0;
                    for (size_t i = 0; i < nc; ++i)
                        enc += d->strides[i] *
                               comp_encode(d->shapes[i], comp_mul(F, d->shapes[i], u[i], comps[i]));
                    canon = std::min(canon, enc);
                }
            }
            if (canon == ridx) {
                d->points.push_back(comps);
                d->orbit_sizes.push_back(1);
                d->point_of_residue[size_t(ridx)] = std::int32_t(d->points.size() - 1);
            } else {
                std::int32_t pi = d->point_of_residue[size_t(canon)];
                d->point_of_residue[size_t(ridx)] = pi;
                d->orbit_sizes[size_t(pi)] += 1;
            }
        }
        d->valuations.resize(d->points.size() * std::max<size_t>(nc, 1));
        d->y0_pos.assign(d->points.size(), -1);
        for (size_t pi = 0; pi < d->points.size(); ++pi) {
            bool unit = true;
            for (size_t i = 0; i < nc; ++i) {
                int v = comp_valuation(F, d->shapes[i], d->points[pi][i]);
                d->valuations[pi * nc + i] = std::int8_t(v);
                if (v > 0) unit = false;
            }
            if (unit) {
                d->y0_pos[pi] = std::int32_t(d->y0.size());
                d->y0.push_back(std::int32_t(pi));
            }
        }
        return Level(std::move(d));
    }

    static Level make(const FieldSpec& F, const Ideal& modulus) {
        std::vector<LevelPrime> lps;
        for (auto& [P, e] : modulus.factors) lps.push_back({P, e});
        return make(F, std::move(lps));
    }

    bool valid() const { return bool(d_); }
    const FieldSpec& field() const { return d_->field; }
    const std::vector<ComponentShape>& shapes() const { return d_->shapes; }
    size_t component_count() const { return d_->shapes.size(); }
    i64 residue_count() const { return d_->residue_count; }
    int point_count() const { return int(d_->points.size()); }
    const std::vector<CompValue>& point_rep(int idx) const { return d_->points[size_t(idx)]; }
    int orbit_size(int idx) const { return d_->orbit_sizes[size_t(idx)]; }
    int valuation(int idx, size_t comp) const {
        return d_->valuations[size_t(idx) * component_count() + comp];
    }
    const std::vector<std::int32_t>& y0_points() const { return d_->y0; }
    bool is_y0(int idx) const { return d_->y0_pos[size_t(idx)] >= 0; }
    int y0_position(int idx) const { return d_->y0_pos[size_t(idx)]; }

    Ideal modulus() const {
        std::vector<std::pair<PrimeIdeal, int>> fs;
        for (auto& s : d_->shapes) fs.emplace_back(s.prime, s.depth);
        return Ideal(fs);
    }
    int component_index(const PrimeIdeal& P) const {
        for (size_t i = 0; i < d_->shapes.size(); ++i)
            if (d_->shapes[i].prime == P) return int(i);
        return -1;
    }

    int point_of_comps(const std::vector<CompValue>& comps) const {
        i64 enc = 0;
        for (size_t i = 0; i < comps.size(); ++i) enc += d_->strides[i] * comp_encode(d_->shapes[i], comps[i]);
        return d_->point_of_residue[size_t(enc)];
    }

    // residue of an O-element, as a point
    int point_of_element(const OElement& x) const {
        std::vector<CompValue> comps;
        for (auto& s : d_->shapes) comps.push_back(comp_reduce_element(d_->field, s, x));
        return point_of_comps(comps);
    }

    // for K = Q: CRT value in [0, M); inverse of point_of_element
    i64 integer_of_point(int idx) const {
        if (!d_->field.is_rational()) throw std::domain_error("integer_of_point: rational field only");
        i64 m = 1, r = 0;
        for (size_t i = 0; i < d_->shapes.size(); ++i) {
            i64 q = d_->shapes[i].mod_a, a = d_->points[size_t(idx)][i].a;
            // CRT combine r mod m with a mod q
            i64 t = mul_mod(pmod(a - r, q), inv_mod(m % q, q), q);
            r += m * t;
            m *= q;
        }
        return r;
    }

    double point_mass(double beta, int idx) const {
        require_positive_beta(beta);
        double m = double(orbit_size(idx));
        for (size_t i = 0; i < component_count(); ++i)
            m *= local_coset_measure_v(d_->shapes[i].prime, beta, valuation(idx, i), d_->shapes[i].depth);
        return m;
    }

    // multiplication by a residue vector followed by orbit canonicalization
    int multiply_point(const std::vector<CompValue>& g, int idx) const {
        std::vector<CompValue> out(component_count());
        for (size_t i = 0; i < component_count(); ++i)
            out[i] = comp_mul(d_->field, d_->shapes[i], g[i], d_->points[size_t(idx)][i]);
        return point_of_comps(out);
    }

    // componentwise residues of the canonical generator of an integral ideal
    std::vector<CompValue> generator_residues(const Ideal& a) const {
        if (!a.is_integral()) throw std::invalid_argument("generator_residues: integral ideal required");
        if (!d_->field.is_rational() && !d_->field.cn1_imaginary)
            throw std::domain_error("unsupported field for the ideal action");
        OElement g = canonical_generator(d_->field, a);
        std::vector<CompValue> out;
        for (auto& s : d_->shapes) out.push_back(comp_reduce_element(d_->field, s, g));
        return out;
    }

    std::string point_str(int idx) const {
        if (d_->field.is_rational()) return std::to_string(integer_of_point(idx));
        std::string out;
        for (size_t i = 0; i < component_count(); ++i) {
            if (i) out += ";";
            out += d_->shapes[i].prime.str() + "^" + std::to_string(d_->shapes[i].depth) + ":" +
                   comp_str(d_->shapes[i], d_->points[size_t(idx)][i]);
        }
        return out;
    }
};

// --- spec operations ------------------------------------------------------

inline double cylinder_measure(const Level& L, double beta, int idx) { return L.point_mass(beta, idx); }

inline int ideal_action(const Level& L, const Ideal& a, int idx) {
    return L.multiply_point(L.generator_residues(a), idx);
}

// action of a unit class u (given as a Y0-level point) on y
inline int symmetry_action(const Level& L, int u_idx, int idx) {
    if (!L.is_y0(u_idx)) throw std::invalid_argument("symmetry_action: u is not invertible at this level");
    return L.multiply_point(L.point_rep(u_idx), idx);
}

struct ZeroFiber {
    std::vector<int> points;
    double mass = 0;        // closed form N(p)^(-k*beta)
};

inline ZeroFiber zero_fiber_set(const Level& L, double beta, const PrimeIdeal& P, int k) {
    require_positive_beta(beta);
    int ci = L.component_index(P);
    if (ci < 0 || k < 0 || k > L.shapes()[size_t(ci)].depth)
        throw std::invalid_argument("zero_fiber_set: (prime, depth) not in the level");
    ZeroFiber zf;
    for (int i = 0; i < L.point_count(); ++i)
        if (L.valuation(i, size_t(ci)) >= k) zf.points.push_back(i);
    zf.mass = std::pow(double(P.norm()), -beta * k);
    return zf;
}

// level with modulus m * a (a integral)
inline Level refine_level(const Level& L, const Ideal& a) {
    if (!a.is_integral()) throw std::invalid_argument("refine_level: integral ideal required");
    return Level::make(L.field(), L.modulus() * a);
}

// image of the cylinder of `idx` under multiplication by a, as a point of the
// refined level (modulus m * a); multiplication is cylinder-to-cylinder there
inline int image_point(const Level& base, const Ideal& a, const Level& refined, int idx) {
    const FieldSpec& F = base.field();
    OElement g = canonical_generator(F, a);
    std::vector<CompValue> out;
    for (size_t i = 0; i < refined.component_count(); ++i) {
        const ComponentShape& rs = refined.shapes()[i];
        int bi = base.component_index(rs.prime);
        if (bi < 0) {
            out.push_back(CompValue{0, 0}); // no constraint at base: image is P^e O_v, the zero coset
        } else {
            const CompValue& x = base.point_rep(idx)[size_t(bi)];
            CompValue lift = comp_canon(rs, x.a, x.b); // canonical representative is already a lift
            out.push_back(comp_mul(F, rs, comp_reduce_element(F, rs, g), lift));
        }
    }
    return refined.point_of_comps(out);
}

// reduction of a refined point to a coarser level (componentwise projection)
inline int reduce_point(const Level& refined, const Level& base, int idx) {
    std::vector<CompValue> out;
    for (size_t i = 0; i < base.component_count(); ++i) {
        const ComponentShape& bs = base.shapes()[i];
        int ri = refined.component_index(bs.prime);
        if (ri < 0) throw std::invalid_argument("reduce_point: base prime missing from refined level");
        const CompValue& x = refined.point_rep(idx)[size_t(ri)];
        out.push_back(comp_canon(bs, x.a, x.b));
    }
    return base.point_of_comps(out);
}

// z -> a^{-1} z for z in aY, from the refined level (modulus m*a) down to the
// base level; divides componentwise by the canonical generator of a
inline int divide_point(const Level& refined, const Ideal& a, const Level& base, int idx) {
    const FieldSpec& F = base.field();
    OElement g = canonical_generator(F, a);
    std::vector<CompValue> out;
    for (size_t i = 0; i < base.component_count(); ++i) {
        const ComponentShape& bs = base.shapes()[i];
        int ri = refined.component_index(bs.prime);
        if (ri < 0) throw std::invalid_argument("divide_point: base prime missing from refined level");
        const ComponentShape& rs = refined.shapes()[size_t(ri)];
        int e = a.exponent(bs.prime);
        CompValue x = refined.point_rep(idx)[size_t(ri)];
        if (comp_valuation(F, rs, x) < e) throw std::domain_error("divide_point: point not in aY");
        // x / pi^e at depth K - e >= k, then strip the unit part of g
        ComponentShape mid = make_component_shape(F, bs.prime, rs.depth - e);
        CompValue q = comp_unit_part(F, rs, mid, x, e);
        CompValue gr = comp_reduce_element(F, rs, g);
        CompValue gu = comp_unit_part(F, rs, mid, gr, e);
        q = comp_mul(F, mid, q, comp_inv(F, mid, gu));
        out.push_back(comp_canon(bs, q.a, q.b));
    }
    return base.point_of_comps(out);
}

// |mu_beta(aZ) - N(a)^-beta mu_beta(Z)| with aZ evaluated at the refined level
inline double scaling_residual(const Level& L, double beta, const Ideal& a, const std::vector<int>& Z) {
    require_positive_beta(beta);
    if (!a.is_integral()) throw std::invalid_argument("scaling_residual: integral ideal required");
    Level refined = refine_level(L, a);
    KahanSum muZ, muAZ;
    for (int z : Z) muZ.add(L.point_mass(beta, z));
    for (int z : Z) muAZ.add(refined.point_mass(beta, image_point(L, a, refined, z)));
    double na = double(a.norm_integral());
    return std::abs(muAZ.value() - std::pow(na, -beta) * muZ.value());
}

// --- cylinder functions ----------------------------------------------------

struct CylinderFunction {
    Level level;
    std::vector<cplx> values;

    CylinderFunction() = default;
    CylinderFunction(Level L, std::vector<cplx> v) : level(std::move(L)), values(std::move(v)) {
        if (values.size() != size_t(level.point_count()))
            throw std::invalid_argument("cylinder function size does not match the level");
    }
    static CylinderFunction constant(const Level& L, cplx c) {
        return CylinderFunction(L, std::vector<cplx>(size_t(L.point_count()), c));
    }
    static CylinderFunction indicator(const Level& L, int idx) {
        std::vector<cplx> v(size_t(L.point_count()), 0.0);
        v[size_t(idx)] = 1.0;
        return CylinderFunction(L, v);
    }
    // indicator of {x : x is a unit at every level prime} (the Y0-level set)
    static CylinderFunction unit_indicator(const Level& L) {
        std::vector<cplx> v(size_t(L.point_count()), 0.0);
        for (int i : L.y0_points()) v[size_t(i)] = 1.0;
        return CylinderFunction(L, v);
    }
    // indicator of {x : x is a unit at the given component}
    static CylinderFunction unit_indicator_at(const Level& L, const PrimeIdeal& P) {
        int ci = L.component_index(P);
        if (ci < 0) throw std::invalid_argument("unit_indicator_at: prime not in level");
        std::vector<cplx> v(size_t(L.point_count()), 0.0);
        for (int i = 0; i < L.point_count(); ++i)
            if (L.valuation(i, size_t(ci)) == 0) v[size_t(i)] = 1.0;
        return CylinderFunction(L, v);
    }
    cplx operator()(int idx) const { return values[size_t(idx)]; }
    double sup_norm() const {
        double m = 0;
        for (auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

} // namespace bcf
