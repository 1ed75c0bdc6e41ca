#pragma once

// KMS_beta structure at a finite level: extremal states for beta > 1 indexed
// by the invertible classes, the product-measure state for 0 < beta <= 1,
// ground states at beta = infinity, barycenters over Y0-level weights, the
// invariant-subspace projection, and the KMS-condition residual.
//
// Dynamics: sigma_t(f u_a) = N(a)^{it} f u_a; the KMS_beta condition reads
// phi(xy) = N(a)^{-beta} phi(yx) for x = f u_a, y = g u_a^*.  States built
// here factor through the conditional expectation onto C(Y), so evaluations
// on nontrivially graded monomials vanish identically.

#include "adelic.hpp"
#include "zeta.hpp"

namespace bcf {

struct EvalResult {
    cplx value;
    double tail = 0; // truncation bound; rounding is reported separately where it matters
};

namespace detail {

// canonical unit lift of a point to a refined level: same representative at
// shared primes, 1 at new primes
inline int lift_point(const Level& base, const Level& refined, int idx) {
    std::vector<CompValue> comps;
    for (size_t i = 0; i < refined.component_count(); ++i) {
        const ComponentShape& rs = refined.shapes()[i];
        int bi = base.component_index(rs.prime);
        if (bi < 0)
            comps.push_back(CompValue{1, 0});
        else {
            const CompValue& x = base.point_rep(idx)[size_t(bi)];
            comps.push_back(comp_canon(rs, x.a, x.b));
        }
    }
    return refined.point_of_comps(comps);
}

// componentwise residues of generators of prime ideals, shared across an
// ideal enumeration
struct GeneratorCache {
    const Level& level;
    std::map<PrimeIdeal, std::vector<CompValue>> gens;

    explicit GeneratorCache(const Level& L) : level(L) {}

    const std::vector<CompValue>& prime_gen(const PrimeIdeal& P) {
        auto it = gens.find(P);
        if (it != gens.end()) return it->second;
        OElement g = level.field().is_rational() ? OElement(P.p) : prime_generator(level.field(), P);
        std::vector<CompValue> r;
        for (auto& s : level.shapes()) r.push_back(comp_reduce_element(level.field(), s, g));
        return gens.emplace(P, std::move(r)).first->second;
    }

    std::vector<CompValue> ideal_residues(const Ideal& a) {
        std::vector<CompValue> r;
        for (auto& s : level.shapes()) r.push_back(comp_reduce_element(level.field(), s, OElement(1)));
        for (auto& [P, e] : a.factors) {
            const auto& gp = prime_gen(P);
            for (int t = 0; t < e; ++t)
                for (size_t i = 0; i < r.size(); ++i)
                    r[i] = comp_mul(level.field(), level.shapes()[i], r[i], gp[i]);
        }
        return r;
    }
};

} // namespace detail

class StateHandle {
public:
    enum class Kind { extremal, subcritical, barycenter, ground };

    static StateHandle extremal(const Level& L, double beta, int w, i64 bound) {
        require_positive_beta(beta);
        if (beta <= 1)
            throw std::domain_error("extremal states require beta > 1; use the subcritical state for beta in (0,1]");
        if (!L.is_y0(w)) throw std::invalid_argument("extremal state: w must be invertible at the level");
        StateHandle s;
        s.kind_ = Kind::extremal;
        s.level_ = L;
        s.beta_ = beta;
        s.w_ = w;
        s.bound_ = bound;
        return s;
    }
    static StateHandle subcritical(const Level& L, double beta) {
        require_positive_beta(beta);
        if (beta > 1)
            throw std::domain_error("the product-measure state is the unique KMS state only for beta in (0,1]");
        StateHandle s;
        s.kind_ = Kind::subcritical;
        s.level_ = L;
        s.beta_ = beta;
        return s;
    }
    static StateHandle barycenter(const Level& L, double beta, std::vector<double> nu, i64 bound) {
        require_positive_beta(beta);
        if (beta <= 1) throw std::domain_error("barycenter states require beta > 1");
        if (nu.size() != L.y0_points().size())
            throw std::invalid_argument("barycenter: weight vector must be indexed by the Y0-level points");
        KahanSum total;
        for (double w : nu) {
            if (w < 0) throw std::invalid_argument("barycenter: weights must be nonnegative");
            total.add(w);
        }
        if (std::abs(total.value() - 1.0) > 1e-12)
            throw std::invalid_argument("barycenter: weights must sum to 1 within 1e-12");
        StateHandle s;
        s.kind_ = Kind::barycenter;
        s.level_ = L;
        s.beta_ = beta;
        s.nu_ = std::move(nu);
        s.bound_ = bound;
        return s;
    }
    static StateHandle ground(const Level& L, int w) {
        if (!L.is_y0(w)) throw std::invalid_argument("ground state: w must be invertible at the level");
        StateHandle s;
        s.kind_ = Kind::ground;
        s.level_ = L;
        s.w_ = w;
        return s;
    }

    Kind kind() const { return kind_; }
    double beta() const { return beta_; }
    i64 bound() const { return bound_; }
    const Level& level() const { return level_; }
    int w() const { return w_; }

    // evaluation on a cylinder function at the state's level or a refinement
    EvalResult evaluate(const CylinderFunction& f) const {
        const Level& FL = f.level;
        switch (kind_) {
        case Kind::ground:
            return {f(detail::lift_point(level_, FL, w_)), 0.0};
        case Kind::subcritical: {
            KahanSum re, im;
            for (int i = 0; i < FL.point_count(); ++i) {
                double m = FL.point_mass(beta_, i);
                re.add(m * f(i).real());
                im.add(m * f(i).imag());
            }
            return {cplx(re.value(), im.value()), 0.0};
        }
        case Kind::extremal:
            return extremal_eval(FL, {{detail::lift_point(level_, FL, w_), 1.0}}, f);
        case Kind::barycenter: {
            std::vector<std::pair<int, double>> ws;
            for (size_t i = 0; i < nu_.size(); ++i)
                if (nu_[i] != 0)
                    ws.emplace_back(detail::lift_point(level_, FL, level_.y0_points()[i]), nu_[i]);
            return extremal_eval(FL, ws, f);
        }
        }
        return {};
    }

private:
    Kind kind_ = Kind::subcritical;
    Level level_;
    double beta_ = 1.0;
    i64 bound_ = 0;
    int w_ = -1;
    std::vector<double> nu_;

    // one pass over the ideal enumeration shared by all weighted points
    EvalResult extremal_eval(const Level& FL, const std::vector<std::pair<int, double>>& ws,
                             const CylinderFunction& f) const {
        detail::GeneratorCache cache(FL);
        KahanSum re, im;
        for (const Ideal& a : enumerate_ideals(FL.field(), bound_)) {
            double wgt = std::pow(double(a.norm_integral()), -beta_);
            auto res = cache.ideal_residues(a);
            for (auto& [w, nu] : ws) {
                cplx c = f(FL.multiply_point(res, w));
                re.add(nu * wgt * c.real());
                im.add(nu * wgt * c.imag());
            }
        }
        double zeta = zeta_euler_smooth(FL.field(), beta_, bound_);
        double tail = f.sup_norm() * zeta_tail_bound(FL.field(), beta_, bound_).bound / zeta;
        return {cplx(re.value(), im.value()) / zeta, tail};
    }
};

inline EvalResult extremal_state_eval(const Level& L, double beta, int w, const CylinderFunction& f, i64 B) {
    return StateHandle::extremal(L, beta, w, B).evaluate(f);
}

inline cplx subcritical_state_eval(const Level& L, double beta, const CylinderFunction& f) {
    return StateHandle::subcritical(L, beta).evaluate(f).value;
}

inline cplx ground_state_eval(const Level& L, int w, const CylinderFunction& f) {
    return StateHandle::ground(L, w).evaluate(f).value;
}

inline EvalResult state_from_Y0_measure(const Level& L, double beta, const std::vector<double>& nu,
                                        const CylinderFunction& f, i64 B) {
    return StateHandle::barycenter(L, beta, nu, B).evaluate(f);
}

// expectation of f against the product measure mu_beta (any beta > 0); for
// beta in (0,1] this is the unique KMS state, for beta > 1 the barycenter of
// the extremal ones under the uniform Y0 weight
inline cplx measure_state_eval(const Level& L, double beta, const CylinderFunction& f) {
    require_positive_beta(beta);
    KahanSum re, im;
    for (int i = 0; i < L.point_count(); ++i) {
        double m = L.point_mass(beta, i);
        re.add(m * f(i).real());
        im.add(m * f(i).imag());
    }
    return {re.value(), im.value()};
}

// --- monomials and the KMS residual ---------------------------------------

struct Monomial {
    CylinderFunction f;
    Ideal ideal;
    bool adjoint = false; // f u_a or (f u_a)^*
};

struct KmsCheck {
    double residual = 0;
    double tail = 0; // truncation + rounding allowance for the state used
};

// |phi(xy) - N(a)^-beta phi(yx)| for x = f u_a, y = g u_a^*.  For mismatched
// ideals the product is nontrivially graded and phi vanishes by construction;
// the off-diagonal value |phi(f u_g)| = 0 is returned.
inline KmsCheck kms_residual(const StateHandle& st, const Monomial& x, const Monomial& y) {
    if (st.kind() == StateHandle::Kind::ground)
        throw std::invalid_argument("kms_residual: ground states are KMS_infinity; no finite-beta residual");
    if (x.adjoint || !y.adjoint)
        throw std::invalid_argument("kms_residual expects x = f u_a and y = g u_a^*");
    if (!(x.ideal == y.ideal)) return {0.0, 0.0}; // states factor through E
    const Level& L = x.f.level;
    const Ideal& a = x.ideal;
    double beta = st.beta();
    double na = double(a.norm_integral());

    // phi(xy): multiplication operator z -> f(z) g(a^-1 z) 1_{aY}(z) at the refined level
    Level refined = refine_level(L, a);
    std::vector<cplx> f1(size_t(refined.point_count()), 0.0);
    for (int z = 0; z < refined.point_count(); ++z) {
        bool in_aY = true;
        for (auto& [P, e] : a.factors) {
            int ci = refined.component_index(P);
            if (refined.valuation(z, size_t(ci)) < e) { in_aY = false; break; }
        }
        if (!in_aY) continue;
        f1[size_t(z)] = x.f(reduce_point(refined, L, z)) * y.f(divide_point(refined, a, L, z));
    }
    EvalResult lhs = st.evaluate(CylinderFunction(refined, std::move(f1)));

    // phi(yx): z -> g(z) f(a z) at the base level
    std::vector<cplx> f2(size_t(L.point_count()));
    auto gtab = L.generator_residues(a);
    for (int z = 0; z < L.point_count(); ++z) f2[size_t(z)] = y.f(z) * x.f(L.multiply_point(gtab, z));
    EvalResult rhs = st.evaluate(CylinderFunction(L, std::move(f2)));

    KmsCheck out;
    out.residual = std::abs(lhs.value - std::pow(na, -beta) * rhs.value);
    double rounding = 1e3 * std::numeric_limits<double>::epsilon() *
                      (std::abs(lhs.value) + std::abs(rhs.value) + 1.0);
    if (st.kind() == StateHandle::Kind::subcritical) {
        out.tail = rounding;
    } else {
        // truncating the extremal-state sum at B keeps N(c) <= B on one side and
        // N(c) <= B/N(a) on the other; the mismatch is a tail segment
        i64 Bseg = std::max<i64>(1, i64(double(st.bound()) / na));
        double zeta = zeta_euler_smooth(L.field(), beta, st.bound());
        double segment = zeta_tail_bound(L.field(), beta, Bseg).bound / zeta;
        out.tail = std::pow(na, -beta) * x.f.sup_norm() * y.f.sup_norm() * segment + rounding;
    }
    return out;
}

// --- invariant projection ---------------------------------------------------

// (G_P g)(z) = sum_{j>=0} N(P)^{-j beta} g(P^j z), exact via the eventual
// periodicity of multiplication by the generator on level points
inline std::vector<cplx> geometric_prime_sum(const Level& L, double beta, const PrimeIdeal& P,
                                             const std::vector<cplx>& g) {
    int n = L.point_count();
    std::vector<int> T(size_t(n), 0);
    {
        detail::GeneratorCache cache(L);
        const auto& gp = cache.prime_gen(P);
        for (int z = 0; z < n; ++z) T[size_t(z)] = L.multiply_point(gp, z);
    }
    double x = std::pow(double(P.norm()), -beta);
    std::vector<cplx> G(size_t(n), cplx(0.0, 0.0));
    std::vector<std::int8_t> state(size_t(n), 0); // 0 new, 1 on path, 2 done
    std::vector<int> path;
    for (int start = 0; start < n; ++start) {
        if (state[size_t(start)] == 2) continue;
        path.clear();
        int cur = start;
        while (state[size_t(cur)] == 0) {
            state[size_t(cur)] = 1;
            path.push_back(cur);
            cur = T[size_t(cur)];
        }
        if (state[size_t(cur)] == 1) {
            // resolve the cycle through cur
            size_t pos = path.size();
            while (pos > 0 && path[pos - 1] != cur) --pos;
            --pos;
            size_t tlen = path.size() - pos;
            cplx csum = 0;
            double xr = 1.0;
            for (size_t r = 0; r < tlen; ++r) {
                csum += xr * g[size_t(path[pos + r])];
                xr *= x;
            }
            G[size_t(cur)] = csum / (1.0 - xr); // xr = x^tlen < 1 for beta > 0
            state[size_t(cur)] = 2;
            for (size_t r = tlen - 1; r >= 1; --r) {
                int z = path[pos + r];
                G[size_t(z)] = g[size_t(z)] + x * G[size_t(path[pos + (r + 1) % tlen])];
                state[size_t(z)] = 2;
            }
            path.resize(pos);
        }
        for (size_t i = path.size(); i-- > 0;) {
            int z = path[i];
            G[size_t(z)] = g[size_t(z)] + x * G[size_t(T[size_t(z)])];
            state[size_t(z)] = 2;
        }
    }
    return G;
}

inline double zeta_S_level(const Level& L, double beta) {
    double z = 1.0;
    for (auto& s : L.shapes()) z /= 1.0 - std::pow(double(s.prime.norm()), -beta);
    return z;
}

// An S-invariant function h~ determined by its values h on the invertible
// classes: h~(s y) = h(y) for y in the unit locus and s supported on the
// level primes.  This is the faithful finite-level form of the image of the
// projection P: a projected function is not measurable at the level on the
// deep cosets, so it is carried by its unit-locus restriction instead.
struct InvariantFunction {
    Level level;
    std::vector<cplx> unit_values; // indexed by position in level.y0_points()

    cplx on_unit(int y0_pos) const { return unit_values[size_t(y0_pos)]; }
    double sup_norm() const {
        double m = 0;
        for (auto& v : unit_values) m = std::max(m, std::abs(v));
        return m;
    }
};

// P f for a cylinder function f: (Pf)(y) = zeta_S^{-1} sum_s N(s)^{-beta} f(s y)
// on unit classes y, with the s-sum evaluated exactly
inline InvariantFunction projection_apply(double beta, const CylinderFunction& f) {
    require_positive_beta(beta);
    if (beta <= 1) throw std::domain_error("projection_apply: zeta_S diverges for beta <= 1");
    const Level& L = f.level;
    std::vector<cplx> G = f.values;
    for (auto& s : L.shapes()) G = geometric_prime_sum(L, beta, s.prime, G);
    double zs = zeta_S_level(L, beta);
    InvariantFunction out;
    out.level = L;
    for (int y : L.y0_points()) out.unit_values.push_back(G[size_t(y)] / zs);
    return out;
}

// P on an already-invariant function: along the orbit of a unit class the
// extension is constant, so every geometric factor cancels against zeta_S
inline InvariantFunction projection_apply(double beta, const InvariantFunction& h) {
    require_positive_beta(beta);
    if (beta <= 1) throw std::domain_error("projection_apply: zeta_S diverges for beta <= 1");
    const Level& L = h.level;
    double orbit_factor = 1.0;
    for (auto& s : L.shapes()) orbit_factor /= 1.0 - std::pow(double(s.prime.norm()), -beta);
    double zs = zeta_S_level(L, beta);
    InvariantFunction out;
    out.level = L;
    for (auto& v : h.unit_values) out.unit_values.push_back(v * orbit_factor / zs);
    return out;
}

// mu_beta-mass of the unit cylinder of the y0-th invertible class
inline double unit_class_mass(const Level& L, double beta, int y0_pos) {
    return L.point_mass(beta, L.y0_points()[size_t(y0_pos)]);
}

// ||h~||_2^2 over Y, two ways.  `direct` enumerates the cells s(u + m) by
// exponent class per prime (with the >= J classes aggregated by their exact
// geometric weight, using local coset measures at every intermediate depth);
// `closed` uses ||h~||^2 = zeta_S(beta) * int_{Y0} |h|^2 dmu.
struct NormCheck {
    double direct = 0;
    double closed = 0;
};

inline NormCheck projection_norm_check(double beta, const InvariantFunction& h) {
    require_positive_beta(beta);
    const Level& L = h.level;
    NormCheck out;
    KahanSum direct, closed;
    for (size_t pos = 0; pos < h.unit_values.size(); ++pos) {
        int u = L.y0_points()[pos];
        double h2 = std::norm(h.unit_values[pos]);
        double cell = double(L.orbit_size(u));
        for (size_t i = 0; i < L.component_count(); ++i) {
            const ComponentShape& s = L.shapes()[i];
            double q = double(s.prime.norm());
            int J = s.depth + 2;
            KahanSum factor;
            for (int j = 0; j < J; ++j)
                factor.add(local_coset_measure_v(s.prime, beta, j, s.depth + j));
            // exact tail: sum_{j >= J} q^{-j beta} mu(unit coset at depth k)
            factor.add(local_coset_measure_v(s.prime, beta, 0, s.depth) * std::pow(q, -beta * J) /
                       (1.0 - std::pow(q, -beta)));
            cell *= factor.value();
        }
        direct.add(cell * h2);
        closed.add(unit_class_mass(L, beta, int(pos)) * h2);
    }
    out.direct = direct.value();
    out.closed = zeta_S_level(L, beta) * closed.value();
    return out;
}

// <f, h~> in L^2(Y, mu_beta), exact via the same orbit aggregation
inline cplx inner_with_invariant(double beta, const CylinderFunction& f, const InvariantFunction& h) {
    const Level& L = f.level;
    std::vector<cplx> G = f.values;
    for (auto& s : L.shapes()) G = geometric_prime_sum(L, beta, s.prime, G);
    KahanSum re, im;
    for (size_t pos = 0; pos < h.unit_values.size(); ++pos) {
        int u = L.y0_points()[pos];
        cplx term = L.point_mass(beta, u) * G[size_t(u)] * std::conj(h.unit_values[pos]);
        re.add(term.real());
        im.add(term.imag());
    }
    return {re.value(), im.value()};
}

// ||f||_2^2 of a plain cylinder function
inline double cylinder_norm_sq(double beta, const CylinderFunction& f) {
    KahanSum s;
    for (int i = 0; i < f.level.point_count(); ++i) s.add(f.level.point_mass(beta, i) * std::norm(f(i)));
    return s.value();
}

// --- diagnostics ------------------------------------------------------------

// N(a)^{-beta} R_B for the canonical test ideal a = product of the primes over
// the character modulus; -> 0 on (0,1], -> N(a)^{-beta} |L(chi,beta)| / zeta_K(beta)
// for beta > 1
inline double uniqueness_diagnostic(const FieldSpec& F, const Character& chi, double beta, i64 B) {
    require_positive_beta(beta);
    auto A = character_ramified_primes(F, chi);
    double na = 1.0;
    for (auto& P : A) na *= double(P.norm());
    return std::pow(na, -beta) * euler_ratio(F, chi, A, beta, B);
}

inline std::vector<double> uniqueness_diagnostic_scan(const FieldSpec& F, const Character& chi, double beta,
                                                      const std::vector<i64>& checkpoints) {
    require_positive_beta(beta);
    auto A = character_ramified_primes(F, chi);
    double na = 1.0;
    for (auto& P : A) na *= double(P.norm());
    auto rs = euler_ratio_scan(F, chi, A, beta, checkpoints);
    for (auto& r : rs) r *= std::pow(na, -beta);
    return rs;
}

struct PartitionValue {
    double value = 0;
    bool divergent = false; // beta <= 1: the trace diverges as B grows
};

// Tr(e^{-beta H}) over the truncated ideal semigroup; equals zeta_partial
inline PartitionValue partition_function(const FieldSpec& F, double beta, i64 B) {
    return {zeta_partial(F, beta, B), beta <= 1.0};
}

} // namespace bcf
