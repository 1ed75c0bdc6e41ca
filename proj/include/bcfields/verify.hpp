#pragma once

// The bundled verification suite: every module invariant as a named check,
// runnable as a whole (quick/full profiles) or individually.  Each check
// returns its worst residual; a check passes when the residual stays within
// its pinned tolerance.  check_normalization accepts a perturbation hook so
// the suite itself can be tested to catch injected faults.

#include <functional>
#include <set>

#include "klattice.hpp"
#include "kms.hpp"

namespace bcf::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0;
};

enum class Profile { quick, full };

namespace detail {

inline Level q_level(i64 M) { return Level::make(make_field(), principal_ideal(make_field(), M)); }

inline Level gauss_level() {
    FieldSpec F = make_field(-1);
    return Level::make(F, principal_ideal(F, 2) * Ideal({{split_prime(F, 5)[0], 1}}));
}

inline std::vector<Level> level_matrix() {
    FieldSpec gi = make_field(-1);
    FieldSpec eis = make_field(-3);
    PrimeIdeal p2 = split_prime(gi, 2)[0];
    PrimeIdeal p3 = split_prime(gi, 3)[0];
    PrimeIdeal p5 = split_prime(gi, 5)[0];
    return {q_level(2),
            q_level(12),
            Level::make(gi, Ideal({{p2, 3}})),
            Level::make(gi, Ideal({{p2, 2}, {p5, 1}})),
            Level::make(gi, Ideal({{p3, 1}})),
            Level::make(eis, principal_ideal(eis, 6))};
}

inline CylinderFunction hashed_function(const Level& L, i64 salt) {
    // deterministic pseudo-random values, no RNG state shared across checks
    std::vector<cplx> v(size_t(L.point_count()));
    for (int i = 0; i < L.point_count(); ++i) {
        i64 h = (i * 2654435761LL + salt * 40503LL) % 1000;
        v[size_t(i)] = cplx(double(h) / 500.0 - 1.0, double((h * 7) % 1000) / 500.0 - 1.0);
    }
    return CylinderFunction(L, v);
}

} // namespace detail

// sum of cylinder masses = 1 on every level of the matrix; the perturbation
// is added to one local factor to validate that the check can fail
inline CheckResult check_normalization(Profile, double perturb = 0.0) {
    double worst = 0;
    for (const Level& L : detail::level_matrix()) {
        for (double beta : {0.5, 1.0, 1.5, 2.0, 5.0}) {
            KahanSum total;
            for (int i = 0; i < L.point_count(); ++i) {
                double m = L.point_mass(beta, i);
                if (i == 0) {
                    double f0 = local_coset_measure_v(L.shapes()[0].prime, beta, L.valuation(0, 0),
                                                      L.shapes()[0].depth);
                    m = m / f0 * (f0 + perturb);
                }
                total.add(m);
            }
            worst = std::max(worst, std::abs(total.value() - 1.0));
        }
    }
    return {"adelic.normalization", worst <= 1e-12, worst};
}

inline CheckResult check_refinement(Profile) {
    double worst = 0;
    for (const Level& L : detail::level_matrix()) {
        Level fine = refine_level(L, Ideal({{L.shapes()[0].prime, 1}}));
        for (double beta : {0.5, 1.0, 1.7, 2.0}) {
            std::vector<double> mass(size_t(L.point_count()), 0.0);
            for (int i = 0; i < fine.point_count(); ++i)
                mass[size_t(reduce_point(fine, L, i))] += fine.point_mass(beta, i);
            for (int i = 0; i < L.point_count(); ++i)
                worst = std::max(worst, std::abs(mass[size_t(i)] - L.point_mass(beta, i)));
        }
    }
    return {"adelic.refinement", worst <= 1e-12, worst};
}

inline CheckResult check_scaling(Profile p) {
    i64 normCap = p == Profile::quick ? 8 : 20;
    double worst = 0;
    for (int fi = 0; fi < 2; ++fi) {
        FieldSpec F = fi == 0 ? make_field() : make_field(-1);
        Level L = fi == 0 ? detail::q_level(12) : detail::gauss_level();
        std::vector<std::vector<int>> sets;
        sets.push_back({0});
        sets.emplace_back(L.y0_points().begin(), L.y0_points().end());
        std::vector<int> stripe;
        for (int i = 0; i < L.point_count(); i += 2) stripe.push_back(i);
        sets.push_back(stripe);
        for (const Ideal& a : enumerate_ideals(F, normCap))
            for (double beta : {0.5, 1.0, 1.5, 2.0})
                for (auto& Z : sets) worst = std::max(worst, scaling_residual(L, beta, a, Z));
    }
    return {"adelic.scaling", worst <= 1e-12, worst};
}

inline CheckResult check_zero_fiber(Profile) {
    double worst = 0;
    for (const Level& L : detail::level_matrix())
        for (size_t ci = 0; ci < L.component_count(); ++ci)
            for (int k = 0; k <= L.shapes()[ci].depth; ++k)
                for (double beta : {0.8, 2.0}) {
                    ZeroFiber zf = zero_fiber_set(L, beta, L.shapes()[ci].prime, k);
                    KahanSum s;
                    for (int i : zf.points) s.add(L.point_mass(beta, i));
                    worst = std::max(worst, std::abs(s.value() - zf.mass));
                }
    return {"adelic.zero_fiber", worst <= 1e-12, worst};
}

inline CheckResult check_symmetry(Profile) {
    Level L = detail::q_level(12);
    const auto& y0 = L.y0_points();
    bool ok = y0.size() == 4;
    std::set<int> orbit;
    for (int u : y0) {
        orbit.insert(symmetry_action(L, u, y0[0]));
        for (int y : y0)
            if (u != L.point_of_element(OElement(1)) && symmetry_action(L, u, y) == y) ok = false;
    }
    ok = ok && orbit == std::set<int>(y0.begin(), y0.end());
    return {"adelic.symmetry_free_transitive", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_beta_rejection(Profile) {
    bool ok = true;
    auto expect_reject = [&](auto&& fn) {
        try {
            fn();
            ok = false;
        } catch (const std::domain_error&) {
        }
    };
    Level L = detail::q_level(4);
    for (double bad : {-1.0, 0.0}) {
        expect_reject([&] { MeasureParams m(bad); (void)m; });
        expect_reject([&] { L.point_mass(bad, 0); });
        expect_reject([&] { StateHandle::subcritical(L, bad); });
        expect_reject([&] { StateHandle::extremal(L, bad, L.y0_points()[0], 10); });
        expect_reject([&] { local_coset_measure_v(L.shapes()[0].prime, bad, 0, 1); });
        expect_reject([&] { zero_fiber_set(L, bad, L.shapes()[0].prime, 1); });
    }
    return {"kms.beta_rejection", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_ramification_sum(Profile p) {
    i64 cap = p == Profile::quick ? 200 : 1000;
    bool ok = true;
    for (i64 d : {-1LL, -2LL, -3LL, -7LL, 5LL}) {
        FieldSpec F = make_field(d);
        for (i64 q : primes_up_to(cap)) {
            int ef = 0;
            for (auto& P : split_prime(F, q)) ef += P.f * P.ramification_index();
            if (ef != 2) ok = false;
        }
    }
    return {"number_field.ramification_sum", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_gauss_counts(Profile) {
    FieldSpec F = make_field(-1);
    std::vector<i64> counts(101, 0);
    for (i64 a = -10; a <= 10; ++a)
        for (i64 b = -10; b <= 10; ++b) {
            i64 n = a * a + b * b;
            if (n >= 1 && n <= 100) counts[size_t(n)] += 1;
        }
    std::map<i64, i64> by_norm;
    for (auto& a : enumerate_ideals(F, 100)) by_norm[a.norm_integral()] += 1;
    bool ok = true;
    for (i64 n = 1; n <= 100; ++n)
        if (by_norm[n] != counts[size_t(n)] / 4) ok = false;
    return {"number_field.gauss_counts", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_norm_multiplicative(Profile) {
    FieldSpec F = make_field(-1);
    auto ideals = enumerate_ideals(F, 50);
    bool ok = true;
    for (size_t t = 0; t < 500; ++t) {
        const Ideal& a = ideals[(t * 7919) % ideals.size()];
        const Ideal& b = ideals[(t * 104729 + 13) % ideals.size()];
        if ((a * b).norm_integral() != a.norm_integral() * b.norm_integral()) ok = false;
    }
    return {"number_field.norm_multiplicative", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_crt(Profile) {
    bool ok = true;
    for (i64 d : {-1LL, -7LL}) {
        FieldSpec F = make_field(d);
        Ideal m = principal_ideal(F, 2) * principal_ideal(F, 3);
        for (i64 t = 0; t < 100; ++t) {
            OElement x((t * 37) % 101 - 50, (t * 59) % 101 - 50);
            OElement y((t * 83) % 101 - 50, (t * 29) % 101 - 50);
            ResidueElement rx = reduce_mod(F, x, m), ry = reduce_mod(F, y, m);
            if (!(residue_mul(rx, ry) == reduce_mod(F, mul(F, x, y), m))) ok = false;
            for (size_t i = 0; i < rx.comps.size(); ++i) {
                Ideal single({{rx.shapes[i].prime, rx.shapes[i].depth}});
                if (!(reduce_mod(F, x, single).comps[0] == rx.comps[i])) ok = false;
            }
        }
    }
    return {"residue.crt", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_smooth_identity(Profile) {
    double worst = 0;
    for (int fi = 0; fi < 2; ++fi) {
        FieldSpec F = fi == 0 ? make_field() : make_field(-1);
        auto ps = prime_ideals_up_to(F, 100);
        auto smooth = enumerate_smooth_ideals(ps, 10000000);
        KahanSum s;
        for (auto& a : smooth) s.add(std::pow(double(a.norm_integral()), -3.0));
        worst = std::max(worst, std::abs(s.value() - zeta_euler_smooth(F, 3.0, 100)));
    }
    return {"zeta.smooth_identity", worst <= 1e-12, worst};
}

inline CheckResult check_factorization(Profile p) {
    FieldSpec F = make_field(-1);
    Character chi4 = make_character(4, {1});
    i64 cap = p == Profile::quick ? 1000 : 10000;
    double worst = 0;
    for (i64 q : primes_up_to(cap)) {
        double lhs = 1.0;
        for (auto& P : split_prime(F, q)) lhs /= 1.0 - std::pow(double(P.norm()), -2.0);
        double x = std::pow(double(q), -2.0);
        double rhs = 1.0 / (1.0 - x) / std::abs(1.0 - chi4(q).real() * x);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return {"zeta.factorization", worst <= 1e-12, worst};
}

inline CheckResult check_euler_consistency(Profile) {
    // |zeta_partial - zeta_euler_smooth| <= reported tail bound at beta = 3
    double worst_margin = 1.0;
    bool ok = true;
    for (int fi = 0; fi < 2; ++fi) {
        FieldSpec F = fi == 0 ? make_field() : make_field(-1);
        double diff = std::abs(zeta_partial(F, 3.0, 10000) - zeta_euler_smooth(F, 3.0, 10000));
        TailBound t = zeta_tail_bound(F, 3.0, 10000);
        if (!(diff <= t.bound && t.rigorous)) ok = false;
        worst_margin = std::min(worst_margin, t.bound - diff);
    }
    return {"zeta.euler_consistency", ok, ok ? 0.0 : worst_margin};
}

inline CheckResult check_ratio_monotone(Profile p) {
    FieldSpec q = make_field();
    Character chi3 = make_character(3, {1});
    std::vector<i64> grid = {10, 100, 1000, 10000};
    if (p == Profile::full) grid.push_back(100000);
    bool ok = true;
    for (double beta = 0.25; beta <= 2.01; beta += 0.25) {
        auto vals = uniqueness_diagnostic_scan(q, chi3, beta, grid);
        for (size_t i = 0; i + 1 < vals.size(); ++i)
            if (vals[i + 1] > vals[i] + 1e-15) ok = false;
    }
    return {"zeta.euler_ratio_monotone", ok, ok ? 0.0 : 1.0};
}

inline CheckResult check_divergence_marker(Profile p) {
    FieldSpec q = make_field();
    i64 big = p == Profile::quick ? 100000 : 1000000;
    double lo = zeta_partial(q, 1.0, 1000), hi = zeta_partial(q, 1.0, big);
    bool ok = hi > lo + 1.0;
    return {"zeta.divergence_marker", ok, hi - lo};
}

inline CheckResult check_kms_residuals(Profile p) {
    double worst_gap = 0;
    bool ok = true;
    i64 cap = p == Profile::quick ? 6 : 10;
    for (int fi = 0; fi < 2; ++fi) {
        FieldSpec F = fi == 0 ? make_field() : make_field(-1);
        Level L = fi == 0 ? detail::q_level(12) : detail::gauss_level();
        for (double beta : {1.2, 2.0}) {
            StateHandle st = StateHandle::extremal(L, beta, L.y0_points()[0], 3000);
            int salt = 0;
            for (const Ideal& a : enumerate_ideals(F, cap)) {
                CylinderFunction f = detail::hashed_function(L, 101 + salt);
                CylinderFunction g = detail::hashed_function(L, 707 + salt++);
                KmsCheck c = kms_residual(st, Monomial{f, a, false}, Monomial{g, a, true});
                if (c.residual > c.tail) ok = false;
                worst_gap = std::max(worst_gap, c.residual);
            }
        }
    }
    return {"kms.residual_within_tail", ok, worst_gap};
}

inline CheckResult check_off_diagonal(Profile) {
    FieldSpec q = make_field();
    Level L = detail::q_level(12);
    StateHandle st = StateHandle::extremal(L, 2.0, L.y0_points()[0], 500);
    CylinderFunction f = detail::hashed_function(L, 5), g = detail::hashed_function(L, 6);
    KmsCheck c =
        kms_residual(st, Monomial{f, principal_ideal(q, 2), false}, Monomial{g, principal_ideal(q, 3), true});
    return {"kms.off_diagonal_zero", c.residual == 0.0, c.residual};
}

inline CheckResult check_projection(Profile) {
    FieldSpec q = make_field();
    PrimeIdeal p2 = split_prime(q, 2)[0], p3 = split_prime(q, 3)[0];
    Level L = Level::make(q, Ideal({{p2, 2}, {p3, 1}}));
    double beta = 2.0;
    double worst = 0;
    for (int salt = 0; salt < 5; ++salt) {
        CylinderFunction f = detail::hashed_function(L, 31 + salt);
        InvariantFunction pf = projection_apply(beta, f);
        InvariantFunction ppf = projection_apply(beta, pf);
        for (size_t i = 0; i < pf.unit_values.size(); ++i)
            worst = std::max(worst, std::abs(ppf.unit_values[i] - pf.unit_values[i]));
        NormCheck nc = projection_norm_check(beta, pf);
        worst = std::max(worst, std::abs(nc.direct - nc.closed));
        if (nc.closed > cylinder_norm_sq(beta, f) + 1e-12) worst = std::max(worst, 1.0);
    }
    InvariantFunction p1 = projection_apply(beta, CylinderFunction::constant(L, 1.0));
    for (auto& v : p1.unit_values) worst = std::max(worst, std::abs(v - 1.0));
    return {"kms.projection_identities", worst <= 1e-10, worst};
}

inline CheckResult check_barycenter(Profile) {
    double worst = 0;
    bool ok = true;
    for (int fi = 0; fi < 2; ++fi) {
        Level L = fi == 0 ? detail::q_level(12) : detail::gauss_level();
        CylinderFunction f = detail::hashed_function(L, 11 + fi);
        std::vector<double> nu(L.y0_points().size(), 1.0 / double(L.y0_points().size()));
        EvalResult bary = state_from_Y0_measure(L, 2.0, nu, f, 100000);
        cplx prod = measure_state_eval(L, 2.0, f);
        double diff = std::abs(bary.value - prod);
        if (diff > bary.tail) ok = false;
        worst = std::max(worst, diff);
    }
    return {"kms.barycenter_product_measure", ok, worst};
}

inline CheckResult check_ground_limit(Profile) {
    Level L = detail::q_level(8);
    double worst = 0;
    for (int w : L.y0_points()) {
        CylinderFunction f = detail::hashed_function(L, w);
        cplx lim = extremal_state_eval(L, 50.0, w, f, 4000).value;
        worst = std::max(worst, std::abs(lim - f(w)));
    }
    return {"kms.ground_state_limit", worst <= 1e-10, worst};
}

inline CheckResult check_diagnostic_dichotomy(Profile p) {
    FieldSpec q = make_field();
    Character chi3 = make_character(3, {1});
    i64 B = p == Profile::quick ? 100000 : 1000000;
    double at1 = uniqueness_diagnostic(q, chi3, 1.0, B);
    double at15 = uniqueness_diagnostic(q, chi3, 1.5, B);
    bool ok = at1 < 0.1 && at15 > 0.01;
    return {"kms.diagnostic_dichotomy", ok, at1};
}

inline CheckResult check_partition(Profile) {
    FieldSpec F = make_field(-1);
    PartitionValue zk = partition_function(F, 2.0, 10000);
    // zeta_Q(2) * L(chi_4, 2) via truncated Dirichlet series at a larger bound
    double zl = zeta_partial(make_field(), 2.0, 2000000) *
                l_partial(make_character(4, {1}), 2.0, 2000000).real();
    double diff = std::abs(zk.value - zl);
    bool ok = diff <= zeta_tail_bound(F, 2.0, 10000).bound && !zk.divergent &&
              partition_function(make_field(), 0.9, 10).divergent;
    return {"kms.partition_function", ok, diff};
}

inline CheckResult check_lattice_laws(Profile p) {
    int trials = p == Profile::quick ? 300 : 1000;
    bool ok = true;
    for (int fi = 0; fi < 2 && ok; ++fi) {
        FieldSpec F = fi == 0 ? make_field() : make_field(-1);
        Level L = fi == 0 ? detail::q_level(12) : detail::gauss_level();
        std::vector<PrimeIdeal> ps;
        for (auto& s : L.shapes()) ps.push_back(s.prime);
        i64 seed = 12345;
        auto next = [&seed]() { return seed = (seed * 6364136223846793005LL + 1442695040888963407LL); };
        auto rnd_lat = [&]() {
            std::vector<std::pair<PrimeIdeal, int>> fs;
            for (auto& P : ps) {
                int e = int(pmod(next(), 5)) - 2;
                if (e != 0) fs.emplace_back(P, e);
            }
            std::vector<CompValue> t;
            for (auto& s : L.shapes()) t.push_back(comp_decode(s, pmod(next(), s.card())));
            return make_lattice(F, L, Ideal(fs), pmod(next(), 2) ? 1 : -1, std::move(t));
        };
        auto arrow_from = [&](const KLattice1& lat) -> std::optional<KLattice1> {
            std::vector<std::pair<PrimeIdeal, int>> fs;
            for (auto& P : ps) {
                int e = int(pmod(next(), 3)) - 1;
                if (e != 0) fs.emplace_back(P, e);
            }
            try {
                KLattice1 cand = apply_arrow(lat, Ideal(fs));
                if (!commensurable(lat, cand)) return std::nullopt;
                return cand;
            } catch (const std::domain_error&) {
                return std::nullopt;
            }
        };
        for (int t = 0; t < trials; ++t) {
            KLattice1 a = rnd_lat();
            if (!commensurable(a, a)) ok = false;
            auto b = arrow_from(a);
            if (!b) continue;
            if (!commensurable(*b, a)) ok = false;
            auto c = arrow_from(*b);
            if (c && !commensurable(a, *c)) ok = false;
            // groupoid coordinates compose
            if (c) {
                GroupoidArrow gab = to_groupoid(a, *b), gbc = to_groupoid(*b, *c), gac = to_groupoid(a, *c);
                if (!(gab.g * gbc.g == gac.g)) ok = false;
            }
            // balancing invariance under every root of unity
            for (const auto& u : roots_of_unity(F)) {
                std::vector<CompValue> t2 = a.t;
                for (size_t i = 0; i < t2.size(); ++i) {
                    const ComponentShape& s = L.shapes()[i];
                    CompValue ur = comp_reduce_element(F, s, u);
                    t2[i] = comp_mul(F, s, comp_inv(F, s, ur), t2[i]);
                }
                KLattice1 bal = make_lattice(F, L, a.ideal_part, a.sign, t2, u);
                if (!commensurable(a, bal)) ok = false;
            }
            // invertibility <-> Y0
            if (lattice_invertible(a) != L.is_y0(L.point_of_comps(a.t))) ok = false;
        }
    }
    return {"klattice.laws", ok, ok ? 0.0 : 1.0};
}

struct NamedCheck {
    std::string name;
    std::function<CheckResult(Profile)> fn;
};

inline std::vector<NamedCheck> all_checks() {
    return {
        {"number_field.ramification_sum", [](Profile p) { return check_ramification_sum(p); }},
        {"number_field.gauss_counts", [](Profile p) { return check_gauss_counts(p); }},
        {"number_field.norm_multiplicative", [](Profile p) { return check_norm_multiplicative(p); }},
        {"residue.crt", [](Profile p) { return check_crt(p); }},
        {"zeta.smooth_identity", [](Profile p) { return check_smooth_identity(p); }},
        {"zeta.factorization", [](Profile p) { return check_factorization(p); }},
        {"zeta.euler_consistency", [](Profile p) { return check_euler_consistency(p); }},
        {"zeta.euler_ratio_monotone", [](Profile p) { return check_ratio_monotone(p); }},
        {"zeta.divergence_marker", [](Profile p) { return check_divergence_marker(p); }},
        {"adelic.normalization", [](Profile p) { return check_normalization(p); }},
        {"adelic.refinement", [](Profile p) { return check_refinement(p); }},
        {"adelic.scaling", [](Profile p) { return check_scaling(p); }},
        {"adelic.zero_fiber", [](Profile p) { return check_zero_fiber(p); }},
        {"adelic.symmetry_free_transitive", [](Profile p) { return check_symmetry(p); }},
        {"kms.beta_rejection", [](Profile p) { return check_beta_rejection(p); }},
        {"kms.residual_within_tail", [](Profile p) { return check_kms_residuals(p); }},
        {"kms.off_diagonal_zero", [](Profile p) { return check_off_diagonal(p); }},
        {"kms.projection_identities", [](Profile p) { return check_projection(p); }},
        {"kms.barycenter_product_measure", [](Profile p) { return check_barycenter(p); }},
        {"kms.ground_state_limit", [](Profile p) { return check_ground_limit(p); }},
        {"kms.diagnostic_dichotomy", [](Profile p) { return check_diagnostic_dichotomy(p); }},
        {"kms.partition_function", [](Profile p) { return check_partition(p); }},
        {"klattice.laws", [](Profile p) { return check_lattice_laws(p); }},
    };
}

struct Report {
    std::vector<CheckResult> rows;
    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const CheckResult& r) { return r.pass; });
    }
};

inline Report run_verify(Profile profile, const std::string& only = "") {
    Report rep;
    bool matched = only.empty();
    for (auto& c : all_checks()) {
        if (!only.empty()) {
            if (c.name != only) continue;
            matched = true;
        }
        rep.rows.push_back(c.fn(profile));
    }
    if (!matched) throw std::invalid_argument("verify: no check named '" + only + "'");
    return rep;
}

} // namespace bcf::verify
