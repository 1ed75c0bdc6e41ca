#include <catch2/catch_amalgamated.hpp>
#include <cstring>

#include "bcfields/zeta.hpp"
#include "oracles.hpp"

using namespace bcf;

TEST_CASE("zeta_partial over Q approaches pi^2/6") {
    double v = zeta_partial(make_field(), 2.0, 1000000);
    double ref = oracle::zeta_reference(2.0);
    CHECK(std::abs(ref - M_PI * M_PI / 6.0) < 1e-12);
    CHECK(std::abs(v - ref) < 1e-5);
    CHECK(v < ref); // partial sums increase to the limit
}

TEST_CASE("zeta_partial edge and oracle cases") {
    CHECK(zeta_partial(make_field(-1), 2.0, 1) == 1.0);
    CHECK(zeta_partial(make_field(), 0.5, 1) == 1.0);

    double v = zeta_partial(make_field(-1), 2.0, 100);
    double ref = oracle::gaussian_zeta_partial(2.0, 100);
    CHECK(std::abs(v - ref) < 1e-13);

    SECTION("identical bytes across repeated runs") {
        double v2 = zeta_partial(make_field(-1), 2.0, 100);
        CHECK(std::memcmp(&v, &v2, sizeof v) == 0);
    }
}

TEST_CASE("ideal count coefficients match the lattice oracle") {
    auto counts = oracle::gaussian_ideal_counts(2000);
    auto a = ideal_count_coefficients(make_field(-1), 2000);
    for (i64 n = 1; n <= 2000; ++n) CHECK(i64(a[size_t(n)]) == counts[size_t(n)]);
}

TEST_CASE("euler product over smooth ideals") {
    CHECK(zeta_euler_smooth(make_field(), 2.0, 1) == 1.0); // empty product
    CHECK(zeta_euler_smooth(make_field(), 2.0, 2) == Catch::Approx(4.0 / 3.0).epsilon(1e-15));

    SECTION("Q(i) factors over p <= 5 equal the rational factor times the chi_4 factor") {
        FieldSpec F = make_field(-1);
        double lhs = 1.0, rhs = 1.0;
        for (i64 p : {2, 3, 5}) {
            for (auto& P : split_prime(F, p)) lhs /= 1.0 - std::pow(double(P.norm()), -2.0);
            double x = std::pow(double(p), -2.0);
            double chi = (p % 4 == 1) ? 1.0 : (p % 4 == 3 ? -1.0 : 0.0);
            rhs /= 1.0 - x;
            if (chi != 0.0) rhs /= 1.0 - chi * x;
        }
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-14));
    }

    SECTION("smoothness identity: product equals the enumerated smooth sum") {
        for (auto d : {std::optional<i64>{}, std::optional<i64>{-1}}) {
            FieldSpec F = d ? make_field(*d) : make_field();
            auto ps = prime_ideals_up_to(F, 100);
            auto smooth = enumerate_smooth_ideals(ps, 10000000);
            KahanSum s;
            for (auto& a : smooth) s.add(std::pow(double(a.norm_integral()), -3.0));
            double direct = s.value();
            double prod = zeta_euler_smooth(F, 3.0, 100);
            // remaining smooth ideals have norm > 1e7: their sum is below the
            // full tail bound 1e-14/2
            CHECK(std::abs(direct - prod) < 1e-12);
        }
    }

    CHECK_THROWS_AS(zeta_euler_smooth(make_field(), -1.0, 10), std::domain_error);
}

TEST_CASE("characters: construction, values, induced evaluation") {
    Character chi4 = make_character(4, {1});
    CHECK(chi4(3) == cplx(-1.0, 0.0));
    CHECK(chi4(1) == cplx(1.0, 0.0));
    CHECK(chi4(2) == cplx(0.0, 0.0));

    Character triv = trivial_character();
    CHECK(triv(7) == cplx(1.0, 0.0));
    CHECK(triv.is_trivial());

    FieldSpec F = make_field(-1);
    CHECK(char_on_ideal(F, chi4, unit_ideal()) == cplx(1.0, 0.0));

    auto p5 = split_prime(F, 5)[0];
    CHECK(char_on_ideal(F, chi4, Ideal({{p5, 1}})) == cplx(1.0, 0.0)); // chi(5 mod 4) = chi(1)

    SECTION("complete multiplicativity on units") {
        Character chi5 = make_character(5, {1}); // order-4 character: complex values
        for (i64 a = 1; a < 5; ++a)
            for (i64 b = 1; b < 5; ++b)
                CHECK(std::abs(chi5(a * b) - chi5(a) * chi5(b)) < 1e-15);
        CHECK(std::abs(chi5(2) - cplx(0.0, 1.0)) < 1e-15); // 2 generates (Z/5)*
    }

    SECTION("validation") {
        CHECK_THROWS_AS(make_character(4, {}), std::invalid_argument);
        CHECK_THROWS_AS(make_character(4, {2}), std::invalid_argument);
        CHECK_THROWS_AS(make_character(12, {1}), std::invalid_argument); // needs 2 exponents
        CHECK_NOTHROW(make_character(12, {1, 1}));
    }

    SECTION("parse") {
        CHECK(parse_character("3:1").modulus == 3);
        CHECK(parse_character("12:1,1").exponents == std::vector<int>{1, 1});
        CHECK(parse_character("1").is_trivial());
    }
}

TEST_CASE("l_partial: identities and the Catalan value") {
    Character triv = trivial_character();
    double z = zeta_partial(make_field(), 2.0, 5000);
    cplx l = l_partial(triv, 2.0, 5000);
    CHECK(l.real() == Catch::Approx(z).epsilon(1e-15));
    CHECK(l.imag() == 0.0);

    Character chi4 = make_character(4, {1});
    cplx cat = l_partial(chi4, 2.0, 1000000);
    double ref = oracle::catalan_reference();
    CHECK(std::abs(cat.real() - 0.9159655941) < 1e-6); // sanity pin
    CHECK(std::abs(cat.real() - ref) < 1e-5);
    CHECK(cat.imag() == 0.0);
}

TEST_CASE("tail bounds dominate the true tail") {
    FieldSpec q = make_field();
    TailBound t = zeta_tail_bound(q, 3.0, 100);
    CHECK(t.rigorous);
    double true_tail = oracle::zeta_reference(3.0) - zeta_partial(q, 3.0, 100);
    CHECK(t.bound >= true_tail);
    CHECK(true_tail > 0);

    SECTION("quadratic field, rigorous regime") {
        FieldSpec F = make_field(-1);
        TailBound t2 = zeta_tail_bound(F, 3.0, 10000);
        double big = zeta_partial(F, 3.0, 2000000);
        double small = zeta_partial(F, 3.0, 10000);
        CHECK(t2.rigorous);
        CHECK(t2.bound >= big - small);
    }
    SECTION("heuristic flag below beta = 2, divergent regime at beta <= 1") {
        CHECK_FALSE(zeta_tail_bound(q, 1.5, 100).rigorous);
        CHECK(std::isinf(zeta_tail_bound(q, 1.0, 100).bound));
        CHECK(std::isinf(zeta_tail_bound(make_field(-1), 0.5, 100).bound));
    }
    SECTION("the bound still dominates in the heuristic window (segment check)") {
        double seg = zeta_partial(q, 1.5, 4000000) - zeta_partial(q, 1.5, 10000);
        CHECK(zeta_tail_bound(q, 1.5, 10000).bound >= seg);
    }
}

TEST_CASE("euler_ratio: trivial character, oracle values, monotonicity") {
    FieldSpec q = make_field();
    Character triv = trivial_character();
    for (i64 B : {1, 10, 1000}) CHECK(euler_ratio(q, triv, {}, 2.0, B) == 1.0);

    Character chi3 = make_character(3, {1});
    auto A = character_ramified_primes(q, chi3);
    REQUIRE(A.size() == 1);
    CHECK(A[0].p == 3);

    SECTION("beta = 2 against the Dirichlet-series oracle") {
        double r = euler_ratio(q, chi3, A, 2.0, 100000);
        double lref = std::abs(oracle::l_reference(oracle::chi3_period(), 2.0).real());
        double zref = oracle::zeta_reference(2.0);
        CHECK(std::abs(r - lref / zref) < 1e-3);
    }
    SECTION("beta = 1 decays below 0.1") {
        CHECK(euler_ratio(q, chi3, A, 1.0, 1000000) < 0.1);
    }
    SECTION("non-increasing in B across the character matrix") {
        std::vector<i64> grid = {2, 5, 10, 100, 1000, 10000, 100000};
        // real characters mod 3 and 4, and a complex order-4 character mod 5
        std::vector<Character> chis = {chi3, make_character(4, {1}), make_character(5, {1})};
        for (const Character& chi : chis) {
            auto Ac = character_ramified_primes(q, chi);
            for (double beta : {0.5, 1.0, 1.5, 2.0}) {
                auto vals = euler_ratio_scan(q, chi, Ac, beta, grid);
                REQUIRE(vals.size() == grid.size());
                for (size_t i = 0; i + 1 < vals.size(); ++i) CHECK(vals[i + 1] <= vals[i]);
                for (size_t i = 0; i < grid.size(); ++i)
                    CHECK(vals[i] == euler_ratio(q, chi, Ac, beta, grid[i]));
            }
        }
    }
}

TEST_CASE("Q(i) euler factors split as zeta times L(chi_4) factors, p <= 10^4") {
    FieldSpec F = make_field(-1);
    Character chi4 = make_character(4, {1});
    double beta = 2.0;
    for (i64 p : primes_up_to(10000)) {
        double lhs = 1.0;
        for (auto& P : split_prime(F, p)) lhs /= 1.0 - std::pow(double(P.norm()), -beta);
        double x = std::pow(double(p), -beta);
        double rhs = 1.0 / (1.0 - x);
        cplx c = chi4(p);
        rhs *= 1.0 / std::abs(1.0 - c.real() * x);
        CHECK(std::abs(lhs - rhs) < 1e-12 * rhs);
    }
}

TEST_CASE("divergence marker at beta <= 1") {
    FieldSpec q = make_field();
    double v3 = zeta_partial(q, 1.0, 1000);
    double v6 = zeta_partial(q, 1.0, 1000000);
    CHECK(v6 > v3 + 1.0);
}
