#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bcfields/number_field.hpp"
#include "oracles.hpp"

using namespace bcf;

TEST_CASE("make_field derives discriminant, units and the cn1 flag") {
    FieldSpec gauss = make_field(-1);
    CHECK(gauss.discriminant == -4);
    CHECK(gauss.w_K == 4);
    CHECK(gauss.cn1_imaginary);
    CHECK(gauss.is_imaginary);

    FieldSpec q = make_field();
    CHECK(q.discriminant == 1);
    CHECK(q.w_K == 2);

    FieldSpec real5 = make_field(5);
    CHECK(real5.discriminant == 5);
    CHECK_FALSE(real5.is_imaginary);
    CHECK_FALSE(real5.cn1_imaginary);

    FieldSpec eis = make_field(-3);
    CHECK(eis.discriminant == -3);
    CHECK(eis.w_K == 6);

    CHECK_THROWS_AS(make_field(0), std::invalid_argument);
    CHECK_THROWS_AS(make_field(1), std::invalid_argument);
    CHECK_THROWS_AS(make_field(12), std::invalid_argument); // not squarefree
    CHECK_THROWS_AS(make_field(-4), std::invalid_argument);
}

TEST_CASE("roots of unity match the w_K count and have norm one") {
    for (i64 d : {-1LL, -2LL, -3LL, -7LL, -163LL}) {
        FieldSpec F = make_field(d);
        auto us = roots_of_unity(F);
        CHECK(i64(us.size()) == F.w_K);
        for (auto& u : us) CHECK(elem_norm(F, u) == 1);
    }
}

TEST_CASE("field descriptors parse") {
    CHECK(parse_field("Q").is_rational());
    CHECK(parse_field("Q(sqrt-1)").d == -1);
    CHECK(parse_field("Q(sqrt5)").d == 5);
    CHECK_THROWS_AS(parse_field("Q(sqrt)"), std::exception);
    CHECK_THROWS_AS(parse_field("F7"), std::exception);
}

TEST_CASE("prime splitting in Q(i)") {
    FieldSpec F = make_field(-1);

    auto five = split_prime(F, 5);
    REQUIRE(five.size() == 2);
    CHECK(five[0].f == 1);
    CHECK(five[1].f == 1);
    CHECK(five[0].root == 2);
    CHECK(five[1].root == 3);

    auto three = split_prime(F, 3);
    REQUIRE(three.size() == 1);
    CHECK(three[0].f == 2);
    CHECK(three[0].norm() == 9);

    auto two = split_prime(F, 2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].ramified);
    CHECK(two[0].norm() == 2);

    CHECK_THROWS_AS(split_prime(F, 6), std::invalid_argument);
}

TEST_CASE("split roots agree with exhaustive search, sum of e*f is 2") {
    for (i64 d : {-1LL, -2LL, -3LL, -7LL, 5LL, -11LL, -19LL}) {
        FieldSpec F = make_field(d);
        for (i64 p : primes_up_to(1000)) {
            auto ps = split_prime(F, p);
            int ef = 0;
            for (auto& P : ps) ef += P.f * P.ramification_index();
            CHECK(ef == 2);
            if (ps.size() == 2) {
                for (auto& P : ps) {
                    i64 v = pmod(P.root * P.root - F.s1 * P.root - F.s0, p);
                    CHECK(v == 0);
                }
                if (p > 2) {
                    // the discriminant has two square roots mod an odd split prime
                    auto rs = oracle::quadratic_roots_mod(pmod(F.s1 * F.s1 + 4 * F.s0, p), p);
                    CHECK(rs.size() == 2);
                }
            }
        }
    }
}

TEST_CASE("ideal enumeration matches the Gaussian lattice oracle") {
    FieldSpec F = make_field(-1);
    auto counts = oracle::gaussian_ideal_counts(100);
    auto ideals = enumerate_ideals(F, 100);

    std::map<i64, i64> by_norm;
    for (auto& a : ideals) by_norm[a.norm_integral()] += 1;
    i64 total = 0;
    for (i64 n = 1; n <= 100; ++n) {
        CHECK(by_norm[n] == counts[size_t(n)]);
        total += counts[size_t(n)];
    }
    CHECK(i64(ideals.size()) == total);

    SECTION("enumeration is sorted and deterministic") {
        auto again = enumerate_ideals(F, 100);
        CHECK(again.size() == ideals.size());
        for (size_t i = 0; i < ideals.size(); ++i) CHECK(again[i] == ideals[i]);
        for (size_t i = 1; i < ideals.size(); ++i)
            CHECK(ideals[i - 1].norm_integral() <= ideals[i].norm_integral());
    }
}

TEST_CASE("ideal enumeration over Q and edge cases") {
    FieldSpec q = make_field();
    auto ideals = enumerate_ideals(q, 5);
    REQUIRE(ideals.size() == 5);
    for (i64 n = 1; n <= 5; ++n) CHECK(ideals[size_t(n - 1)].norm_integral() == n);

    CHECK(enumerate_ideals(q, 1).size() == 1);
    CHECK(enumerate_ideals(make_field(-1), 1).size() == 1);
    CHECK(enumerate_ideals(make_field(-1), 1)[0].is_unit());

    // 9 Gaussian ideals of norm <= 10: (1), p2, p5 (x2), p2^2, p2 p5 (x2), p3, p2^3
    CHECK(enumerate_ideals(make_field(-1), 10).size() == 9);
}

TEST_CASE("ideal norms are multiplicative") {
    FieldSpec F = make_field(-1);
    auto ideals = enumerate_ideals(F, 60);
    std::mt19937_64 rng(20240811);
    std::uniform_int_distribution<size_t> pick(0, ideals.size() - 1);
    for (int t = 0; t < 500; ++t) {
        const Ideal& a = ideals[pick(rng)];
        const Ideal& b = ideals[pick(rng)];
        CHECK((a * b).norm_integral() == a.norm_integral() * b.norm_integral());
    }
    CHECK(unit_ideal().norm_integral() == 1);

    SECTION("fractional norms") {
        Ideal frac = ideals[5] * ideals[7].inverse();
        Rational n = frac.norm();
        CHECK(n == Rational(ideals[5].norm_integral(), ideals[7].norm_integral()));
    }
}

TEST_CASE("canonical generators in Q(i)") {
    FieldSpec F = make_field(-1);
    auto five = split_prime(F, 5);

    // root 2 and root 3 give the two conjugate primes over 5
    for (auto& P : five) {
        Ideal a({{P, 1}});
        OElement g = canonical_generator(F, a);
        CHECK(elem_norm(F, g) == 5);
        // theta = i reduces to the root modulo the prime: a + b*root = 0 (mod 5)
        CHECK(pmod(g.a + g.b * P.root, 5) == 0);
    }

    CHECK(canonical_generator(F, unit_ideal()) == OElement(1));

    auto two = split_prime(F, 2);
    Ideal p2sq({{two[0], 2}});
    OElement g2 = canonical_generator(F, p2sq);
    CHECK(elem_norm(F, g2) == 4);
    CHECK(g2 == OElement(2, 0)); // canonical associate of (1+i)^2 = 2i

    Ideal p2({{two[0], 1}});
    CHECK(canonical_generator(F, p2) == OElement(1, 1)); // 1+i

    SECTION("unsupported fields error") {
        FieldSpec real = make_field(5);
        CHECK_THROWS_AS(canonical_generator(real, unit_ideal() * principal_ideal(real, 2)),
                        std::domain_error);
    }
}

TEST_CASE("principal ideals recover element norms") {
    FieldSpec F = make_field(-1);
    CHECK(principal_ideal(F, 2).norm_integral() == 4);
    CHECK(principal_ideal(F, 5).norm_integral() == 25);
    CHECK(principal_ideal(F, 6).norm_integral() == 36);
    FieldSpec q = make_field();
    CHECK(principal_ideal(q, 12).norm_integral() == 12);
}
