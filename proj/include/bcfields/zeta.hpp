#pragma once

// Truncated Dedekind zeta functions, Dirichlet L-series, tail bounds, and
// the Euler-product ratio R_B.  All sums run in increasing-norm order with
// compensated accumulation so results are reproducible bit for bit.

#include "characters.hpp"

namespace bcf {

// a_K(n) = #{integral ideals of norm n} for n <= B, via prime splitting and
// multiplicativity (independent of any zeta = zeta * L factorization).
inline std::vector<std::uint16_t> ideal_count_coefficients(const FieldSpec& F, i64 B) {
    if (B < 1) throw std::invalid_argument("ideal_count_coefficients: bound must be >= 1");
    std::vector<std::uint32_t> spf(size_t(B) + 1, 0);
    for (i64 i = 2; i <= B; ++i) {
        if (spf[size_t(i)] == 0)
            for (i64 j = i; j <= B; j += i)
                if (spf[size_t(j)] == 0) spf[size_t(j)] = std::uint32_t(i);
    }
    auto prime_power_count = [&](i64 p, int j) -> i64 {
        if (F.is_rational()) return 1;
        int k = kronecker_at_prime(F.discriminant, p);
        if (k == 1) return j + 1;
        if (k == 0) return 1;
        return j % 2 == 0 ? 1 : 0;
    };
    std::vector<std::uint16_t> a(size_t(B) + 1, 0);
    a[1] = 1;
    for (i64 n = 2; n <= B; ++n) {
        i64 p = spf[size_t(n)], m = n;
        int j = 0;
        while (m % p == 0) { m /= p; ++j; }
        a[size_t(n)] = std::uint16_t(prime_power_count(p, j) * a[size_t(m)]);
    }
    return a;
}

// sum over integral ideals of norm <= B of N^(-beta)
inline double zeta_partial(const FieldSpec& F, double beta, i64 B) {
    if (B < 1) throw std::invalid_argument("zeta_partial: bound must be >= 1");
    KahanSum s;
    if (F.is_rational()) {
        for (i64 n = 1; n <= B; ++n) s.add(std::pow(double(n), -beta));
        return s.value();
    }
    auto a = ideal_count_coefficients(F, B);
    for (i64 n = 1; n <= B; ++n)
        if (a[size_t(n)]) s.add(double(a[size_t(n)]) * std::pow(double(n), -beta));
    return s.value();
}

// prod over prime ideals of norm <= B of (1 - N^(-beta))^(-1); this equals
// the Dirichlet sum over all B-smooth ideals
inline double zeta_euler_smooth(const FieldSpec& F, double beta, i64 B) {
    if (beta <= 0) throw std::domain_error("zeta_euler_smooth: beta must be positive");
    if (B < 1) throw std::invalid_argument("zeta_euler_smooth: bound must be >= 1");
    double prod = 1.0;
    for (const auto& P : prime_ideals_up_to(F, B))
        prod /= 1.0 - std::pow(double(P.norm()), -beta);
    return prod;
}

struct TailBound {
    i64 B = 1;
    double beta = 0;
    double bound = 0;
    bool rigorous = false;
};

// Upper bound for sum_{N(a) > B} N(a)^(-beta).  Over Q this is the integral
// bound B^(1-beta)/(beta-1); over a quadratic field a_K(n) <= d(n) gives
// 2*zeta(beta)*(sqrt B)^(1-beta)/(beta-1).  Divergent regime reports
// infinity.  The rigorous flag is only claimed for beta > 2.
inline TailBound zeta_tail_bound(const FieldSpec& F, double beta, i64 B) {
    TailBound t{B, beta, 0.0, false};
    if (beta <= 1.0) {
        t.bound = std::numeric_limits<double>::infinity();
        return t;
    }
    if (F.is_rational()) {
        t.bound = std::pow(double(B), 1.0 - beta) / (beta - 1.0);
    } else {
        KahanSum zs;
        for (i64 n = 1; n <= 64; ++n) zs.add(std::pow(double(n), -beta));
        double zeta_upper = zs.value() + std::pow(64.0, 1.0 - beta) / (beta - 1.0);
        t.bound = 2.0 * zeta_upper * std::pow(std::sqrt(double(B)), 1.0 - beta) / (beta - 1.0);
    }
    t.rigorous = beta > 2.0;
    return t;
}

// partial Dirichlet L-series sum_{n <= B} chi(n) n^(-beta)
inline cplx l_partial(const Character& chi, double beta, i64 B) {
    if (B < 1) throw std::invalid_argument("l_partial: bound must be >= 1");
    KahanSum re, im;
    for (i64 n = 1; n <= B; ++n) {
        cplx c = chi(n);
        if (c == cplx(0.0, 0.0)) continue;
        double w = std::pow(double(n), -beta);
        re.add(c.real() * w);
        im.add(c.imag() * w);
    }
    return {re.value(), im.value()};
}

// R_B = prod_{N(p) <= B} |1 - N(p)^-beta| / prod_{N(p) <= B, p not in A} |1 - chi(p) N(p)^-beta|.
// Each prime contributes a factor <= 1, so R_B is non-increasing in B.
inline double euler_ratio(const FieldSpec& F, const Character& chi, const std::vector<PrimeIdeal>& A,
                          double beta, i64 B) {
    if (beta <= 0) throw std::domain_error("euler_ratio: beta must be positive");
    double r = 1.0;
    for (const auto& P : prime_ideals_up_to(F, B)) {
        double x = std::pow(double(P.norm()), -beta);
        double num = std::abs(1.0 - x);
        bool excluded = std::find(A.begin(), A.end(), P) != A.end();
        r *= excluded ? num : num / std::abs(1.0 - char_on_prime(chi, P) * x);
    }
    return r;
}

// values of R_B at each checkpoint (ascending), sharing one prime scan
inline std::vector<double> euler_ratio_scan(const FieldSpec& F, const Character& chi,
                                            const std::vector<PrimeIdeal>& A, double beta,
                                            const std::vector<i64>& checkpoints) {
    if (beta <= 0) throw std::domain_error("euler_ratio: beta must be positive");
    std::vector<i64> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    std::vector<double> out;
    double r = 1.0;
    size_t c = 0;
    auto ps = prime_ideals_up_to(F, cps.empty() ? 1 : cps.back());
    for (const auto& P : ps) {
        while (c < cps.size() && P.norm() > cps[c]) { out.push_back(r); ++c; }
        double x = std::pow(double(P.norm()), -beta);
        double num = std::abs(1.0 - x);
        bool excluded = std::find(A.begin(), A.end(), P) != A.end();
        r *= excluded ? num : num / std::abs(1.0 - char_on_prime(chi, P) * x);
    }
    while (c++ < cps.size()) out.push_back(r);
    return out;
}

} // namespace bcf
