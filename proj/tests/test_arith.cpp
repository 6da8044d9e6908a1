#include "cmforge/arith.hpp"
#include "cmforge/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <optional>

using namespace cmforge;
using testing::Gen;

namespace {

int euler_legendre(long a, long p) {
    mpz_class r;
    mpz_class base = ((a % p) + p) % p;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), mpz_class((p - 1) / 2).get_mpz_t(), mpz_class(p).get_mpz_t());
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

bool trial_prime(long n) {
    if (n < 2) return false;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

std::optional<std::pair<long, long>> brute_rep(long absD, long m) {
    for (long v = 1; absD * v * v <= m; ++v) {
        long r = m - absD * v * v;
        long u = static_cast<long>(std::llround(std::sqrt(static_cast<double>(r))));
        for (long w = std::max(0L, u - 1); w <= u + 1; ++w)
            if (w * w == r) return std::make_pair(w, v);
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("kronecker symbol values") {
    CHECK(kronecker(17, 2) == 1);
    CHECK(kronecker(5, 2) == -1);
    CHECK(kronecker(8, 2) == 0);
    CHECK(kronecker(5, 7) == -1);
    for (long a : {-40L, 0L, 3L, 123456789L}) CHECK(kronecker(a, 1) == 1);
    CHECK_THROWS_AS(kronecker(3, 2), InvalidParameters);
    CHECK_THROWS_AS(kronecker(6, 4), InvalidParameters);
}

TEST_CASE("kronecker agrees with Euler's criterion at odd primes") {
    Gen g(11);
    for (long p : testing::small_primes(400)) {
        if (p == 2) continue;
        for (int k = 0; k < 20; ++k) {
            long a = g.range(-5000, 5000);
            CHECK(kronecker(a, p) == euler_legendre(a, p));
        }
    }
}

TEST_CASE("kronecker is multiplicative in the denominator") {
    Gen g(12);
    for (int k = 0; k < 2000; ++k) {
        long a = g.range(-3000, 3000);
        if (((a % 4) + 4) % 4 > 1) a -= ((a % 4) + 4) % 4;  // keep even denominators legal
        long b = g.range(1, 300), c = g.range(1, 300);
        CHECK(kronecker(a, b * c) == kronecker(a, b) * kronecker(a, c));
    }
}

TEST_CASE("primality and square roots") {
    for (long n = -5; n < 20000; ++n) CHECK(is_prime(n) == trial_prime(n));
    CHECK(is_prime(mpz_class("18446744073709551557")));
    CHECK_FALSE(is_prime(mpz_class("18446744073709551559")));

    CHECK(*sqrt_mod_prime(5, 41) == 13);
    CHECK(*sqrt_mod_prime(0, 41) == 0);
    CHECK_FALSE(sqrt_mod_prime(3, 5).has_value());

    Gen g(13);
    for (long p : testing::small_primes(3000)) {
        if (p == 2) continue;
        long a = g.range(0, p - 1);
        auto r = sqrt_mod_prime(a, p);
        CHECK(r.has_value() == (euler_legendre(a, p) >= 0));
        if (r) {
            CHECK((*r * *r - a) % p == 0);
            CHECK(*r <= p - *r);
        }
    }
}

TEST_CASE("split_discriminant and factor_d") {
    Discriminant d40 = split_discriminant(-40);
    CHECK(d40.f == 1);
    CHECK(d40.d == -40);
    CHECK(d40.qstars == std::vector<long>{5, -8});

    Discriminant d12 = split_discriminant(-12);
    CHECK(d12.f == 2);
    CHECK(d12.d == -3);
    CHECK(split_discriminant(-4).qstars == std::vector<long>{-4});
    CHECK(factor_d(-15) == std::vector<long>{5, -3});
    CHECK(factor_d(-84) == std::vector<long>{-3, -7, -4});

    CHECK_THROWS_AS(split_discriminant(5), InvalidParameters);
    CHECK_THROWS_AS(split_discriminant(-6), InvalidParameters);
    CHECK_THROWS_AS(split_discriminant(-7 + 1), InvalidParameters);
    CHECK_THROWS_AS(factor_d(-12), InvalidParameters);
}

TEST_CASE("factor_d re-multiplies to d with coprime parts") {
    for (long d : testing::fundamental_discs(3000)) {
        auto q = factor_d(d);
        long prod = 1;
        int even = 0;
        for (long x : q) {
            prod *= x;
            if (x % 2 == 0) {
                ++even;
                CHECK((x == -4 || x == 8 || x == -8));
            } else {
                CHECK(((x % 4) + 4) % 4 == 1);
                CHECK(trial_prime(std::labs(x)));
            }
        }
        CHECK(prod == d);
        CHECK(even <= 1);
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = i + 1; j < q.size(); ++j) CHECK(std::gcd(q[i], q[j]) == 1);
        // +8 leads; -4 and -8 close the list; otherwise positives precede negatives
        for (size_t i = 0; i < q.size(); ++i) {
            if (q[i] == 8) CHECK(i == 0);
            if (q[i] == -4 || q[i] == -8) CHECK(i + 1 == q.size());
        }
        for (size_t i = 1; i < q.size(); ++i)
            if (q[i] % 2 != 0 && q[i - 1] % 2 != 0) CHECK((q[i - 1] > 0 || q[i] < 0));
    }
}

TEST_CASE("split_discriminant decomposes D = f^2 d") {
    for (long D = -3; D >= -2000; --D) {
        long r = ((D % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        Discriminant disc = split_discriminant(D);
        CHECK(disc.f * disc.f * disc.d == D);
        CHECK(is_fundamental(disc.d));
    }
}

TEST_CASE("cornacchia examples") {
    auto a = cornacchia(-40, 164);
    REQUIRE(a.has_value());
    CHECK(a->first == 2);
    CHECK(a->second == 2);
    CHECK_FALSE(cornacchia(-40, 28).has_value());
    auto b = cornacchia(-3, 52);
    REQUIRE(b.has_value());
    CHECK(b->first * b->first + 3 * b->second * b->second == 52);
}

TEST_CASE("cornacchia agrees with a brute-force scan on m = 4p") {
    auto primes = testing::small_primes(2000);
    for (long D = -3; D >= -500; --D) {
        long r = ((D % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        for (long p : primes) {
            auto fast = cornacchia(D, 4 * p);
            auto slow = brute_rep(-D, 4 * p);
            REQUIRE_MESSAGE(fast.has_value() == slow.has_value(), "D=" << D << " p=" << p);
            if (fast) CHECK(fast->first * fast->first + (-D) * fast->second * fast->second == 4 * p);
        }
    }
    Gen g(14);
    auto big = testing::small_primes(250000);
    for (int k = 0; k < 3000; ++k) {
        long p = g.pick(big), D = -g.range(3, 500);
        if (((D % 4) + 4) % 4 > 1) continue;
        auto fast = cornacchia(D, 4 * p);
        CHECK(fast.has_value() == brute_rep(-D, 4 * p).has_value());
    }
}

TEST_CASE("search_fixed_D examples") {
    Discriminant d40 = split_discriminant(-40);
    SearchOptions so;
    so.p_bits = 6;
    auto hit = search_fixed_D(d40, [](const mpz_class& p, const mpz_class&) { return p >= 40 && p <= 60; }, so);
    REQUIRE(hit.has_value());
    CHECK(hit->p == 41);
    CHECK(abs(hit->u) == 2);
    CHECK(hit->v == 2);

    Discriminant d3 = split_discriminant(-3);
    auto h13 = search_fixed_D(d3, [](const mpz_class& p, const mpz_class&) { return p == 13; }, so);
    REQUIRE(h13.has_value());
    CHECK(abs(h13->u) == 7);
    CHECK(h13->v == 1);

    SearchOptions big;
    big.budget = 2000;
    CHECK_FALSE(search_fixed_D(d40, [](const mpz_class&, const mpz_class&) { return false; }, big).has_value());
}

TEST_CASE("search_fixed_D output satisfies the CM preconditions") {
    for (long D : {-3L, -4L, -40L, -84L, -420L, -11L, -35L, -48L}) {
        Discriminant disc = split_discriminant(D);
        for (unsigned bits : {20u, 64u, 100u}) {
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                SearchOptions so;
                so.p_bits = bits;
                so.seed = seed;
                auto hit = search_fixed_D(disc, [](const mpz_class&, const mpz_class&) { return true; }, so);
                REQUIRE(hit.has_value());
                const auto& c = *hit;
                CHECK(is_prime(c.p));
                CHECK(c.u * c.u + mpz_class(-D) * c.v * c.v == 4 * c.p);
                CHECK(kronecker(mpz_class(D), c.p) == 1);
                CHECK(kronecker(mpz_class(disc.d), c.p) == 1);
                CHECK(mpz_class(disc.f) % c.p != 0);
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), c.u.get_mpz_t(), c.p.get_mpz_t());
                CHECK(g == 1);
                CHECK(c.target_order() == c.p + 1 - c.u);
            }
        }
    }
}

TEST_CASE("search_fixed_D is deterministic for a seed") {
    Discriminant disc = split_discriminant(-420);
    SearchOptions so;
    so.seed = 77;
    auto any = [](const mpz_class&, const mpz_class&) { return true; };
    auto a = search_fixed_D(disc, any, so), b = search_fixed_D(disc, any, so);
    REQUIRE(a.has_value());
    CHECK(a->p == b->p);
    CHECK(a->u == b->u);
}

TEST_CASE("the 210 construction avoids small factors") {
    for (long D : {-3L, -11L, -19L, -35L, -43L, -67L}) {
        Discriminant disc = split_discriminant(D);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SearchOptions so;
            so.seed = seed;
            so.p_bits = 64;
            auto hit = search_fixed_D(disc, [](const mpz_class&, const mpz_class&) { return true; }, so);
            REQUIRE(hit.has_value());
            for (long q : {2L, 3L, 5L, 7L}) {
                CHECK(hit->p % q != 0);
                CHECK(hit->target_order() % q != 0);
            }
        }
    }
}

TEST_CASE("search_fixed_p") {
    auto hit = search_fixed_p(41, {-40}, [](const mpz_class& p, const mpz_class& o) { return o == p + 3; });
    REQUIRE(hit.has_value());
    CHECK(hit->first.D == -40);
    CHECK(hit->second.u == -2);
    CHECK(hit->second.target_order() == 44);

    // (-39/41) = (2/41) = 1, but 164 = u^2 + 39 v^2 has no solution
    CHECK(kronecker(-39, 41) == 1);
    CHECK_FALSE(search_fixed_p(41, {-39}, [](const mpz_class&, const mpz_class&) { return true; }).has_value());
    CHECK_FALSE(search_fixed_p(5, {}, [](const mpz_class&, const mpz_class&) { return true; }).has_value());
    CHECK_THROWS_AS(search_fixed_p(4, {-40}, [](const mpz_class&, const mpz_class&) { return true; }),
                    InvalidParameters);

    auto all = [](const mpz_class&, const mpz_class&) { return true; };
    for (long p : {41L, 101L, 1009L}) {
        for (long D : discriminant_range(3, 200)) {
            auto h = search_fixed_p(p, {D}, all);
            if (!h) continue;
            CHECK(kronecker(mpz_class(D), p) == 1);
            CHECK(h->second.u * h->second.u + mpz_class(-D) * h->second.v * h->second.v == 4 * p);
        }
    }
}
