#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace cmforge {

// Kronecker symbol (a/b) for b > 0. For even b the numerator must be
// 0 or 1 mod 4, and (a/2) is 0, 1, -1 for a = 0 (mod 4), 1 (mod 8), 5 (mod 8).
int kronecker(const mpz_class& a, const mpz_class& b);

// Miller-Rabin; deterministic below 3.3e24, 64 seeded rounds above.
bool is_prime(const mpz_class& n);

// Tonelli-Shanks. Returns the smaller of the two roots, or nothing.
std::optional<mpz_class> sqrt_mod_prime(const mpz_class& a, const mpz_class& p);

bool is_square(const mpz_class& n);

// Trial-division factorization of a positive machine integer.
std::vector<std::pair<long, int>> factor_small(long n);

struct Discriminant {
    long D = 0;
    long f = 1;
    long d = 0;
    std::vector<long> qstars;

    int t() const { return static_cast<int>(qstars.size()); }
    // number of positive q_i*
    int u() const;
};

bool is_fundamental(long d);
std::vector<long> factor_d(long d);
Discriminant split_discriminant(long D);

// u^2 + |D| v^2 = m with v >= 1.
std::optional<std::pair<mpz_class, mpz_class>> cornacchia(long D, const mpz_class& m);

struct CurveOrderParams {
    mpz_class p, u, v;
    mpz_class target_order() const { return p + 1 - u; }
};

using OrderPredicate = std::function<bool(const mpz_class& p, const mpz_class& order)>;

struct SearchOptions {
    unsigned p_bits = 64;
    std::uint64_t seed = 1;
    std::uint64_t budget = 200000;
    bool use_210 = true;  // only honoured when D = 5 (mod 8)
};

std::optional<CurveOrderParams> search_fixed_D(const Discriminant& disc, const OrderPredicate& pred,
                                               const SearchOptions& opt);

std::optional<std::pair<Discriminant, CurveOrderParams>> search_fixed_p(const mpz_class& p,
                                                                        const std::vector<long>& discs,
                                                                        const OrderPredicate& pred);

// Negative discriminants D with lo <= |D| <= hi, in order of increasing |D|.
std::vector<long> discriminant_range(long lo, long hi);

}  // namespace cmforge
