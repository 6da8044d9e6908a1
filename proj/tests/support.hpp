#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/forms.hpp"
#include "cmforge/genusfield.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <vector>

namespace testing {

// Small hand-rolled generators on top of a seeded engine.
struct Gen {
    std::mt19937_64 eng;
    explicit Gen(std::uint64_t seed) : eng(seed) {}

    long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng); }
    bool coin() { return eng() & 1u; }

    template <class T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<size_t>(range(0, static_cast<long>(v.size()) - 1))]; }

    mpq_class rational(long num_bound = 20, long den_bound = 6) {
        mpq_class q(range(-num_bound, num_bound), range(1, den_bound));
        q.canonicalize();
        return q;
    }

    // random element of SL2(Z) with entries bounded by about `bound`
    cmforge::Sl2 sl2(long bound) {
        for (;;) {
            long a = range(-bound, bound), c = range(-bound, bound);
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), mpz_class(a).get_mpz_t(), mpz_class(c).get_mpz_t());
            if (g != 1) continue;
            // a d - b c = 1 through the extended gcd, then shift d, b by a multiple of (c, a)
            mpz_class s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), mpz_class(a).get_mpz_t(), mpz_class(c).get_mpz_t());
            cmforge::Sl2 m{a, -t, c, s};
            long k = range(-2, 2);
            m.b += k * m.a;
            m.d += k * m.c;
            if (m.det() == 1) return m;
        }
    }

    cmforge::GFElem element(const cmforge::FieldPtr& F) {
        cmforge::GFElem x(F);
        for (unsigned S = 0; S < F->dim(); ++S)
            if (range(0, 3) != 0) x[S] = rational();
        return x;
    }
};

inline std::vector<long> fundamental_discs(long max_abs) {
    std::vector<long> out;
    for (long d = -3; d >= -max_abs; --d)
        if (cmforge::is_fundamental(d)) out.push_back(d);
    return out;
}

inline std::vector<long> small_primes(long below) {
    std::vector<long> out;
    std::vector<bool> comp(below, false);
    for (long i = 2; i < below; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (long j = i * i; j < below; j += i) comp[j] = true;
    }
    return out;
}

}  // namespace testing
