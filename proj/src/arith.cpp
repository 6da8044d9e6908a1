#include "cmforge/arith.hpp"

#include "cmforge/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <tuple>

namespace cmforge {

namespace {

long mod4(long x) { return ((x % 4) + 4) % 4; }

bool miller_rabin_round(const mpz_class& n, const mpz_class& a, const mpz_class& d, unsigned long s) {
    mpz_class x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long r = 1; r < s; ++r) {
        x = x * x % n;
        if (x == n - 1) return true;
        if (x == 1) return false;
    }
    return false;
}

}  // namespace

int kronecker(const mpz_class& a, const mpz_class& b) {
    if (b <= 0) throw InvalidParameters("kronecker: denominator must be positive");
    mpz_class bb = b;
    int result = 1;
    if (mpz_even_p(bb.get_mpz_t())) {
        mpz_class r = a % 4;
        if (r < 0) r += 4;
        if (r == 2 || r == 3) throw InvalidParameters("kronecker: (a/2) needs a = 0 or 1 mod 4");
    }
    while (mpz_even_p(bb.get_mpz_t())) {
        bb /= 2;
        mpz_class r8 = a % 8;
        if (r8 < 0) r8 += 8;
        if (r8 == 0 || r8 == 4) return 0;
        if (r8 == 5) result = -result;
    }
    if (bb == 1) return result;
    return result * mpz_jacobi(a.get_mpz_t(), bb.get_mpz_t());
}

bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    static const int small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (int q : small) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    for (int q : small)
        if (!miller_rabin_round(n, mpz_class(q), d, s)) return false;
    static const mpz_class det_bound("3317044064679887385961981");
    if (n < det_bound) return true;
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(mpz_class(n % 1000003));
    for (int i = 0; i < 64; ++i) {
        mpz_class a = rng.get_z_range(n - 3) + 2;
        if (!miller_rabin_round(n, a, d, s)) return false;
    }
    return true;
}

bool is_square(const mpz_class& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

std::optional<mpz_class> sqrt_mod_prime(const mpz_class& a_in, const mpz_class& p) {
    mpz_class a = a_in % p;
    if (a < 0) a += p;
    if (a == 0) return mpz_class(0);
    if (p == 2) return a;
    if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1) return std::nullopt;

    mpz_class q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    q >>= s;
    mpz_class z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;

    mpz_class c, r, t, e;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    unsigned long m = s;
    while (t != 1) {
        unsigned long i = 0;
        mpz_class tt = t;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        mpz_class b = c;
        for (unsigned long k = 0; k + i + 1 < m; ++k) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    mpz_class other = p - r;
    return r < other ? r : other;
}

std::vector<std::pair<long, int>> factor_small(long n) {
    std::vector<std::pair<long, int>> out;
    if (n < 0) n = -n;
    for (long q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
        int e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        if (e) out.emplace_back(q, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

int Discriminant::u() const {
    return static_cast<int>(std::count_if(qstars.begin(), qstars.end(), [](long q) { return q > 0; }));
}

static bool squarefree(long n) {
    for (auto& [q, e] : factor_small(n))
        if (e > 1) return false;
    return true;
}

bool is_fundamental(long d) {
    if (d == 0 || d == 1) return false;
    if (mod4(d) == 1) return squarefree(d);
    if (mod4(d) != 0) return false;
    long m = d / 4;
    return mod4(m) >= 2 && squarefree(m);
}

std::vector<long> factor_d(long d) {
    if (d >= 0 || !is_fundamental(d)) throw InvalidParameters("factor_d: not a negative fundamental discriminant");
    std::vector<long> pos, neg;
    long odd_product = 1;
    for (auto& [q, e] : factor_small(d)) {
        if (q == 2) continue;
        long qs = (q % 4 == 1) ? q : -q;
        odd_product *= qs;
        (qs > 0 ? pos : neg).push_back(qs);
    }
    auto by_abs = [](long x, long y) { return std::labs(x) < std::labs(y); };
    std::sort(pos.begin(), pos.end(), by_abs);
    std::sort(neg.begin(), neg.end(), by_abs);
    long even = d / odd_product;
    std::vector<long> out;
    if (even == 8) out.push_back(8);
    out.insert(out.end(), pos.begin(), pos.end());
    out.insert(out.end(), neg.begin(), neg.end());
    if (even == -4 || even == -8) out.push_back(even);
    check_internal(even == 1 || even == 8 || even == -4 || even == -8, "factor_d: unexpected even part");
    return out;
}

Discriminant split_discriminant(long D) {
    if (D >= 0) throw InvalidParameters("discriminant must be negative");
    if (mod4(D) != 0 && mod4(D) != 1) throw InvalidParameters("discriminant must be 0 or 1 mod 4");
    long f = 1;
    for (auto& [q, e] : factor_small(D))
        for (int i = 0; i < e / 2; ++i) f *= q;
    long d = D / (f * f);
    if (mod4(d) == 2 || mod4(d) == 3) {
        f /= 2;
        d *= 4;
    }
    Discriminant disc;
    disc.D = D;
    disc.f = f;
    disc.d = d;
    disc.qstars = factor_d(d);
    return disc;
}

std::optional<std::pair<mpz_class, mpz_class>> cornacchia(long D, const mpz_class& m) {
    mpz_class absD = -D;
    if (m <= 0 || absD > m) return std::nullopt;

    auto scan = [&]() -> std::optional<std::pair<mpz_class, mpz_class>> {
        mpz_class vmax = sqrt(mpz_class(m / absD));
        for (mpz_class v = 1; v <= vmax; ++v) {
            mpz_class r = m - absD * v * v;
            if (is_square(r)) return std::make_pair(mpz_class(sqrt(r)), v);
        }
        return std::nullopt;
    };

    if (m % 4 != 0) return scan();
    mpz_class p = m / 4;
    if (p < 3 || absD % p == 0 || !is_prime(p)) return scan();

    auto x0 = sqrt_mod_prime(mpz_class(D), p);
    if (!x0) return std::nullopt;
    mpz_class b = *x0;
    if ((b % 2 == 0) != (absD % 2 == 0)) b = p - b;
    mpz_class a = 2 * p;
    mpz_class l = sqrt(mpz_class(4 * p));
    while (b > l) {
        mpz_class r = a % b;
        a = b;
        b = r;
    }
    mpz_class rest = m - b * b;
    if (rest % absD != 0) return std::nullopt;
    mpz_class c = rest / absD;
    if (c < 1 || !is_square(c)) return std::nullopt;
    return std::make_pair(b, mpz_class(sqrt(c)));
}

namespace {

struct Candidate {
    mpz_class p, u, v;
};

// Tries p+1-u then p+1+u; fills `out` with the matching sign.
bool try_orders(const Candidate& c, const OrderPredicate& pred, CurveOrderParams& out) {
    for (int sign : {1, -1}) {
        mpz_class u = sign * c.u;
        if (pred(c.p, c.p + 1 - u)) {
            out = {c.p, u, c.v};
            return true;
        }
        if (c.u == 0) break;
    }
    return false;
}

bool admissible(const mpz_class& p, const mpz_class& u) {
    if (p <= 3 || !is_prime(p)) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), p.get_mpz_t());
    return g == 1;
}

}  // namespace

std::optional<CurveOrderParams> search_fixed_D(const Discriminant& disc, const OrderPredicate& pred,
                                               const SearchOptions& opt) {
    mpz_class absD = -disc.D;
    mpz_class bound = mpz_class(4) << opt.p_bits;
    mpz_class umax = sqrt(bound);
    mpz_class vmax = sqrt(mpz_class(bound / absD));
    if (vmax < 1) return std::nullopt;

    // Small boxes are scanned exhaustively in order of increasing p.
    if ((umax + 1) * vmax <= opt.budget) {
        std::vector<Candidate> cands;
        for (mpz_class v = 1; v <= vmax; ++v)
            for (mpz_class u = 0; u <= umax; ++u) {
                mpz_class s = u * u + absD * v * v;
                if (s % 4 != 0) continue;
                mpz_class p = s / 4;
                if (admissible(p, u)) cands.push_back({p, u, v});
            }
        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
            return std::tie(x.p, x.v, x.u) < std::tie(y.p, y.v, y.u);
        });
        CurveOrderParams out;
        for (auto& c : cands)
            if (try_orders(c, pred, out)) return out;
        return std::nullopt;
    }

    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(mpz_class(std::to_string(opt.seed)));
    long D8 = ((disc.D % 8) + 8) % 8;
    bool trick = opt.use_210 && D8 == 5 && umax > 420 && vmax > 420;
    std::uint64_t attempts = 0;

    if (trick) {
        // u = 1 or 107 (mod 210), v = 105 (mod 210): p and the matching
        // order p+1-u (u = 1) or p+1+u (u = 107) avoid 2, 3, 5, 7.
        const int inner = 16;
        while (attempts < opt.budget) {
            mpz_class u = 210 * rng.get_z_range(umax / 210) + 1;
            mpz_class v = 210 * rng.get_z_range(vmax / 210) + 105;
            for (int k = 0; k < inner && attempts < opt.budget; ++k, ++attempts) {
                if (k > 0) u += (k % 2 == 1) ? 106 : 104;
                mpz_class p = (u * u + absD * v * v) / 4;
                if (!admissible(p, u)) continue;
                mpz_class signed_u = (u % 210 == 1) ? mpz_class(u) : mpz_class(-u);
                if (pred(p, p + 1 - signed_u)) return CurveOrderParams{p, signed_u, v};
            }
        }
        return std::nullopt;
    }

    bool even = (disc.D % 2 == 0);
    for (; attempts < opt.budget; ++attempts) {
        mpz_class u = rng.get_z_range(umax + 1);
        mpz_class v = rng.get_z_range(vmax) + 1;
        if (even) {
            if (u % 2 != 0) u -= 1;
        } else if ((u % 2 == 0) != (v % 2 == 0)) {
            u += (u < umax) ? 1 : -1;
        }
        mpz_class s = u * u + absD * v * v;
        if (s % 4 != 0) continue;
        mpz_class p = s / 4;
        if (!admissible(p, u)) continue;
        CurveOrderParams out;
        if (try_orders({p, u, v}, pred, out)) return out;
    }
    return std::nullopt;
}

std::optional<std::pair<Discriminant, CurveOrderParams>> search_fixed_p(const mpz_class& p,
                                                                        const std::vector<long>& discs,
                                                                        const OrderPredicate& pred) {
    if (p <= 3 || !is_prime(p)) throw InvalidParameters("search_fixed_p: p must be a prime > 3");
    for (long D : discs) {
        if (D >= 0 || (mod4(D) != 0 && mod4(D) != 1)) continue;
        if (kronecker(mpz_class(D), p) != 1) continue;
        Discriminant disc = split_discriminant(D);
        if (disc.f % p == 0) continue;
        auto sol = cornacchia(D, 4 * p);
        if (!sol) continue;
        if (!admissible(p, sol->first)) continue;
        CurveOrderParams out;
        if (try_orders({p, sol->first, sol->second}, pred, out)) return std::make_pair(disc, out);
    }
    return std::nullopt;
}

std::vector<long> discriminant_range(long lo, long hi) {
    std::vector<long> out;
    for (long a = std::max(lo, 3L); a <= hi; ++a) {
        long D = -a;
        if (mod4(D) == 0 || mod4(D) == 1) out.push_back(D);
    }
    return out;
}

}  // namespace cmforge
