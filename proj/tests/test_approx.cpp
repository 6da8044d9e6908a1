#include "cmforge/approx.hpp"
#include "cmforge/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace cmforge;

namespace {

struct Setup {
    Discriminant disc;
    GenusBasis basis;
    MPair mp;
    CTensor c;
};

Setup setup(long d) {
    Setup s{split_discriminant(d), {}, {}, {}};
    s.basis = build_basis(s.disc);
    s.mp = build_mpair(s.basis, MPairVariant::REAL_PART);
    s.c = c_tensor(s.disc, s.mp);
    return s;
}

// Classical continued fraction of (P + sqrt N)/Q with Q | N - P^2.
struct ClassicCF {
    mpz_class P, Q, N, s;
    ClassicCF(mpz_class p, mpz_class q, mpz_class n) : P(p), Q(q), N(n) {
        if ((N - P * P) % Q != 0) {
            P *= abs(Q);
            N *= Q * Q;
            Q *= abs(Q);
        }
        mpz_sqrt(s.get_mpz_t(), N.get_mpz_t());
    }
    mpz_class next() {
        mpz_class a;
        if (Q > 0) {
            mpz_class num = P + s;
            mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
        } else {
            mpz_class num = P + s, den = -Q;
            mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
            a = -a - 1;
        }
        P = a * Q - P;
        Q = (N - P * P) / Q;
        return a;
    }
};

Real sqrt_abs(long d, mpfr_prec_t prec) { return sqrt(Real(std::labs(d), prec)); }

// Independent per-iteration checks; the library's own checker is not used here.
struct Checker {
    const Setup& s;
    long d;
    long failures = 0;
    unsigned long calls = 0;

    void operator()(const ApproxRun& run, unsigned, const mpz_class&) {
        ++calls;
        const unsigned m = s.basis.m();
        const mpfr_prec_t prec = 512;
        Real zmax(0L, prec), zmin(0L, prec);
        unsigned long nsum = 0;
        GFElem prod(s.mp.omega_star[0].field(), 1);
        for (const CFRegister& reg : run.registers) {
            Real sd = sqrt(Real(reg.delta, prec));
            Real g = reg.odd ? (Real(1L, prec) + sd) / 2 : sd / 2;
            if (reg.x < 0 || !(Real(reg.x, prec) < sd - g)) ++failures;
            if (reg.y <= 0 || !(Real(reg.y, prec) < sd)) ++failures;
            // z |sigma(z)| = y
            Real z = Real(reg.r, prec) + Real(reg.s, prec) * g;
            Real sz = abs(cf_sigma_z(reg).eval(prec).re);
            if (abs(z * sz - Real(reg.y, prec)) > pow2(-200, prec)) ++failures;
            if (!(z > Real(0L, prec))) ++failures;
            if (zmax.sign() == 0 || z > zmax) zmax = z;
            if (zmin.sign() == 0 || z < zmin) zmin = z;
            nsum += reg.n;
            GFElem sig = cf_sigma_z(reg);
            prod *= reg.n % 2 ? -sig : sig;
        }
        if (zmax > zmin * sqrt_abs(d, prec)) ++failures;

        GFElem Zel(s.mp.omega_star[0].field());
        for (unsigned mu = 0; mu < m; ++mu) Zel += s.mp.omega_star[mu] * mpq_class(run.A[mu]);
        if (Zel != prod) ++failures;

        Real Z = Zel.eval(prec).re;
        if (Z < Real(1L, prec)) ++failures;
        // Z >= 2^((sum n - (m - 1))/2)
        long e2 = static_cast<long>(nsum) - static_cast<long>(m - 1);
        Real lower = exp(log(Real(2L, prec)) * Real(mpq_class(e2, 2), prec));
        if (Z < lower * Real(mpq_class(999999, 1000000), prec)) ++failures;
        // every nontrivial conjugate is at most sqrt|d|^m / Z^(1/(m-1))
        Real bound = exp(log(sqrt_abs(d, prec)) * Real(static_cast<long>(m), prec) -
                         log(Z) / Real(static_cast<long>(m - 1), prec));
        for (unsigned l = 1; l < m; ++l)
            if (abs(Zel.eval(prec, l).re) > bound) ++failures;

        ApproxQuality q = approx_quality(run, s.disc, s.mp);
        if (!q.ok) ++failures;
    }
};

}  // namespace

TEST_CASE("delta_g examples") {
    auto d40 = split_discriminant(-40);
    FieldPtr F40 = make_field(d40.qstars);
    DeltaG a = delta_g(d40, F40, 1);
    CHECK(a.delta == 5);
    CHECK(a.odd);
    CHECK(a.g == GFElem(F40, mpq_class(1, 2)) + GFElem::basis(F40, 1, mpq_class(1, 2)));

    auto d84 = split_discriminant(-84);
    FieldPtr F84 = make_field(d84.qstars);
    DeltaG b = delta_g(d84, F84, 1);
    CHECK(b.delta == 12);
    CHECK_FALSE(b.odd);
    Complex gv = b.g.eval(200);
    CHECK(abs(gv.re - sqrt(Real(3L, 200))) < pow2(-190, 200));
    CHECK(abs(gv.im) < pow2(-190, 200));
    DeltaG c = delta_g(d84, F84, 3);
    CHECK(c.delta == 21);
    CHECK(c.odd);
    Complex cv = c.g.eval(200);
    CHECK(abs(cv.re - (Real(1L, 200) + sqrt(Real(21L, 200))) / 2L) < pow2(-190, 200));

    CHECK_THROWS_AS(delta_g(d84, F84, 0), InvalidParameters);
    CHECK_THROWS_AS(delta_g(d84, F84, 4), InvalidParameters);
}

TEST_CASE("delta_g: positive non-square delta and real g for every lambda") {
    for (long d : testing::fundamental_discs(1500)) {
        auto disc = split_discriminant(d);
        if (disc.t() == 1) continue;
        FieldPtr F = make_field(disc.qstars);
        for (unsigned l = 1; l < (1u << (disc.t() - 1)); ++l) {
            DeltaG dg = delta_g(disc, F, l);
            CHECK(dg.delta > 0);
            CHECK_FALSE(mpz_perfect_square_p(dg.delta.get_mpz_t()));
            CHECK(dg.g.conj() == dg.g);
            CHECK(dg.odd == (dg.delta % 2 != 0));
            // g is an algebraic integer: g^2 - tr g + n = 0 with integer tr, n
            GFElem tr(F, dg.odd ? 1 : 0);
            GFElem n = dg.g * (tr - dg.g);
            CHECK(n.is_rational());
            CHECK(n[0].get_den() == 1);
            mpq_class norm(dg.odd ? mpz_class(1 - dg.delta) : mpz_class(-dg.delta), 4);
            norm.canonicalize();
            CHECK(n[0] == norm);
        }
    }
}

TEST_CASE("cf_step examples") {
    auto d40 = split_discriminant(-40);
    CFRegister r = cf_init(d40, make_field(d40.qstars), 1);
    CHECK(r.x == 0);
    CHECK(r.y == 1);
    CHECK(r.y_prev == 1);
    for (int k = 0; k < 30; ++k) {
        CHECK(cf_step(r) == 1);
        CHECK(r.x == 0);
        CHECK(r.y == 1);
    }

    auto d84 = split_discriminant(-84);
    CFRegister s = cf_init(d84, make_field(d84.qstars), 1);
    CHECK(s.y_prev == 3);
    CHECK(cf_step(s) == 1);
    CHECK(s.x == 1);
    CHECK(s.y == 2);
    std::vector<long> expect{1, 2, 1, 2, 1, 2};
    for (long e : expect) CHECK(cf_step(s) == e);
}

TEST_CASE("partial quotients agree with the classical algorithm") {
    int registers = 0;
    for (long d : testing::fundamental_discs(3000)) {
        auto disc = split_discriminant(d);
        if (disc.t() == 1) continue;
        FieldPtr F = make_field(disc.qstars);
        for (unsigned l = 1; l < (1u << (disc.t() - 1)); ++l) {
            CFRegister reg = cf_init(disc, F, l);
            ClassicCF cf(reg.odd ? 1 : 0, 2, reg.delta);
            Real prev_z = reg.z;
            for (int k = 0; k < 40; ++k) {
                mpz_class a = cf_step(reg);
                REQUIRE_MESSAGE(a == cf.next(), "d=" << d << " lambda=" << l << " step=" << k);
                CHECK(reg.z < prev_z);
                CHECK(reg.z.sign() > 0);
                prev_z = reg.z;
            }
            ++registers;
        }
    }
    CHECK(registers > 1000);
}

TEST_CASE("cf_floor equals a high-precision floor") {
    auto disc = split_discriminant(-420);
    FieldPtr F = make_field(disc.qstars);
    for (unsigned l = 1; l < 8; ++l) {
        CFRegister reg = cf_init(disc, F, l);
        for (int k = 0; k < 60; ++k) {
            Real sd = sqrt(Real(reg.delta, 300));
            Real g = reg.odd ? (Real(1L, 300) + sd) / 2 : sd / 2;
            Real q = (g + Real(reg.x, 300)) / Real(reg.y, 300);
            mpz_class fl = floor_to_mpz(q);
            CHECK(cf_floor(reg) == fl);
            cf_step(reg);
        }
    }
}

TEST_CASE("lambda_lex_less and the first choice") {
    CHECK(lambda_lex_less(2, 1, 3));  // (0,1) < (1,0)
    CHECK_FALSE(lambda_lex_less(1, 2, 3));
    CHECK(lambda_lex_less(2, 3, 3));
    CHECK_FALSE(lambda_lex_less(3, 3, 3));
    for (long d : {-84L, -420L, -1155L, -3315L}) {
        Setup s = setup(d);
        const int t = s.disc.t();
        // lex-smallest nonzero tuple (lambda_1, ..., lambda_{t-1}) is (0, ..., 0, 1)
        std::vector<int> best;
        unsigned best_mask = 0;
        for (unsigned l = 1; l < s.basis.m(); ++l) {
            std::vector<int> tup;
            for (int i = 0; i < t - 1; ++i) tup.push_back((l >> i) & 1);
            if (best.empty() || tup < best) {
                best = tup;
                best_mask = l;
            }
        }
        CHECK(best_mask == 1u << (t - 2));
        unsigned first = 0;
        ApproxOptions opt;
        opt.check_invariants = true;
        run_approx(s.disc, s.mp, s.c, 2, opt, [&](const ApproxRun& run, unsigned l, const mpz_class&) {
            if (run.iterations == 1) first = l;
        });
        CHECK(first == best_mask);
    }
}

TEST_CASE("t = 1 and the initial state") {
    for (long d : {-3L, -4L, -7L, -8L, -23L}) {
        Setup s = setup(d);
        ApproxRun run = run_approx(s.disc, s.mp, s.c, 1000000);
        CHECK(run.A == std::vector<mpz_class>{1});
        CHECK(run.iterations == 0);
        CHECK(run.registers.empty());
    }
    Setup s = setup(-84);
    ApproxRun run = run_approx(s.disc, s.mp, s.c, 1);
    CHECK(run.iterations == 0);
    ApproxQuality q = approx_quality(run, s.disc, s.mp);
    CHECK(q.ok);
    CHECK(abs(q.Z - Real(1L, 64)) < pow2(-50, 64));
}

TEST_CASE("d = -40, N0 = 1000: the ratio approximates omega_1") {
    Setup s = setup(-40);
    ApproxRun run = run_approx(s.disc, s.mp, s.c, 1000);
    CHECK(abs(run.A[0]) >= 1000);
    CHECK(run.A[0] == 1597);
    CHECK(run.A[1] == -610);
    const mpfr_prec_t P = 256;
    Real sqrt5 = sqrt(Real(5L, P));
    Real omega1 = (Real(1L, P) - sqrt5) / (Real(1L, P) + sqrt5);
    Real err = abs(Real(run.A[1], P) / Real(run.A[0], P) - omega1);
    Real A0 = abs(Real(run.A[0], P));
    // m = 2: the conjugate bound gives an O(|d| / A0^2) error
    CHECK(err < Real(40L, P) / (A0 * A0));
    CHECK(err > Real(0L, P));
}

TEST_CASE("invariants hold at every iteration for N0 = 10^6") {
    const mpz_class N0 = 1000000;
    for (long d : {-40L, -84L, -420L}) {
        Setup s = setup(d);
        Checker chk{s, d};
        ApproxRun run = run_approx(s.disc, s.mp, s.c, N0, {}, std::ref(chk));
        CHECK(chk.failures == 0);
        CHECK(chk.calls == run.iterations);
        CHECK(abs(run.A[0]) >= N0);
        const unsigned m = s.basis.m();
        unsigned long cap = 8ul * (m - 1) * static_cast<unsigned long>(std::ceil(std::log2(1e6))) + 64;
        CHECK(run.iterations <= cap);
        CHECK(run.iterations <= approx_iteration_cap(m, N0));
        // the library checker agrees
        ApproxOptions opt;
        opt.check_invariants = true;
        CHECK_NOTHROW(run_approx(s.disc, s.mp, s.c, N0, opt));
    }
}

TEST_CASE("invariants on the imaginary pair and on many discriminants") {
    int runs = 0;
    for (long d : testing::fundamental_discs(700)) {
        auto disc = split_discriminant(d);
        if (disc.t() == 1 || disc.t() > 4) continue;
        for (auto variant : {MPairVariant::REAL_PART, MPairVariant::IMAG_PART}) {
            Setup s{disc, build_basis(disc), {}, {}};
            s.mp = build_mpair(s.basis, variant);
            s.c = c_tensor(disc, s.mp);
            Checker chk{s, d};
            ApproxRun run = run_approx(disc, s.mp, s.c, 5000, {}, std::ref(chk));
            CHECK_MESSAGE(chk.failures == 0, "d=" << d);
            CHECK(abs(run.A[0]) >= 5000);
            ++runs;
        }
    }
    CHECK(runs > 100);
}

TEST_CASE("approx_quality example runs") {
    for (auto [d, iters] : {std::pair{-40L, 20ul}, std::pair{-84L, 50ul}}) {
        Setup s = setup(d);
        ApproxOptions opt;
        opt.max_iterations = iters;
        unsigned long seen = 0;
        bool ok = true;
        try {
            run_approx(s.disc, s.mp, s.c, mpz_class(1) << 4000, opt, [&](const ApproxRun& run, unsigned, const mpz_class&) {
                seen = run.iterations;
                ok = ok && approx_quality(run, s.disc, s.mp).ok;
            });
        } catch (const InternalError&) {
            // the iteration cap stops the run
        }
        CHECK(seen == iters);
        CHECK(ok);
    }
}

TEST_CASE("c tensor reproduces the products") {
    for (long d : {-40L, -84L, -420L, -120L}) {
        Setup s = setup(d);
        const unsigned m = s.basis.m();
        const FieldPtr& F = s.mp.omega_star[0].field();
        for (unsigned eta = 0; eta < m; ++eta) {
            GFElem g = eta == 0 ? GFElem(F, 1) : delta_g(s.disc, F, eta).g;
            for (unsigned xi = 0; xi < m; ++xi) {
                GFElem rhs(F);
                for (unsigned mu = 0; mu < m; ++mu) rhs += s.mp.omega_star[mu] * s.c[mu][xi][eta];
                CHECK(rhs == s.mp.omega_star[xi] * g);
            }
        }
    }
}
