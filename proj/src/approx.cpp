#include "cmforge/approx.hpp"

#include "cmforge/errors.hpp"

#include <algorithm>

namespace cmforge {

namespace {

unsigned long bitlen(const mpz_class& v) { return mpz_sizeinbase(v.get_mpz_t(), 2); }

mpfr_prec_t z_prec(const mpz_class& r, const mpz_class& s) {
    unsigned long b = std::max(bitlen(r), bitlen(s));
    return static_cast<mpfr_prec_t>(2 * b + 128);
}

Real g_numeric(const CFRegister& reg, mpfr_prec_t prec) {
    Real sd = sqrt(Real(reg.delta, prec));
    if (reg.odd) return (Real(1L, prec) + sd) / 2;
    return sd / 2;
}

}  // namespace

DeltaG delta_g(const Discriminant& disc, const FieldPtr& field, unsigned lambda) {
    const int t = disc.t();
    const int u = disc.u();
    if (lambda == 0 || lambda >= (1u << (t - 1))) throw InvalidParameters("delta_g: lambda out of range");
    unsigned S = lambda;
    unsigned parity = 0;
    for (int i = u; i < t - 1; ++i) parity ^= (lambda >> i) & 1u;
    if (parity) S |= 1u << (t - 1);
    DeltaG out;
    out.delta = 1;
    int negs = 0;
    for (int i = 0; i < t; ++i)
        if (S & (1u << i)) {
            out.delta *= disc.qstars[i];
            if (disc.qstars[i] < 0) ++negs;
        }
    check_internal(out.delta > 0 && negs % 2 == 0, "delta_g: negative delta");
    // the principal product of sqrt q_i* picks up i^negs
    mpq_class sign = (negs / 2) % 2 ? -1 : 1;
    out.odd = out.delta % 2 != 0;
    out.g = GFElem::basis(field, S, sign / 2);
    if (out.odd) out.g[0] = mpq_class(1, 2);
    return out;
}

CFRegister cf_init(const Discriminant& disc, const FieldPtr& field, unsigned lambda) {
    DeltaG dg = delta_g(disc, field, lambda);
    CFRegister reg;
    reg.lambda = lambda;
    reg.delta = dg.delta;
    reg.odd = dg.odd;
    reg.g = dg.g;
    reg.x = 0;
    reg.y = 1;
    reg.y_prev = dg.delta / 4;
    reg.r = 1;
    reg.s = 0;
    reg.r_prev = 0;
    reg.s_prev = 1;
    reg.z = Real(1L, 128);
    return reg;
}

mpz_class cf_floor(const CFRegister& reg) {
    mpz_class sq;
    mpz_sqrt(sq.get_mpz_t(), reg.delta.get_mpz_t());
    mpz_class num = 2 * reg.x + (reg.odd ? 1 : 0) + sq;
    mpz_class den = 2 * reg.y;
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
}

mpz_class cf_step(CFRegister& reg) {
    mpz_class a = cf_floor(reg);
    mpz_class nr = reg.r_prev - a * reg.r, ns = reg.s_prev - a * reg.s;
    reg.r_prev = reg.r;
    reg.s_prev = reg.s;
    reg.r = nr;
    reg.s = ns;
    mpz_class x_old = reg.x;
    reg.x = a * reg.y - reg.x - (reg.odd ? 1 : 0);
    mpz_class ny = reg.y_prev - a * (reg.x - x_old);
    reg.y_prev = reg.y;
    reg.y = ny;
    ++reg.n;
    reg.z = cf_value(reg, reg.r, reg.s);
    return a;
}

Real cf_value(const CFRegister& reg, const mpz_class& r, const mpz_class& s) {
    mpfr_prec_t prec = z_prec(r, s);
    return Real(r, prec) + Real(s, prec) * g_numeric(reg, prec);
}

GFElem cf_sigma_z(const CFRegister& reg) {
    GFElem tr(reg.g.field(), reg.odd ? 1 : 0);
    GFElem sg = tr - reg.g;
    return GFElem(reg.g.field(), mpq_class(reg.r)) + sg * mpq_class(reg.s);
}

CTensor c_tensor(const Discriminant& disc, const MPair& mp) {
    const unsigned m = static_cast<unsigned>(mp.omega_star.size());
    const FieldPtr& F = mp.omega_star[0].field();
    CTensor c(m, std::vector<std::vector<mpq_class>>(m, std::vector<mpq_class>(m)));
    for (unsigned eta = 0; eta < m; ++eta) {
        GFElem g = eta == 0 ? GFElem(F, 1) : delta_g(disc, F, eta).g;
        for (unsigned xi = 0; xi < m; ++xi) {
            auto co = coordinates(mp.omega_star[xi] * g, mp.omega_star);
            for (unsigned mu = 0; mu < m; ++mu) c[mu][xi][eta] = co[mu];
        }
    }
    return c;
}

unsigned long approx_iteration_cap(unsigned m, const mpz_class& N0) {
    unsigned long lg = N0 > 1 ? mpz_sizeinbase(mpz_class(N0 - 1).get_mpz_t(), 2) : 0;
    return 8ul * (m - 1) * lg + 64;
}

bool lambda_lex_less(unsigned a, unsigned b, int t) {
    for (int i = 0; i < t - 1; ++i) {
        unsigned ba = (a >> i) & 1u, bb = (b >> i) & 1u;
        if (ba != bb) return ba < bb;
    }
    return false;
}

namespace {

GFElem sum_A_omega_star(const std::vector<mpz_class>& A, const MPair& mp) {
    GFElem Z(mp.omega_star[0].field());
    for (unsigned mu = 0; mu < A.size(); ++mu)
        if (A[mu] != 0) Z += mp.omega_star[mu] * mpq_class(A[mu]);
    return Z;
}

}  // namespace

ApproxRun run_approx(const Discriminant& disc, const MPair& mp, const CTensor& c, const mpz_class& N0,
                     const ApproxOptions& opt, const ApproxObserver& observer) {
    const int t = disc.t();
    const unsigned m = 1u << (t - 1);
    const FieldPtr& F = mp.omega_star[0].field();
    ApproxRun run;
    run.N0 = N0;
    run.A.assign(m, 0);
    run.A[0] = 1;
    for (unsigned l = 1; l < m; ++l) run.registers.push_back(cf_init(disc, F, l));
    run.Z = GFElem(F, 1);
    if (m == 1) return run;

    unsigned long cap = opt.max_iterations ? opt.max_iterations : approx_iteration_cap(m, N0);
    if (opt.check_invariants) check_run_invariants(run, disc, mp);
    while (abs(run.A[0]) < N0) {
        if (run.iterations >= cap) throw InternalError("run_approx: iteration cap exceeded");
        // largest z; ties to the lexicographically smallest lambda
        unsigned best = 1;
        for (unsigned l = 2; l < m; ++l) {
            const CFRegister& a = run.registers[l - 1];
            const CFRegister& b = run.registers[best - 1];
            bool eq = a.z_is_rational() && b.z_is_rational() && a.r == b.r;
            if (eq) {
                if (lambda_lex_less(l, best, t)) best = l;
            } else if (a.z > b.z) {
                best = l;
            }
        }
        CFRegister& reg = run.registers[best - 1];
        mpz_class a = cf_step(reg);
        std::vector<mpz_class> next(m);
        for (unsigned mu = 0; mu < m; ++mu) {
            mpq_class acc = mpq_class(run.A[mu] * reg.x);
            for (unsigned xi = 0; xi < m; ++xi)
                if (run.A[xi] != 0 && c[mu][xi][best] != 0) acc += run.A[xi] * c[mu][xi][best];
            acc /= mpq_class(reg.y_prev);
            acc.canonicalize();
            check_internal(acc.get_den() == 1, "run_approx: non-integer A'");
            next[mu] = acc.get_num();
        }
        run.A = std::move(next);
        ++run.iterations;
        if (opt.check_invariants) check_run_invariants(run, disc, mp);
        if (observer) observer(run, best, a);
    }
    run.Z = sum_A_omega_star(run.A, mp);
    return run;
}

void check_run_invariants(const ApproxRun& run, const Discriminant& disc, const MPair& mp) {
    const FieldPtr& F = mp.omega_star[0].field();
    GFElem prod(F, 1);
    for (const CFRegister& reg : run.registers) {
        // 0 <= x < sqrt(delta) - g and 0 < y < sqrt(delta)
        mpz_class xb = reg.odd ? mpz_class(2 * reg.x + 1) : mpz_class(2 * reg.x);
        check_internal(reg.x >= 0 && xb * xb < reg.delta, "approx: x out of range");
        check_internal(reg.y > 0 && reg.y * reg.y < reg.delta, "approx: y out of range");
        GFElem sz = cf_sigma_z(reg);
        prod *= reg.n % 2 ? -sz : sz;
    }
    GFElem Z = sum_A_omega_star(run.A, mp);
    check_internal(Z == prod, "approx: A does not match the product of conjugated z");
    auto q = approx_quality(run, disc, mp);
    check_internal(q.Z >= Real(1L, 64), "approx: Z < 1");
    check_internal(q.ok, "approx: conjugate bound violated");
}

ApproxQuality approx_quality(const ApproxRun& run, const Discriminant& disc, const MPair& mp) {
    const unsigned m = static_cast<unsigned>(run.A.size());
    unsigned long b = 0;
    for (const auto& a : run.A) b = std::max(b, bitlen(a));
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(2 * b + 128);
    GFElem Z = sum_A_omega_star(run.A, mp);
    ApproxQuality q{Real(prec), Real(prec), Real(prec), false};
    q.Z = Z.eval(prec).re;
    Real maxc(0L, prec);
    for (unsigned l = 1; l < m; ++l) {
        Real v = abs(Z.eval(prec, l).re);
        if (v > maxc) maxc = v;
    }
    q.bound = Real(1L, prec);
    Real sd = sqrt(Real(std::labs(disc.d), prec));
    for (unsigned i = 0; i < m; ++i) q.bound *= sd;
    if (m > 1) {
        Real root = exp(log(q.Z) / static_cast<long>(m - 1));
        q.scaled_conj = maxc * root;
    }
    q.ok = q.Z >= Real(1L, prec) && q.scaled_conj <= q.bound;
    return q;
}

}  // namespace cmforge
