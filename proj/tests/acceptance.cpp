// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "cmforge/classpoly.hpp"
#include "cmforge/curve.hpp"
#include "cmforge/errors.hpp"
#include "cmforge/recover.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>

using namespace cmforge;

namespace {

// time limits in seconds
constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 1.0;    // each polynomial
constexpr double kLimit3 = 1.0;
constexpr double kLimit4 = 30.0;   // each discriminant
constexpr double kLimit5 = 60.0;
constexpr double kLimit6 = 60.0;
constexpr double kLimit7 = 120.0;
constexpr double kLimit8 = 5.0;    // each run
constexpr double kLimit9 = 600.0;

constexpr int kRoundTrips = 200;
constexpr int kScalePoints = 10;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool ok = true;
    std::string note;
    void fail(const std::string& why) {
        if (ok) note = why;
        ok = false;
    }
};

// runs f, failing the outcome if it exceeds the limit or throws
void timed(Outcome& o, double limit, const std::string& what, const std::function<bool()>& f) {
    auto t0 = Clock::now();
    bool good = false;
    try {
        good = f();
    } catch (const std::exception& e) {
        o.fail(what + ": " + e.what());
        return;
    }
    double s = since(t0);
    if (!good) o.fail(what + ": wrong result");
    else if (s > limit) o.fail(what + ": " + std::to_string(s) + " s over " + std::to_string(limit) + " s");
}

std::vector<mpz_class> full(long D, const InvariantKind& kind) {
    return class_poly_full(split_discriminant(D), kind).int_coeffs;
}

std::vector<mpz_class> zs(std::initializer_list<const char*> xs) {
    std::vector<mpz_class> out;
    for (const char* x : xs) out.emplace_back(x);
    return out;
}

InvariantKind kind_of(long D, InvariantTag tag, long p1 = 0, long p2 = 0) {
    return make_invariant(tag, split_discriminant(D), p1, p2);
}

Outcome c1() {
    Outcome o;
    timed(o, kLimit1, "H_-40[j]", [] {
        return full(-40, kind_of(-40, InvariantTag::J)) == zs({"9103145472000", "-425692800", "1"});
    });
    return o;
}

Outcome c2() {
    Outcome o;
    timed(o, kLimit2, "gamma2", [] { return full(-40, kind_of(-40, InvariantTag::GAMMA2)) == zs({"20880", "-780", "1"}); });
    timed(o, kLimit2, "weber", [] { return full(-40, kind_of(-40, InvariantTag::WEBER_G)) == zs({"-1", "-1", "1"}); });
    timed(o, kLimit2, "m5,7", [] {
        return full(-40, kind_of(-40, InvariantTag::DOUBLE_ETA, 5, 7)) == zs({"-1", "-1", "1"});
    });
    timed(o, kLimit2, "m11,13", [] {
        auto c = full(-40, kind_of(-40, InvariantTag::DOUBLE_ETA, 11, 13));
        return c == zs({"1", "2", "1"}) || c == zs({"1", "-2", "1"});
    });
    return o;
}

Outcome c3() {
    Outcome o;
    timed(o, kLimit3, "H_-3", [] { return full(-3, kind_of(-3, InvariantTag::J)) == zs({"0", "1"}); });
    timed(o, kLimit3, "H_-4", [] { return full(-4, kind_of(-4, InvariantTag::J)) == zs({"-1728", "1"}); });
    return o;
}

Outcome c4() {
    Outcome o;
    for (long D : {-40L, -84L, -120L, -420L})
        timed(o, kLimit4, "D=" + std::to_string(D),
              [D] { return coset_product_check(split_discriminant(D), kind_of(D, InvariantTag::J)); });
    return o;
}

Outcome c5() {
    Outcome o;
    timed(o, kLimit5, "duality", [] {
        for (long d = -3; d >= -500; --d) {
            if (!is_fundamental(d)) continue;
            GenusBasis B = build_basis(split_discriminant(d));
            const GFElem zero(B.field), one(B.field, 1);
            for (unsigned e = 0; e < B.m(); ++e)
                for (unsigned n = 0; n < B.m(); ++n)
                    if (duality_sum(B, e, n) != (e == n ? B.sqrt_d() : zero)) return false;
            for (auto variant : {MPairVariant::REAL_PART, MPairVariant::IMAG_PART}) {
                MPair mp = build_mpair(B, variant);
                for (unsigned l = 0; l < B.m(); ++l)
                    for (unsigned lp = 0; lp < B.m(); ++lp)
                        if (mpair_duality(mp, l, lp) != (l == lp ? one : zero)) return false;
            }
        }
        return true;
    });
    return o;
}

// the four bounds, evaluated independently of the library's checker
bool approx_bounds(const ApproxRun& run, const MPair& mp, long d) {
    const unsigned m = static_cast<unsigned>(run.A.size());
    const mpfr_prec_t P = 512;
    for (const CFRegister& reg : run.registers) {
        Real sd = sqrt(Real(reg.delta, P));
        Real g = reg.odd ? (Real(1L, P) + sd) / 2 : sd / 2;
        if (reg.x < 0 || !(Real(reg.x, P) < sd - g)) return false;
        if (reg.y <= 0 || !(Real(reg.y, P) < sd)) return false;
    }
    GFElem Zel(mp.omega_star[0].field());
    for (unsigned mu = 0; mu < m; ++mu) Zel += mp.omega_star[mu] * mpq_class(run.A[mu]);
    Real Z = Zel.eval(P).re;
    if (Z < Real(1L, P)) return false;
    Real bound = exp(log(sqrt(Real(std::labs(d), P))) * Real(static_cast<long>(m), P) -
                     log(Z) / Real(static_cast<long>(m - 1), P));
    for (unsigned l = 1; l < m; ++l)
        if (abs(Zel.eval(P, l).re) > bound) return false;
    return true;
}

Outcome c6() {
    Outcome o;
    for (long d : {-40L, -84L, -420L})
        timed(o, kLimit6, "d=" + std::to_string(d), [d] {
            Discriminant disc = split_discriminant(d);
            GenusBasis B = build_basis(disc);
            MPair mp = build_mpair(B, MPairVariant::REAL_PART);
            CTensor c = c_tensor(disc, mp);
            const mpz_class N0 = 1000000;
            bool good = true;
            ApproxRun run = run_approx(disc, mp, c, N0, {}, [&](const ApproxRun& r, unsigned, const mpz_class&) {
                good = good && approx_bounds(r, mp, d);
            });
            const unsigned long cap = 8ul * (B.m() - 1) * 20 + 64;  // ceil(log2 10^6) = 20
            return good && run.iterations <= cap && abs(run.A[0]) >= N0;
        });
    return o;
}

Outcome c7() {
    Outcome o;
    for (long d : {-40L, -84L})
        timed(o, kLimit7, "d=" + std::to_string(d), [d] {
            Discriminant disc = split_discriminant(d);
            RecoveryPlan plan = make_plan(disc, make_invariant(InvariantTag::J, disc));
            std::mt19937_64 rng(static_cast<std::uint64_t>(-d));
            std::uniform_int_distribution<long> coeff(-1000000, 1000000), frac(-999, 999);
            const mpfr_prec_t prec = plan.float_bits + 64;
            for (Side side : {Side::REAL, Side::IMAG}) {
                const auto& vec = side == Side::REAL ? plan.basis.beta : plan.basis.beta_star;
                int done = 0;
                while (done < kRoundTrips) {
                    std::vector<mpz_class> b(plan.basis.m());
                    GFElem v(plan.basis.field);
                    for (unsigned i = 0; i < b.size(); ++i) {
                        b[i] = coeff(rng);
                        v += vec[i] * mpq_class(b[i]);
                    }
                    bool inside = true;
                    for (unsigned l = 0; l < plan.basis.m(); ++l) inside = inside && abs(v.eval(256, l)) <= plan.T0;
                    if (!inside) continue;
                    Complex gamma = v.eval(prec);
                    Real e = plan.epsilon * Real(mpq_class(frac(rng), 1000), 64);
                    if (side == Side::REAL) gamma.re += e;
                    else gamma.im += e;
                    if (recover_coords(gamma, plan, side) != b) return false;
                    ++done;
                }
            }
            return true;
        });
    return o;
}

Outcome c8() {
    Outcome o;
    struct Run {
        long D, p, u, v, order;
    };
    for (const Run& r : {Run{-40, 41, 2, 2, 40}, Run{-40, 41, -2, 2, 44}, Run{-3, 13, 7, 1, 7}, Run{-4, 13, 6, 2, 8}})
        timed(o, kLimit8, "D=" + std::to_string(r.D) + " order " + std::to_string(r.order), [r] {
            InvariantKind J = kind_of(r.D, InvariantTag::J);
            GenCurveOptions full_opt;
            full_opt.force_full = true;
            GenCurveResult a = gen_curve(r.D, r.p, r.u, r.v, J);
            GenCurveResult b = gen_curve(r.D, r.p, r.u, r.v, J, full_opt);
            return a.order == r.order && naive_count(a.curve) == r.order && b.order == a.order &&
                   naive_count(b.curve) == r.order;
        });
    return o;
}

Outcome c9() {
    Outcome o;
    timed(o, kLimit9, "D=-420 64-bit", [] {
        Discriminant disc = split_discriminant(-420);
        SearchOptions so;
        so.p_bits = 64;
        auto hit = search_fixed_D(disc, [](const mpz_class&, const mpz_class&) { return true; }, so);
        if (!hit) return false;
        GenCurveResult r = gen_curve(-420, hit->p, hit->u, hit->v, make_invariant(InvariantTag::J, disc));
        if (r.path != "divisor" || r.order != hit->p + 1 - hit->u) return false;
        Rng rng(2024);
        for (int i = 0; i < kScalePoints; ++i)
            if (!scalar_mul(r.curve, r.order, random_point(r.curve, rng)).inf) return false;
        return true;
    });
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion all[] = {
        {"1 full class polynomial of -40 for j", c1},
        {"2 -40 for gamma2, Weber and double-eta", c2},
        {"3 class polynomials of -3 and -4", c3},
        {"4 genus divisor products equal the full polynomial", c4},
        {"5 exact duality identities for |d| <= 500", c5},
        {"6 approximation invariants at N0 = 10^6", c6},
        {"7 recovery round trips", c7},
        {"8 end-to-end small curves", c8},
        {"9 64-bit prime at D = -420 via the divisor", c9},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = Clock::now();
        Outcome o = c.run();
        std::printf("%s  %s  (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", c.name, since(t0), o.ok ? "" : "  ",
                    o.note.c_str());
        std::fflush(stdout);
        if (!o.ok) ++failed;
    }
    return failed ? 1 : 0;
}
