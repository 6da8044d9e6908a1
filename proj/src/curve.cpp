#include "cmforge/curve.hpp"

#include "cmforge/errors.hpp"

#include <algorithm>

namespace cmforge {

mpz_class mod_p(const mpz_class& a, const mpz_class& p) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    return r;
}

mpz_class inv_mod_p(const mpz_class& a, const mpz_class& p) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), mod_p(a, p).get_mpz_t(), p.get_mpz_t()))
        throw InvalidParameters("inverse of zero mod p");
    return r;
}

namespace fppoly {

void trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

FpPoly mul(const FpPoly& a, const FpPoly& b, const mpz_class& p) {
    if (a.empty() || b.empty()) return {};
    FpPoly out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    for (auto& c : out) c = mod_p(c, p);
    trim(out);
    return out;
}

FpPoly divmod(const FpPoly& a, const FpPoly& b, const mpz_class& p, FpPoly* quotient) {
    if (b.empty()) throw InvalidParameters("polynomial division by zero");
    FpPoly r = a;
    trim(r);
    FpPoly q;
    if (r.size() >= b.size()) q.assign(r.size() - b.size() + 1, 0);
    mpz_class lead_inv = inv_mod_p(b.back(), p);
    while (r.size() >= b.size()) {
        size_t shift = r.size() - b.size();
        mpz_class c = mod_p(r.back() * lead_inv, p);
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) r[shift + i] = mod_p(r[shift + i] - c * b[i], p);
        trim(r);
    }
    if (quotient) {
        trim(q);
        *quotient = q;
    }
    return r;
}

FpPoly monic(const FpPoly& f, const mpz_class& p) {
    if (f.empty()) return f;
    mpz_class inv = inv_mod_p(f.back(), p);
    FpPoly out(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = mod_p(f[i] * inv, p);
    return out;
}

FpPoly gcd(FpPoly a, FpPoly b, const mpz_class& p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        FpPoly r = divmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a, p);
}

FpPoly powmod(const FpPoly& base, const mpz_class& e, const FpPoly& mod, const mpz_class& p) {
    FpPoly result{1};
    result = divmod(result, mod, p);
    FpPoly b = divmod(base, mod, p);
    const size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = nbits; i-- > 0;) {
        result = divmod(mul(result, result, p), mod, p);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = divmod(mul(result, b, p), mod, p);
    }
    return result;
}

mpz_class eval(const FpPoly& f, const mpz_class& x, const mpz_class& p) {
    mpz_class acc = 0;
    for (size_t i = f.size(); i-- > 0;) acc = mod_p(acc * x + f[i], p);
    return acc;
}

}  // namespace fppoly

std::optional<mpz_class> sqrt_mod_p(const mpz_class& a, const mpz_class& p) { return sqrt_mod_prime(mod_p(a, p), p); }

FpPoly reduce_divisor_mod_p(const ClassPolynomial& poly, const mpz_class& p) {
    FpPoly out;
    if (!poly.is_divisor()) {
        for (const auto& c : poly.int_coeffs) out.push_back(mod_p(c, p));
        fppoly::trim(out);
        return out;
    }
    const auto& qs = poly.disc.qstars;
    std::vector<mpz_class> s;
    for (long q : qs) {
        auto r = sqrt_mod_p(mpz_class(q), p);
        if (!r) throw InvalidParameters("reduce_divisor_mod_p: q* = " + std::to_string(q) + " is not a square mod p");
        s.push_back(*r);
    }
    for (const GFElem& c : poly.gf_coeffs) {
        mpz_class acc = 0;
        for (unsigned S = 0; S < c.dim(); ++S) {
            if (c[S] == 0) continue;
            mpz_class term = mod_p(c[S].get_num() * inv_mod_p(c[S].get_den(), p), p);
            for (size_t i = 0; i < s.size(); ++i)
                if (S & (1u << i)) term = mod_p(term * s[i], p);
            acc += term;
        }
        out.push_back(mod_p(acc, p));
    }
    fppoly::trim(out);
    return out;
}

namespace {

void split_roots(const FpPoly& f, const mpz_class& p, Rng& rng, std::vector<mpz_class>& out) {
    if (f.size() <= 1) return;
    if (f.size() == 2) {
        out.push_back(mod_p(-f[0] * inv_mod_p(f[1], p), p));
        return;
    }
    const mpz_class e = (p - 1) / 2;
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(mpz_class(std::to_string(rng())));
    for (;;) {
        mpz_class a = gr.get_z_range(p);
        FpPoly h = fppoly::powmod(FpPoly{a, 1}, e, f, p);
        if (h.empty()) h = {p - 1};
        else h[0] = mod_p(h[0] - 1, p);
        fppoly::trim(h);
        FpPoly g = fppoly::gcd(f, h, p);
        if (g.size() > 1 && g.size() < f.size()) {
            FpPoly q;
            fppoly::divmod(f, g, p, &q);
            split_roots(g, p, rng, out);
            split_roots(fppoly::monic(q, p), p, rng, out);
            return;
        }
    }
}

}  // namespace

std::vector<mpz_class> roots_in_fp(const FpPoly& f_in, const mpz_class& p, std::uint64_t seed) {
    FpPoly f = f_in;
    fppoly::trim(f);
    if (f.empty()) throw InvalidParameters("roots_in_fp: zero polynomial");
    f = fppoly::monic(f, p);
    std::vector<mpz_class> distinct;
    if (f.size() > 1) {
        FpPoly xp = fppoly::powmod(FpPoly{0, 1}, p, f, p);
        xp.resize(std::max<size_t>(xp.size(), 2), 0);
        xp[1] = mod_p(xp[1] - 1, p);
        fppoly::trim(xp);
        FpPoly g = xp.empty() ? f : fppoly::gcd(f, xp, p);
        Rng rng(seed);
        split_roots(g, p, rng, distinct);
    }
    std::vector<mpz_class> out;
    for (const auto& r : distinct) {
        FpPoly cur = f;
        for (;;) {
            FpPoly q;
            FpPoly rem = fppoly::divmod(cur, FpPoly{mod_p(-r, p), 1}, p, &q);
            if (!rem.empty()) break;
            out.push_back(r);
            cur = q;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

mpz_class WeierstrassCurve::j_invariant() const {
    mpz_class a3 = mod_p(4 * a * a * a, p);
    mpz_class den = mod_p(a3 + 27 * b * b, p);
    if (den == 0) throw InvalidParameters("singular curve");
    return mod_p(1728 * a3 * inv_mod_p(den, p), p);
}

WeierstrassCurve curve_from_j(const mpz_class& j_in, const mpz_class& p) {
    if (p <= 3) throw InvalidParameters("curve_from_j: p must exceed 3");
    mpz_class j = mod_p(j_in, p);
    if (j == 0) return {p, 0, 1};
    if (j == mod_p(1728, p)) return {p, 1, 0};
    mpz_class c = mod_p(j * inv_mod_p(1728 - j, p), p);
    return {p, mod_p(3 * c, p), mod_p(2 * c, p)};
}

std::vector<mpz_class> j_from_theta(const mpz_class& r_in, const InvariantKind& kind, long D, const mpz_class& p) {
    mpz_class r = mod_p(r_in, p);
    auto pw = [&](const mpz_class& x, unsigned long e) {
        mpz_class out;
        mpz_powm_ui(out.get_mpz_t(), x.get_mpz_t(), e, p.get_mpz_t());
        return out;
    };
    switch (kind.tag) {
        case InvariantTag::J: return {r};
        case InvariantTag::GAMMA2: return {pw(r, 3)};
        case InvariantTag::WEBER_G: {
            if (r == 0) throw InvalidParameters("j_from_theta: zero Weber value");
            if (!kind.cubed) r = pw(r, 3);
            mpz_class x;
            bool f1 = false;
            switch (weber_case_for(D)) {
                case WeberCase::M1_MOD8: x = 64 * pw(r, 4); break;
                case WeberCase::M3_MOD8: x = pw(r, 8); break;
                case WeberCase::M5_MOD8: x = 64 * pw(r, 2); break;
                case WeberCase::M7_MOD8: x = 4096 * pw(r, 8); break;
                case WeberCase::M2_MOD4: x = 64 * pw(r, 4); f1 = true; break;
                case WeberCase::M4_MOD8: x = 512 * pw(r, 2); f1 = true; break;
            }
            x = mod_p(x, p);
            if (x == 0) throw InvalidParameters("j_from_theta: degenerate Weber value");
            mpz_class s = mod_p(f1 ? mpz_class(x + 16) : mpz_class(x - 16), p);
            return {mod_p(s * s * s * inv_mod_p(x, p), p)};
        }
        case InvariantTag::DOUBLE_ETA: break;
    }
    throw UnsupportedInvariant("j_from_theta: double-eta values are not supported by the curve pipeline");
}

bool on_curve(const WeierstrassCurve& E, const CurvePoint& P) {
    if (P.inf) return true;
    return mod_p(P.y * P.y - P.x * P.x * P.x - E.a * P.x - E.b, E.p) == 0;
}

CurvePoint point_neg(const WeierstrassCurve& E, const CurvePoint& P) {
    if (P.inf) return P;
    return CurvePoint::affine(P.x, mod_p(-P.y, E.p));
}

CurvePoint point_add(const WeierstrassCurve& E, const CurvePoint& P, const CurvePoint& Q) {
    if (P.inf) return Q;
    if (Q.inf) return P;
    const mpz_class& p = E.p;
    mpz_class lam;
    if (P.x == Q.x) {
        if (mod_p(P.y + Q.y, p) == 0) return CurvePoint::infinity();
        lam = mod_p((3 * P.x * P.x + E.a) * inv_mod_p(2 * P.y, p), p);
    } else {
        lam = mod_p((Q.y - P.y) * inv_mod_p(Q.x - P.x, p), p);
    }
    mpz_class x3 = mod_p(lam * lam - P.x - Q.x, p);
    mpz_class y3 = mod_p(lam * (P.x - x3) - P.y, p);
    return CurvePoint::affine(x3, y3);
}

CurvePoint scalar_mul(const WeierstrassCurve& E, const mpz_class& k, const CurvePoint& P) {
    if (k < 0) return scalar_mul(E, -k, point_neg(E, P));
    CurvePoint R = CurvePoint::infinity();
    const size_t nbits = k == 0 ? 0 : mpz_sizeinbase(k.get_mpz_t(), 2);
    for (size_t i = nbits; i-- > 0;) {
        R = point_add(E, R, R);
        if (mpz_tstbit(k.get_mpz_t(), i)) R = point_add(E, R, P);
    }
    return R;
}

CurvePoint random_point(const WeierstrassCurve& E, Rng& rng) {
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(mpz_class(std::to_string(rng())));
    for (;;) {
        mpz_class x = gr.get_z_range(E.p);
        mpz_class rhs = mod_p(x * x * x + E.a * x + E.b, E.p);
        auto y = sqrt_mod_p(rhs, E.p);
        if (!y) continue;
        mpz_class yy = (rng() & 1) ? mod_p(-*y, E.p) : *y;
        return CurvePoint::affine(x, yy);
    }
}

namespace {

std::vector<signed char> chi_table(long p) {
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (long y = 1; y < p; ++y) chi[(y * y) % p] = 1;
    return chi;
}

void check_small(const WeierstrassCurve& E) {
    if (E.p > kNaiveCountLimit * 1000) throw InvalidParameters("naive_count: p too large");
}

}  // namespace

long naive_count(const WeierstrassCurve& E) {
    check_small(E);
    const long p = E.p.get_si(), a = E.a.get_si(), b = E.b.get_si();
    const auto chi = chi_table(p);
    long total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
    for (long x = 0; x < p; ++x) {
        long v = ((x * x % p) * x % p + a * x % p + b) % p;
        total += 1 + chi[v];
    }
    return total + 1;
}

long naive_count_serial(const WeierstrassCurve& E) {
    check_small(E);
    const long p = E.p.get_si(), a = E.a.get_si(), b = E.b.get_si();
    const auto chi = chi_table(p);
    long total = 0;
    for (long x = 0; x < p; ++x) {
        long v = ((x * x % p) * x % p + a * x % p + b) % p;
        total += 1 + chi[v];
    }
    return total + 1;
}

std::vector<mpz_class> candidate_orders(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v) {
    std::vector<mpz_class> traces{u, -u};
    if (D == -3) {
        for (int s1 : {1, -1})
            for (int s2 : {1, -1}) traces.push_back(s1 * (u + s2 * 3 * v) / 2);
    } else if (D == -4) {
        traces.push_back(2 * v);
        traces.push_back(-2 * v);
    }
    std::vector<mpz_class> out;
    for (const auto& t : traces) {
        mpz_class o = p + 1 - t;
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
    }
    return out;
}

bool has_order(const WeierstrassCurve& E, const mpz_class& order, const std::vector<mpz_class>& others, Rng& rng) {
    if (E.p <= kNaiveCountLimit) return naive_count(E) == order;
    std::vector<mpz_class> alive;
    for (const auto& o : others)
        if (o != order) alive.push_back(o);
    for (int i = 0; i < 10; ++i) {
        CurvePoint P = random_point(E, rng);
        if (!scalar_mul(E, order, P).inf) return false;
        alive.erase(std::remove_if(alive.begin(), alive.end(),
                                   [&](const mpz_class& o) { return !scalar_mul(E, o, P).inf; }),
                    alive.end());
    }
    return alive.empty();
}

namespace {

mpz_class find_nonresidue(const mpz_class& p, bool cubic_too) {
    for (mpz_class g = 2;; ++g) {
        if (kronecker(g, p) != -1) continue;
        if (cubic_too) {
            mpz_class e;
            mpz_powm(e.get_mpz_t(), g.get_mpz_t(), mpz_class((p - 1) / 3).get_mpz_t(), p.get_mpz_t());
            if (e == 1) continue;
        }
        return g;
    }
}

}  // namespace

std::optional<TwistChoice> select_twist(const WeierstrassCurve& E, long D, const mpz_class& u, const mpz_class& v,
                                        Rng& rng) {
    const mpz_class& p = E.p;
    const mpz_class target = p + 1 - u;
    auto orders = candidate_orders(D, p, u, v);
    std::vector<WeierstrassCurve> family;
    if (D == -3) {
        if (E.a != 0) throw InvalidParameters("select_twist: D = -3 needs j = 0");
        mpz_class g = find_nonresidue(p, (p - 1) % 3 == 0);
        mpz_class c = E.b;
        for (int i = 0; i < 6; ++i, c = mod_p(c * g, p)) family.push_back({p, 0, c});
    } else if (D == -4) {
        if (E.b != 0) throw InvalidParameters("select_twist: D = -4 needs j = 1728");
        mpz_class g = find_nonresidue(p, false);
        mpz_class c = E.a;
        for (int i = 0; i < 4; ++i, c = mod_p(c * g, p)) family.push_back({p, c, 0});
    } else {
        mpz_class c = find_nonresidue(p, false);
        family.push_back(E);
        family.push_back({p, mod_p(E.a * c * c, p), mod_p(E.b * c * c * c, p)});
    }
    for (size_t i = 0; i < family.size(); ++i)
        if (has_order(family[i], target, orders, rng)) return TwistChoice{family[i], static_cast<int>(i)};
    return std::nullopt;
}

void check_cm_parameters(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v) {
    Discriminant disc = split_discriminant(D);
    if (p <= 3 || !is_prime(p)) throw InvalidParameters("p must be a prime greater than 3");
    if (kronecker(mpz_class(D), p) != 1) throw InvalidParameters("kronecker(D, p) must be 1");
    if (disc.f % p == 0) throw InvalidParameters("p must not divide the conductor");
    if (u * u + mpz_class(-D) * v * v != 4 * p) throw InvalidParameters("4p must equal u^2 + |D| v^2");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), p.get_mpz_t());
    if (g != 1) throw InvalidParameters("gcd(u, p) must be 1");
}

GenCurveResult gen_curve(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v,
                         const InvariantKind& kind, const GenCurveOptions& opt) {
    check_cm_parameters(D, p, u, v);
    if (kind.tag == InvariantTag::DOUBLE_ETA)
        throw UnsupportedInvariant("gen_curve: double-eta invariants are not supported");
    Discriminant disc = split_discriminant(D);
    Rng rng(opt.seed);
    GenCurveResult res;

    auto attempt = [&](const ClassPolynomial& cp) -> bool {
        FpPoly f = reduce_divisor_mod_p(cp, p);
        for (const mpz_class& r : roots_in_fp(f, p, opt.seed)) {
            for (const mpz_class& j : j_from_theta(r, kind, D, p)) {
                auto choice = select_twist(curve_from_j(j, p), D, u, v, rng);
                if (!choice) continue;
                res.curve = choice->curve;
                res.twist_index = choice->index;
                res.root = r;
                res.j = j;
                res.order = p + 1 - u;
                return true;
            }
        }
        return false;
    };

    if (!opt.force_full) {
        try {
            ClassPolynomial div = class_poly_divisor(disc, kind, std::nullopt, &res.transcript);
            res.path = "divisor";
            if (attempt(div)) return res;
        } catch (const PrecisionExhausted&) {
        } catch (const PrecisionEscalation&) {
        }
    }
    ClassPolynomial full = class_poly_full(disc, kind, &res.full_bits);
    res.path = "full";
    if (attempt(full)) return res;
    throw InvalidParameters("gen_curve: no twist has the requested order");
}

}  // namespace cmforge
