#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/classpoly.hpp"
#include "cmforge/modfns.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cmforge {

using Rng = std::mt19937_64;

// Polynomials over F_p, lowest degree first, no trailing zeros.
using FpPoly = std::vector<mpz_class>;

mpz_class mod_p(const mpz_class& a, const mpz_class& p);
mpz_class inv_mod_p(const mpz_class& a, const mpz_class& p);

namespace fppoly {
void trim(FpPoly& f);
FpPoly mul(const FpPoly& a, const FpPoly& b, const mpz_class& p);
// remainder and quotient of a by b
FpPoly divmod(const FpPoly& a, const FpPoly& b, const mpz_class& p, FpPoly* quotient = nullptr);
FpPoly gcd(FpPoly a, FpPoly b, const mpz_class& p);  // monic
FpPoly powmod(const FpPoly& base, const mpz_class& e, const FpPoly& mod, const mpz_class& p);
FpPoly monic(const FpPoly& f, const mpz_class& p);
mpz_class eval(const FpPoly& f, const mpz_class& x, const mpz_class& p);
}  // namespace fppoly

std::optional<mpz_class> sqrt_mod_p(const mpz_class& a, const mpz_class& p);

// s_i = min square root of q_i* mod p; sqrt(prod_S q*) -> prod_S s_i
FpPoly reduce_divisor_mod_p(const ClassPolynomial& poly, const mpz_class& p);

// all roots with multiplicity, ascending
std::vector<mpz_class> roots_in_fp(const FpPoly& f, const mpz_class& p, std::uint64_t seed = 1);

struct WeierstrassCurve {
    mpz_class p, a, b;

    mpz_class j_invariant() const;
    bool operator==(const WeierstrassCurve& o) const { return p == o.p && a == o.a && b == o.b; }
};

WeierstrassCurve curve_from_j(const mpz_class& j, const mpz_class& p);

std::vector<mpz_class> j_from_theta(const mpz_class& r, const InvariantKind& kind, long D, const mpz_class& p);

struct CurvePoint {
    mpz_class x, y;
    bool inf = true;

    static CurvePoint infinity() { return {}; }
    static CurvePoint affine(mpz_class x, mpz_class y) { return {std::move(x), std::move(y), false}; }
    bool operator==(const CurvePoint& o) const { return inf == o.inf && (inf || (x == o.x && y == o.y)); }
};

bool on_curve(const WeierstrassCurve& E, const CurvePoint& P);
CurvePoint point_neg(const WeierstrassCurve& E, const CurvePoint& P);
CurvePoint point_add(const WeierstrassCurve& E, const CurvePoint& P, const CurvePoint& Q);
CurvePoint scalar_mul(const WeierstrassCurve& E, const mpz_class& k, const CurvePoint& P);
CurvePoint random_point(const WeierstrassCurve& E, Rng& rng);

// 1 + sum_x (1 + chi(x^3 + a x + b)); p must fit in a machine word
long naive_count(const WeierstrassCurve& E);
long naive_count_serial(const WeierstrassCurve& E);

constexpr long kNaiveCountLimit = 10000;

// every trace a curve with CM by D can have, given 4p = u^2 + |D| v^2
std::vector<mpz_class> candidate_orders(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v);

bool has_order(const WeierstrassCurve& E, const mpz_class& order, const std::vector<mpz_class>& others, Rng& rng);

struct TwistChoice {
    WeierstrassCurve curve;
    int index = 0;  // 0 = input curve
};

std::optional<TwistChoice> select_twist(const WeierstrassCurve& E, long D, const mpz_class& u, const mpz_class& v,
                                        Rng& rng);

struct GenCurveOptions {
    std::uint64_t seed = 1;
    bool force_full = false;
};

struct GenCurveResult {
    WeierstrassCurve curve;
    mpz_class j;
    mpz_class order;
    std::string path;  // "divisor" or "full"
    mpz_class root;
    int twist_index = 0;
    DivisorTranscript transcript;
    long full_bits = 0;
};

// Checks the CM preconditions, throwing InvalidParameters naming the first failure.
void check_cm_parameters(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v);

GenCurveResult gen_curve(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v,
                         const InvariantKind& kind, const GenCurveOptions& opt = {});

}  // namespace cmforge
