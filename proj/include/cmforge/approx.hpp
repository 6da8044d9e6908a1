#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/bigfloat.hpp"
#include "cmforge/genusfield.hpp"

#include <gmpxx.h>

#include <functional>
#include <vector>

namespace cmforge {

struct DeltaG {
    mpz_class delta;
    GFElem g;        // g = sqrt(delta)/2 or (1 + sqrt(delta))/2, as an element of K_G
    bool odd = true;
};

// lambda in {0,1}^(t-1), nonzero
DeltaG delta_g(const Discriminant& disc, const FieldPtr& field, unsigned lambda);

// Continued fraction of g via its complete quotients (g + x)/y.
// z and z_prev are kept exactly as r + s*g.
struct CFRegister {
    unsigned lambda = 0;
    mpz_class delta;
    bool odd = true;
    GFElem g;
    mpz_class x, y, y_prev;
    mpz_class r, s, r_prev, s_prev;
    Real z;  // numeric value of r + s*g
    unsigned long n = 0;

    bool z_is_rational() const { return s == 0; }
};

CFRegister cf_init(const Discriminant& disc, const FieldPtr& field, unsigned lambda);
// floor((g + x)/y), exact
mpz_class cf_floor(const CFRegister& reg);
// one step; returns the partial quotient
mpz_class cf_step(CFRegister& reg);
// value of r + s*g at enough precision to survive the cancellation
Real cf_value(const CFRegister& reg, const mpz_class& r, const mpz_class& s);
// r + s*sigma(g) as an element of K_G
GFElem cf_sigma_z(const CFRegister& reg);

// c[mu][xi][eta]: omega*_xi g_eta = sum_mu c omega*_mu (eta = 0 row uses g = 1)
using CTensor = std::vector<std::vector<std::vector<mpq_class>>>;
CTensor c_tensor(const Discriminant& disc, const MPair& mp);

struct ApproxOptions {
    bool check_invariants = false;
    unsigned long max_iterations = 0;  // 0: 8(m-1)log2(N0) + 64
};

struct ApproxRun {
    std::vector<CFRegister> registers;  // index lambda - 1
    std::vector<mpz_class> A;
    mpz_class N0;
    unsigned long iterations = 0;
    GFElem Z;  // sum_mu A_mu omega*_mu
};

using ApproxObserver = std::function<void(const ApproxRun&, unsigned lambda, const mpz_class& a)>;

unsigned long approx_iteration_cap(unsigned m, const mpz_class& N0);

// Lexicographic order on (lambda_1, ..., lambda_{t-1}); bit i-1 holds lambda_i.
bool lambda_lex_less(unsigned a, unsigned b, int t);

ApproxRun run_approx(const Discriminant& disc, const MPair& mp, const CTensor& c, const mpz_class& N0,
                     const ApproxOptions& opt = {}, const ApproxObserver& observer = {});

struct ApproxQuality {
    Real Z;
    Real scaled_conj;  // max_lambda |tau_lambda(Z)| * Z^(1/(m-1))
    Real bound;        // sqrt|d|^m
    bool ok = false;
};

ApproxQuality approx_quality(const ApproxRun& run, const Discriminant& disc, const MPair& mp);

// Exact checks of the per-register bounds and of the product identity.
void check_run_invariants(const ApproxRun& run, const Discriminant& disc, const MPair& mp);

}  // namespace cmforge
