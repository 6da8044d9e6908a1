#pragma once

#include "cmforge/approx.hpp"
#include "cmforge/arith.hpp"
#include "cmforge/bigfloat.hpp"
#include "cmforge/genusfield.hpp"
#include "cmforge/modfns.hpp"

#include <gmpxx.h>

#include <map>
#include <optional>
#include <vector>

namespace cmforge {

// sum of 1/A over the reduced forms of each genus (keyed by the phi vector)
std::map<std::vector<int>, mpq_class> genus_inverse_sums(const Discriminant& disc);

// Bound on all conjugates of the divisor coefficients, safety factor 2^8 included.
Real bound_T0_heuristic(const Discriminant& disc, const InvariantKind& kind, mpfr_prec_t prec = 128);
Real bound_T0_rigorous(long D, mpfr_prec_t prec = 128);

enum class Side { REAL, IMAG };

struct SidePlan {
    MPair mp;
    ApproxRun run;
    StructureConstants sc;
    GFElem base;           // beta_0 or beta*_0
    Real T0prime;          // bound on |tau_lambda(sum b omega)|
    Real Zreq;             // Z must exceed this
    mpz_class N0;
    Real Z;
    Real epsilon;          // allowed error of sum b beta
    std::vector<GFElem> K;                     // M(Id) Z X_eta / base, exact
    std::vector<std::vector<mpz_class>> M;     // M[eta][xi] = sum_mu A_mu x[mu][xi][eta]
};

struct RecoveryPlan {
    Discriminant disc;
    GenusBasis basis;
    Real T0;
    Real epsilon;  // allowed error of a divisor coefficient
    long float_bits = 0;
    SidePlan real, imag;

    const SidePlan& side(Side s) const { return s == Side::REAL ? real : imag; }
};

// X_0 = 1, X_eta = g_eta
std::vector<GFElem> default_X(const Discriminant& disc, const FieldPtr& field);

RecoveryPlan make_plan(const Discriminant& disc, const Real& T0);
RecoveryPlan make_plan(const Discriminant& disc, const InvariantKind& kind);

// gamma approximates sum b beta (REAL, a real number) or sum b' beta* (IMAG,
// a pure imaginary number). Throws PrecisionEscalation if a rounding residual
// reaches 1/4 or the solution is not integral.
std::vector<mpz_class> recover_coords(const Complex& gamma, const RecoveryPlan& plan, Side side);

// Exact solve of M b = r over the integers by fraction-free elimination.
// Returns nothing when the solution is not integral; throws InternalError if M is singular.
std::optional<std::vector<mpz_class>> solve_integer_system(std::vector<std::vector<mpz_class>> M,
                                                           std::vector<mpz_class> r);

}  // namespace cmforge
