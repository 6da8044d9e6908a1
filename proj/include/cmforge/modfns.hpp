#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/bigfloat.hpp"
#include "cmforge/forms.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cmforge {

struct PrecisionBudget {
    mpfr_prec_t bits = 128;
    mpfr_prec_t guard = 64;

    mpfr_prec_t working() const { return bits + guard; }
};

// Dedekind sum s(h, k) for k > 0, gcd(h, k) = 1.
mpq_class dedekind_sum(const mpz_class& h, const mpz_class& k);

// eta(M z) / eta(z) for M in SL2(Z) and Im z > 0.
Complex eta_multiplier(const Sl2& m, const Complex& z, mpfr_prec_t prec);

// Pentagonal series, no argument reduction.
Complex eta_series(const Complex& z, mpfr_prec_t prec);

// Dedekind eta. The numeric version reduces z in floating point; the form
// version reduces the form exactly and evaluates at its root.
Complex eta(const Complex& z, const PrecisionBudget& pb);
Complex eta(const QuadForm& f, const PrecisionBudget& pb);

Complex weber_f(const Complex& z, const PrecisionBudget& pb);
Complex weber_f1(const Complex& z, const PrecisionBudget& pb);
Complex weber_f2(const Complex& z, const PrecisionBudget& pb);
Complex gamma2(const Complex& z, const PrecisionBudget& pb);
Complex jfun(const Complex& z, const PrecisionBudget& pb);
Complex double_eta_m(const Complex& z, long p1, long p2, long s, const PrecisionBudget& pb);

Complex weber_f(const QuadForm& f, const PrecisionBudget& pb);
Complex weber_f1(const QuadForm& f, const PrecisionBudget& pb);
Complex weber_f2(const QuadForm& f, const PrecisionBudget& pb);
Complex gamma2(const QuadForm& f, const PrecisionBudget& pb);
Complex jfun(const QuadForm& f, const PrecisionBudget& pb);
Complex double_eta_m(const QuadForm& f, long p1, long p2, long s, const PrecisionBudget& pb);

enum class InvariantTag { J, GAMMA2, WEBER_G, DOUBLE_ETA };

// m = -D/4 classes of the Weber construction
enum class WeberCase { M1_MOD8, M3_MOD8, M5_MOD8, M7_MOD8, M2_MOD4, M4_MOD8 };

struct InvariantKind {
    InvariantTag tag = InvariantTag::J;
    WeberCase weber_case = WeberCase::M3_MOD8;
    bool cubed = true;  // Weber only: false when 3 does not divide D
    long p1 = 0, p2 = 0, s = 1;

    long n_system_modulus() const;
    // deg_j Phi / deg_theta Phi
    mpq_class height_ratio() const;
    std::string name() const;
};

long double_eta_exponent(long p1, long p2);
WeberCase weber_case_for(long D);

// Validate against the class-field theorems and fill in the case data.
InvariantKind make_invariant(InvariantTag tag, const Discriminant& disc, long p1 = 0, long p2 = 0);
// Parses "j", "gamma2", "weber", "doubleeta:p1,p2".
InvariantKind parse_invariant(const std::string& name, const Discriminant& disc);

// The N-system on which theta's singular values are Galois-coherent.
NSystem invariant_n_system(const InvariantKind& kind, const Discriminant& disc);

// Weber g at a form of a 16-system (48-system when un-cubed).
Complex weber_g(const QuadForm& f, long D, bool cubed, const PrecisionBudget& pb);

Complex theta_value(const InvariantKind& kind, const QuadForm& f, long D, const PrecisionBudget& pb);

// theta at every form; the OpenMP kernel and its serial reference.
std::vector<Complex> evaluate_theta(const InvariantKind& kind, const std::vector<QuadForm>& forms, long D,
                                    const PrecisionBudget& pb);
std::vector<Complex> evaluate_theta_serial(const InvariantKind& kind, const std::vector<QuadForm>& forms,
                                           long D, const PrecisionBudget& pb);

}  // namespace cmforge
