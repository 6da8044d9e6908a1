#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/bigfloat.hpp"

#include <gmpxx.h>

#include <vector>

namespace cmforge {

struct QuadForm {
    mpz_class A, B, C;

    mpz_class disc() const { return B * B - 4 * A * C; }
    bool is_reduced() const;
    bool is_primitive() const;
    bool operator==(const QuadForm& o) const { return A == o.A && B == o.B && C == o.C; }
    bool operator!=(const QuadForm& o) const { return !(*this == o); }
};

bool operator<(const QuadForm& x, const QuadForm& y);

// Substitution x -> a x' + b y', y -> c x' + d y'. The root of the image
// form is mapped back to the original root by tau = (a tau' + b)/(c tau' + d).
struct Sl2 {
    mpz_class a = 1, b = 0, c = 0, d = 1;

    Sl2 operator*(const Sl2& o) const;
    Sl2 inverse() const { return {d, -b, -c, a}; }
    mpz_class det() const { return a * d - b * c; }
};

QuadForm act(const QuadForm& f, const Sl2& m);

struct Reduction {
    QuadForm form;
    Sl2 transform;  // form = act(input, transform)
};

// Also used on imprimitive forms (the eta arguments of singular values).
Reduction reduce_tracked(const QuadForm& f);
QuadForm reduce(const QuadForm& f);

std::vector<QuadForm> enumerate_reduced(const Discriminant& disc);

QuadForm make_coprime(const QuadForm& f, const mpz_class& N);

struct NSystem {
    mpz_class N;
    std::vector<QuadForm> forms;
    Discriminant disc;
};

// Literal construction: every form is moved onto the residue B_1 of the first.
NSystem n_system(const Discriminant& disc, const mpz_class& N);
// Same, but all forms (the first included) are moved onto B = target mod 2N.
NSystem n_system_with_residue(const Discriminant& disc, const mpz_class& N, const mpz_class& target);
bool is_n_system(const NSystem& sys);

Complex root_of_form(const QuadForm& f, mpfr_prec_t prec);

std::vector<int> phi_class(const QuadForm& f, const Discriminant& disc);

}  // namespace cmforge
