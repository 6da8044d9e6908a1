#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/genusfield.hpp"
#include "cmforge/modfns.hpp"
#include "cmforge/recover.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace cmforge {

// Coefficients are stored lowest degree first; the leading 1 is included.
struct ClassPolynomial {
    Discriminant disc;
    InvariantKind kind;
    std::optional<std::vector<int>> phi0;
    std::vector<mpz_class> int_coeffs;
    std::vector<GFElem> gf_coeffs;

    bool is_divisor() const { return phi0.has_value(); }
    size_t degree() const { return (is_divisor() ? gf_coeffs.size() : int_coeffs.size()) - 1; }
};

std::string poly_to_string(const std::vector<mpz_class>& coeffs);

// CMFORGE_MAX_BITS, default 2^20
long max_precision_bits();

struct DivisorTranscript {
    Real T0;
    mpz_class N0_real, N0_imag;
    Real epsilon;
    long float_bits = 0;
    int escalations = 0;
};

// The forms of the invariant's N-system whose genus is phi0.
std::vector<QuadForm> coset_forms(const Discriminant& disc, const InvariantKind& kind, const std::vector<int>& phi0);

// im phi: sign vectors with product 1
std::vector<std::vector<int>> phi_image(const Discriminant& disc);

// Expand prod (x - r) in ascending |r|.
std::vector<Complex> expand_product(std::vector<Complex> roots, mpfr_prec_t prec);

ClassPolynomial class_poly_full(const Discriminant& disc, const InvariantKind& kind, long* bits_used = nullptr);

ClassPolynomial class_poly_divisor(const Discriminant& disc, const InvariantKind& kind,
                                   std::optional<std::vector<int>> phi0 = std::nullopt,
                                   DivisorTranscript* transcript = nullptr);

// Exact product over K_G of the divisors of all genera, compared with the full polynomial.
bool coset_product_check(const Discriminant& disc, const InvariantKind& kind);

std::vector<GFElem> gf_poly_mul(const std::vector<GFElem>& a, const std::vector<GFElem>& b);

}  // namespace cmforge
