#pragma once

#include "cmforge/arith.hpp"
#include "cmforge/bigfloat.hpp"

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

namespace cmforge {

// Q(sqrt q_1*, ..., sqrt q_t*) with basis e_S = prod_{i in S} sqrt q_i*,
// S encoded as a bitmask (bit i <-> q_{i+1}*).
struct GenusField {
    std::vector<long> qstars;

    int t() const { return static_cast<int>(qstars.size()); }
    unsigned dim() const { return 1u << qstars.size(); }
    unsigned neg_mask() const;
};

using FieldPtr = std::shared_ptr<const GenusField>;

FieldPtr make_field(const std::vector<long>& qstars);

class GFElem {
public:
    GFElem() = default;
    explicit GFElem(FieldPtr field);
    GFElem(FieldPtr field, const mpq_class& r);

    static GFElem basis(FieldPtr field, unsigned S, const mpq_class& c = 1);

    const FieldPtr& field() const { return field_; }
    const mpq_class& operator[](unsigned S) const { return c_[S]; }
    mpq_class& operator[](unsigned S) { return c_[S]; }
    unsigned dim() const { return static_cast<unsigned>(c_.size()); }

    GFElem& operator+=(const GFElem& o);
    GFElem& operator-=(const GFElem& o);
    GFElem& operator*=(const GFElem& o);
    GFElem& operator*=(const mpq_class& r);
    GFElem operator-() const;

    bool is_zero() const;
    bool is_rational() const;
    bool operator==(const GFElem& o) const;
    bool operator!=(const GFElem& o) const { return !(*this == o); }

    // complex conjugation
    GFElem conj() const;
    // sqrt q_i* -> -sqrt q_i* for every bit i of lambda
    GFElem tau(unsigned lambda) const;
    GFElem inverse() const;

    // numeric value; tau_mask applies tau first
    Complex eval(mpfr_prec_t prec, unsigned tau_mask = 0) const;
    std::string str() const;

private:
    void check_same(const GFElem& o) const;

    FieldPtr field_;
    std::vector<mpq_class> c_;
};

GFElem operator+(const GFElem& a, const GFElem& b);
GFElem operator-(const GFElem& a, const GFElem& b);
GFElem operator*(const GFElem& a, const GFElem& b);
GFElem operator*(const GFElem& a, const mpq_class& r);
GFElem operator/(const GFElem& a, const GFElem& b);

// x = sum_k c_k v_k with rational c_k; throws if x is outside the span.
std::vector<mpq_class> coordinates(const GFElem& x, const std::vector<GFElem>& basis);

enum class BasisCase { DEGENERATE, ALL_ODD, EVEN_8_POSITIVE, EVEN_NEG_MIXED, EVEN_NEG_ALLPOS };

std::string to_string(BasisCase c);

// Integral bases of O_{K_G} cap R (beta) and O_{K_G} cap iR (beta_star),
// indexed by mu in {0,1}^{t-1} (bit i-1 <-> mu_i).
struct GenusBasis {
    FieldPtr field;
    int u = 0;
    BasisCase kind = BasisCase::DEGENERATE;
    std::vector<GFElem> beta;
    std::vector<GFElem> beta_star;

    int t() const { return field->t(); }
    unsigned m() const { return static_cast<unsigned>(beta.size()); }
    GFElem sqrt_d() const;
};

GenusBasis build_basis(const Discriminant& disc);

// sum_mu (-1)^|mu| tau_mu(beta_eta beta*_nu)
GFElem duality_sum(const GenusBasis& basis, unsigned eta, unsigned nu);

enum class MPairVariant { REAL_PART, IMAG_PART };

struct MPair {
    MPairVariant variant = MPairVariant::REAL_PART;
    std::vector<GFElem> omega;
    std::vector<GFElem> omega_star;
    std::vector<GFElem> mvals;  // M(tau_mu)
};

MPair build_mpair(const GenusBasis& basis, MPairVariant variant);

// sum_mu M(tau_mu) tau_mu(omega_l omega*_l')
GFElem mpair_duality(const MPair& mp, unsigned l, unsigned lp);

struct StructureConstants {
    std::vector<GFElem> X;
    // x[mu][xi][eta]: omega_xi X_eta = sum_mu x omega_mu
    std::vector<std::vector<std::vector<mpz_class>>> x;
};

StructureConstants structure_constants(const MPair& mp, const std::vector<GFElem>& X);

unsigned popcount(unsigned x);

}  // namespace cmforge
