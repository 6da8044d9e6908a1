#include "cmforge/bigfloat.hpp"

#include <algorithm>
#include <vector>

namespace cmforge {

namespace {

mpfr_prec_t pmax(const Real& a, const Real& b) { return std::max(a.prec(), b.prec()); }

}  // namespace

Real& Real::operator+=(const Real& o) {
    if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator-=(const Real& o) {
    if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator*=(const Real& o) {
    if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator/=(const Real& o) {
    if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

Real Real::operator-() const {
    Real r(prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
}

long Real::exponent() const {
    if (mpfr_zero_p(v_)) return -(1L << 40);
    return mpfr_get_exp(v_);
}

std::string Real::str(int digits) const {
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", digits, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

Real operator+(const Real& a, const Real& b) {
    Real r(pmax(a, b));
    mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator-(const Real& a, const Real& b) {
    Real r(pmax(a, b));
    mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator*(const Real& a, const Real& b) {
    Real r(pmax(a, b));
    mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator/(const Real& a, const Real& b) {
    Real r(pmax(a, b));
    mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

Real operator*(const Real& a, long b) {
    Real r(a.prec());
    mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN);
    return r;
}

Real operator/(const Real& a, long b) {
    Real r(a.prec());
    mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN);
    return r;
}

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }

Real real_pi(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

Real sqrt(const Real& x) {
    Real r(x.prec());
    mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real exp(const Real& x) {
    Real r(x.prec());
    mpfr_exp(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real log(const Real& x) {
    Real r(x.prec());
    mpfr_log(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real abs(const Real& x) {
    Real r(x.prec());
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real cos(const Real& x) {
    Real r(x.prec());
    mpfr_cos(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real sin(const Real& x) {
    Real r(x.prec());
    mpfr_sin(r.get(), x.get(), MPFR_RNDN);
    return r;
}

Real pow2(long e, mpfr_prec_t prec) {
    Real r(1L, prec);
    mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
    return r;
}

mpz_class floor_to_mpz(const Real& x) {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), x.get(), MPFR_RNDD);
    return z;
}

mpz_class round_to_mpz(const Real& x) {
    mpz_class z;
    Real t(x.prec() + 2);
    mpfr_round(t.get(), x.get());
    mpfr_get_z(z.get_mpz_t(), t.get(), MPFR_RNDN);
    return z;
}

std::pair<Real, Real> cospi_sinpi(const mpq_class& r, mpfr_prec_t prec) {
    // reduce r into [0, 2) exactly
    mpz_class num = r.get_num(), den = r.get_den();
    mpz_class twoden = 2 * den;
    mpz_class red = num % twoden;
    if (red < 0) red += twoden;
    mpq_class q(red, den);
    q.canonicalize();
    Real angle = real_pi(prec + 16) * Real(q, prec + 16);
    Real c(prec), s(prec);
    mpfr_sin_cos(s.get(), c.get(), angle.get(), MPFR_RNDN);
    return {std::move(c), std::move(s)};
}

Complex& Complex::operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    Real i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    Real n = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / n;
    Real i = (im * o.re - re * o.im) / n;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return Complex(a.re + b.re, a.im + b.im); }
Complex operator-(const Complex& a, const Complex& b) { return Complex(a.re - b.re, a.im - b.im); }

Complex operator*(const Complex& a, const Complex& b) {
    Complex r = a;
    r *= b;
    return r;
}

Complex operator/(const Complex& a, const Complex& b) {
    Complex r = a;
    r /= b;
    return r;
}

Complex operator*(const Complex& a, const Real& b) { return Complex(a.re * b, a.im * b); }
Complex operator/(const Complex& a, const Real& b) { return Complex(a.re / b, a.im / b); }
Complex operator*(const Complex& a, long b) { return Complex(a.re * b, a.im * b); }

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real abs(const Complex& z) {
    Real r(z.prec());
    mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
    return r;
}

Complex exp(const Complex& z) {
    Real m = exp(z.re);
    Real c(z.prec()), s(z.prec());
    mpfr_sin_cos(s.get(), c.get(), z.im.get(), MPFR_RNDN);
    return Complex(m * c, m * s);
}

Complex sqrt(const Complex& z) {
    mpfr_prec_t p = z.prec();
    if (z.re.is_zero() && z.im.is_zero()) return Complex(p);
    Real r = abs(z);
    // sqrt((|z| + x)/2) and sign-corrected companion, avoiding cancellation
    if (z.re.sign() >= 0) {
        Real a = sqrt((r + z.re) / 2L);
        Real b = z.im / (a * 2L);
        return Complex(a, b);
    }
    Real b = sqrt((r - z.re) / 2L);
    if (z.im.sign() < 0) b = -b;
    Real a = z.im / (b * 2L);
    return Complex(a, b);
}

Complex pow(const Complex& z, unsigned long n) {
    Complex result(1L, z.prec());
    Complex base = z;
    while (n) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n) base *= base;
    }
    return result;
}

Complex expi_pi(const mpq_class& r, mpfr_prec_t prec) {
    auto [c, s] = cospi_sinpi(r, prec);
    return Complex(std::move(c), std::move(s));
}

}  // namespace cmforge
