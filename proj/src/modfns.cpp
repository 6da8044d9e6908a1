#include "cmforge/modfns.hpp"

#include "cmforge/errors.hpp"

#include <exception>
#include <numeric>
#include <sstream>

namespace cmforge {

mpq_class dedekind_sum(const mpz_class& h_in, const mpz_class& k_in) {
    if (k_in <= 0) throw InvalidParameters("dedekind_sum: k must be positive");
    mpz_class k = k_in;
    mpz_class h;
    mpz_fdiv_r(h.get_mpz_t(), h_in.get_mpz_t(), k.get_mpz_t());
    // reciprocity: s(h,k) + s(k,h) = (h/k + k/h + 1/(hk))/12 - 1/4
    mpq_class acc = 0;
    int sign = 1;
    while (h != 0) {
        mpq_class term = mpq_class(h, k) + mpq_class(k, h) + mpq_class(mpz_class(1), h * k);
        term.canonicalize();
        term = term / 12 - mpq_class(1, 4);
        acc += sign * term;
        sign = -sign;
        mpz_class r = k % h;
        k = h;
        h = r;
    }
    return acc;
}

Complex eta_multiplier(const Sl2& m_in, const Complex& z, mpfr_prec_t prec) {
    Sl2 m = m_in;
    if (m.c < 0 || (m.c == 0 && m.d < 0)) m = {-m.a, -m.b, -m.c, -m.d};
    if (m.c == 0) return expi_pi(mpq_class(m.b, 12), prec);
    mpq_class angle = mpq_class(m.a + m.d, 12 * m.c) - dedekind_sum(m.d, m.c);
    angle.canonicalize();
    Complex eps = expi_pi(angle, prec);
    // sqrt(-i (c z + d)), the argument lies in the right half plane
    Real cR(m.c, prec), dR(m.d, prec);
    Complex w(cR * z.im, -(cR * z.re + dR));
    return eps * sqrt(w);
}

Complex eta_series(const Complex& z, mpfr_prec_t prec) {
    Complex zz = z;
    Real twopi = real_pi(prec) * 2L;
    Complex iz(-(zz.im * twopi), zz.re * twopi);  // 2 pi i z
    Complex q = exp(iz);
    Complex q24 = exp(Complex(iz.re / 24L, iz.im / 24L));
    Complex q3 = q * q * q;
    Real tiny = pow2(-static_cast<long>(prec) - 8, prec);

    Complex sum(1L, prec);
    Complex qa = q;          // q^{n(3n-1)/2}
    Complex qb = q * q;      // q^{n(3n+1)/2}
    Complex step = q * q3;   // q^{3n+1}
    int quiet = 0;
    for (long n = 1; quiet < 3; ++n) {
        Complex term = qa + qb;
        if (n % 2) sum -= term; else sum += term;
        if (abs(qa) < tiny) ++quiet; else quiet = 0;
        qa *= step;
        qb *= step * q;
        step *= q3;
        if (n > 1000000) throw InternalError("eta_series: no convergence");
    }
    return q24 * sum;
}

Complex eta(const Complex& z, const PrecisionBudget& pb) {
    if (z.im.sign() <= 0) throw InvalidParameters("eta: argument must lie in the upper half plane");
    mpfr_prec_t prec = pb.working() + 32;
    Complex w{Real(prec), Real(prec)};
    mpfr_set(w.re.get(), z.re.get(), MPFR_RNDN);
    mpfr_set(w.im.get(), z.im.get(), MPFR_RNDN);
    Sl2 M;  // z = M w
    const Sl2 S{0, -1, 1, 0};
    Real one(1L, prec);
    for (int iter = 0; iter < 100000; ++iter) {
        mpz_class n = round_to_mpz(w.re);
        if (n != 0) {
            w.re -= Real(n, prec);
            M = M * Sl2{1, n, 0, 1};
        }
        if (norm(w) < one) {
            w = Complex(-1L, prec) / w;
            M = M * S;
            continue;
        }
        break;
    }
    return eta_multiplier(M, w, prec) * eta_series(w, prec);
}

Complex eta(const QuadForm& f, const PrecisionBudget& pb) {
    mpfr_prec_t prec = pb.working();
    Reduction r = reduce_tracked(f);
    Complex w = root_of_form(r.form, prec);
    return eta_multiplier(r.transform, w, prec) * eta_series(w, prec);
}

namespace {

// eta((al z + be)/ga) for the two kinds of points
struct NumericPoint {
    const Complex& z;
    PrecisionBudget pb;

    Complex eta_at(long al, long be, long ga) const {
        mpfr_prec_t prec = pb.working() + 16;
        Complex w = z * al;
        w.re += Real(be, prec);
        w = w / Real(ga, prec);
        return eta(w, pb);
    }
};

struct FormPoint {
    const QuadForm& f;
    PrecisionBudget pb;

    Complex eta_at(long al, long be, long ga) const {
        QuadForm g{f.A * ga * ga, -2 * f.A * be * ga + f.B * al * ga, f.A * be * be - f.B * al * be + f.C * al * al};
        return eta(g, pb);
    }
};

template <class P>
Complex weber_f_at(const P& pt) {
    mpfr_prec_t prec = pt.pb.working();
    return expi_pi(mpq_class(-1, 24), prec) * pt.eta_at(1, 1, 2) / pt.eta_at(1, 0, 1);
}

template <class P>
Complex weber_f1_at(const P& pt) {
    return pt.eta_at(1, 0, 2) / pt.eta_at(1, 0, 1);
}

template <class P>
Complex weber_f2_at(const P& pt) {
    mpfr_prec_t prec = pt.pb.working();
    return pt.eta_at(2, 0, 1) / pt.eta_at(1, 0, 1) * sqrt(Real(2L, prec));
}

template <class P>
Complex gamma2_at(const P& pt) {
    mpfr_prec_t prec = pt.pb.working();
    Complex f1 = weber_f1_at(pt);
    Complex f8 = pow(f1, 8);
    Complex f24 = f8 * f8 * f8;
    return (f24 + Complex(16L, prec)) / f8;
}

template <class P>
Complex double_eta_at(const P& pt, long p1, long p2, long s) {
    Complex num = pt.eta_at(1, 0, p1) * pt.eta_at(1, 0, p2);
    Complex den = pt.eta_at(1, 0, 1) * pt.eta_at(1, 0, p1 * p2);
    return pow(num / den, static_cast<unsigned long>(s));
}

}  // namespace

Complex weber_f(const Complex& z, const PrecisionBudget& pb) { return weber_f_at(NumericPoint{z, pb}); }
Complex weber_f1(const Complex& z, const PrecisionBudget& pb) { return weber_f1_at(NumericPoint{z, pb}); }
Complex weber_f2(const Complex& z, const PrecisionBudget& pb) { return weber_f2_at(NumericPoint{z, pb}); }
Complex gamma2(const Complex& z, const PrecisionBudget& pb) { return gamma2_at(NumericPoint{z, pb}); }
Complex jfun(const Complex& z, const PrecisionBudget& pb) { return pow(gamma2(z, pb), 3); }
Complex double_eta_m(const Complex& z, long p1, long p2, long s, const PrecisionBudget& pb) {
    return double_eta_at(NumericPoint{z, pb}, p1, p2, s);
}

Complex weber_f(const QuadForm& f, const PrecisionBudget& pb) { return weber_f_at(FormPoint{f, pb}); }
Complex weber_f1(const QuadForm& f, const PrecisionBudget& pb) { return weber_f1_at(FormPoint{f, pb}); }
Complex weber_f2(const QuadForm& f, const PrecisionBudget& pb) { return weber_f2_at(FormPoint{f, pb}); }
Complex gamma2(const QuadForm& f, const PrecisionBudget& pb) { return gamma2_at(FormPoint{f, pb}); }
Complex jfun(const QuadForm& f, const PrecisionBudget& pb) { return pow(gamma2(f, pb), 3); }
Complex double_eta_m(const QuadForm& f, long p1, long p2, long s, const PrecisionBudget& pb) {
    return double_eta_at(FormPoint{f, pb}, p1, p2, s);
}

long double_eta_exponent(long p1, long p2) { return 24 / std::gcd(24L, (p1 - 1) * (p2 - 1)); }

WeberCase weber_case_for(long D) {
    if (D >= 0 || D % 4 != 0) throw UnsupportedInvariant("weber: D must be -4m");
    long m = -D / 4;
    switch (m % 8) {
        case 1: return WeberCase::M1_MOD8;
        case 3: return WeberCase::M3_MOD8;
        case 5: return WeberCase::M5_MOD8;
        case 7: return WeberCase::M7_MOD8;
        case 2:
        case 6: return WeberCase::M2_MOD4;
        case 4: return WeberCase::M4_MOD8;
        default: throw UnsupportedInvariant("weber: no construction for m = 0 mod 8");
    }
}

long InvariantKind::n_system_modulus() const {
    switch (tag) {
        case InvariantTag::J: return 1;
        case InvariantTag::GAMMA2: return 3;
        case InvariantTag::WEBER_G: return cubed ? 16 : 48;
        case InvariantTag::DOUBLE_ETA: return p1 * p2;
    }
    return 1;
}

namespace {

// power b of f or f1 inside g
long weber_power(WeberCase c) {
    switch (c) {
        case WeberCase::M1_MOD8: return 2;
        case WeberCase::M3_MOD8: return 1;
        case WeberCase::M5_MOD8: return 4;
        case WeberCase::M7_MOD8: return 1;
        case WeberCase::M2_MOD4: return 2;
        case WeberCase::M4_MOD8: return 4;
    }
    return 1;
}

}  // namespace

mpq_class InvariantKind::height_ratio() const {
    switch (tag) {
        case InvariantTag::J: return 1;
        case InvariantTag::GAMMA2: return mpq_class(1, 3);
        case InvariantTag::WEBER_G: {
            mpq_class r(weber_power(weber_case) * (cubed ? 3 : 1), 72);
            r.canonicalize();
            return r;
        }
        case InvariantTag::DOUBLE_ETA: {
            long psi = (p1 == p2) ? p1 * (p1 + 1) : (p1 + 1) * (p2 + 1);
            mpq_class r(s * (p1 - 1) * (p2 - 1), 12 * psi);
            r.canonicalize();
            return r;
        }
    }
    return 1;
}

std::string InvariantKind::name() const {
    switch (tag) {
        case InvariantTag::J: return "j";
        case InvariantTag::GAMMA2: return "gamma2";
        case InvariantTag::WEBER_G: return "weber";
        case InvariantTag::DOUBLE_ETA: {
            std::ostringstream os;
            os << "doubleeta:" << p1 << "," << p2;
            return os.str();
        }
    }
    return "?";
}

InvariantKind make_invariant(InvariantTag tag, const Discriminant& disc, long p1, long p2) {
    InvariantKind k;
    k.tag = tag;
    long D = disc.D;
    switch (tag) {
        case InvariantTag::J: break;
        case InvariantTag::GAMMA2:
            if (D % 3 == 0) throw UnsupportedInvariant("gamma2: needs 3 not dividing D");
            break;
        case InvariantTag::WEBER_G:
            k.weber_case = weber_case_for(D);
            k.cubed = (D % 3 == 0);
            break;
        case InvariantTag::DOUBLE_ETA: {
            if (p1 > p2) std::swap(p1, p2);
            if (!is_prime(mpz_class(p1)) || !is_prime(mpz_class(p2)))
                throw UnsupportedInvariant("doubleeta: p1, p2 must be prime");
            k.p1 = p1;
            k.p2 = p2;
            k.s = double_eta_exponent(p1, p2);
            mpz_class Dz(D);
            auto sym = [&](long p) { return kronecker(Dz, mpz_class(p)); };
            bool ok;
            if (p1 != p2) {
                ok = sym(p1) != -1 && sym(p2) != -1 && disc.f % p1 != 0 && disc.f % p2 != 0;
            } else if (p1 != 2) {
                ok = sym(p1) == 1 || disc.f % p1 == 0;
            } else {
                long r32 = ((D % 32) + 32) % 32;
                ok = sym(2) == 1 || (disc.f % 2 == 0 && r32 != 4);
            }
            if (!ok) throw UnsupportedInvariant("doubleeta: primes violate the strong condition for D");
            break;
        }
    }
    return k;
}

InvariantKind parse_invariant(const std::string& name, const Discriminant& disc) {
    if (name == "j") return make_invariant(InvariantTag::J, disc);
    if (name == "gamma2") return make_invariant(InvariantTag::GAMMA2, disc);
    if (name == "weber") return make_invariant(InvariantTag::WEBER_G, disc);
    const std::string pre = "doubleeta:";
    if (name.rfind(pre, 0) == 0) {
        std::string rest = name.substr(pre.size());
        auto comma = rest.find(',');
        if (comma == std::string::npos) throw InvalidParameters("doubleeta:p1,p2 expected");
        long p1 = std::stol(rest.substr(0, comma));
        long p2 = std::stol(rest.substr(comma + 1));
        return make_invariant(InvariantTag::DOUBLE_ETA, disc, p1, p2);
    }
    throw InvalidParameters("unknown invariant '" + name + "'");
}

NSystem invariant_n_system(const InvariantKind& kind, const Discriminant& disc) {
    long N = kind.n_system_modulus();
    long D = disc.D;
    long parity = ((D % 2) + 2) % 2;
    long target = 0;
    switch (kind.tag) {
        case InvariantTag::J: return n_system(disc, mpz_class(1));
        case InvariantTag::GAMMA2: target = parity ? 3 : 0; break;  // 3 | B
        case InvariantTag::WEBER_G: target = 0; break;              // 32 | B (and 3 | B)
        case InvariantTag::DOUBLE_ETA: {
            // N | C for A prime to N means B^2 = D (mod 4N)
            bool found = false;
            for (long b = 0; b < 2 * N && !found; ++b) {
                long r = ((b * b - D) % (4 * N) + 4 * N) % (4 * N);
                if (r == 0) {
                    target = b;
                    found = true;
                }
            }
            if (!found) throw UnsupportedInvariant("doubleeta: no residue with N | C");
            break;
        }
    }
    NSystem sys = n_system_with_residue(disc, mpz_class(N), mpz_class(target));
    check_internal(is_n_system(sys), "invariant_n_system: construction failed");
    return sys;
}

Complex weber_g(const QuadForm& f, long D, bool cubed, const PrecisionBudget& pb) {
    if (f.A % 2 == 0 || f.B % 32 != 0) throw InvalidParameters("weber_g: needs odd A and 32 | B");
    if (!cubed && (f.A % 3 == 0 || f.B % 3 != 0 || D % 3 == 0))
        throw InvalidParameters("weber_g: un-cubed value needs 3 not dividing A, D and 3 | B");
    mpfr_prec_t prec = pb.working();
    WeberCase wc = weber_case_for(D);
    int k2 = kronecker(mpz_class(2), f.A);
    Real sqrt2 = sqrt(Real(2L, prec));
    Complex inner(prec);
    switch (wc) {
        case WeberCase::M1_MOD8: inner = pow(weber_f(f, pb), 2) / sqrt2 * k2; break;
        case WeberCase::M3_MOD8: inner = weber_f(f, pb); break;
        case WeberCase::M5_MOD8: inner = pow(weber_f(f, pb), 4) / Real(2L, prec); break;
        case WeberCase::M7_MOD8: inner = weber_f(f, pb) / sqrt2 * k2; break;
        case WeberCase::M2_MOD4: inner = pow(weber_f1(f, pb), 2) / sqrt2 * k2; break;
        case WeberCase::M4_MOD8: inner = pow(weber_f1(f, pb), 4) / (sqrt2 * 2L) * k2; break;
    }
    return cubed ? pow(inner, 3) : inner;
}

Complex theta_value(const InvariantKind& kind, const QuadForm& f, long D, const PrecisionBudget& pb) {
    switch (kind.tag) {
        case InvariantTag::J: return jfun(f, pb);
        case InvariantTag::GAMMA2: return gamma2(f, pb);
        case InvariantTag::WEBER_G: return weber_g(f, D, kind.cubed, pb);
        case InvariantTag::DOUBLE_ETA: return double_eta_m(f, kind.p1, kind.p2, kind.s, pb);
    }
    throw InternalError("theta_value: unknown tag");
}

std::vector<Complex> evaluate_theta(const InvariantKind& kind, const std::vector<QuadForm>& forms, long D,
                                    const PrecisionBudget& pb) {
    std::vector<Complex> out(forms.size(), Complex(pb.working()));
    const long n = static_cast<long>(forms.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = theta_value(kind, forms[i], D, pb);
        } catch (...) {
#pragma omp critical(cmforge_theta_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<Complex> evaluate_theta_serial(const InvariantKind& kind, const std::vector<QuadForm>& forms, long D,
                                           const PrecisionBudget& pb) {
    std::vector<Complex> out;
    out.reserve(forms.size());
    for (const QuadForm& f : forms) out.push_back(theta_value(kind, f, D, pb));
    return out;
}

}  // namespace cmforge
