#include "cmforge/classpoly.hpp"

#include "cmforge/errors.hpp"
#include "cmforge/forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>

namespace cmforge {

std::string poly_to_string(const std::vector<mpz_class>& coeffs) {
    std::ostringstream os;
    bool first = true;
    for (size_t k = coeffs.size(); k-- > 0;) {
        const mpz_class& c = coeffs[k];
        if (c == 0) continue;
        mpz_class a = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (a != 1 || k == 0) os << a.get_str();
        if (k >= 1) os << "x";
        if (k >= 2) os << "^" << k;
    }
    if (first) os << "0";
    return os.str();
}

long max_precision_bits() {
    const char* env = std::getenv("CMFORGE_MAX_BITS");
    if (env && *env) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return 1L << 20;
}

std::vector<std::vector<int>> phi_image(const Discriminant& disc) {
    std::vector<std::vector<int>> out;
    const int t = disc.t();
    for (unsigned mask = 0; mask < (1u << t); ++mask) {
        if (__builtin_popcount(mask) % 2) continue;
        std::vector<int> eps(t);
        for (int i = 0; i < t; ++i) eps[i] = (mask >> i) & 1u ? -1 : 1;
        out.push_back(eps);
    }
    return out;
}

std::vector<QuadForm> coset_forms(const Discriminant& disc, const InvariantKind& kind, const std::vector<int>& phi0) {
    std::vector<QuadForm> out;
    for (const QuadForm& f : invariant_n_system(kind, disc).forms)
        if (phi_class(f, disc) == phi0) out.push_back(f);
    return out;
}

std::vector<Complex> expand_product(std::vector<Complex> roots, mpfr_prec_t prec) {
    std::vector<Real> mags;
    for (const auto& r : roots) mags.push_back(norm(r));
    std::vector<size_t> order(roots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return mags[a] < mags[b]; });
    std::vector<Complex> poly{Complex(1L, prec)};
    for (size_t idx : order) {
        const Complex& r = roots[idx];
        std::vector<Complex> next(poly.size() + 1, Complex(prec));
        for (size_t k = 0; k < poly.size(); ++k) {
            next[k + 1] += poly[k];
            next[k] -= poly[k] * r;
        }
        poly = std::move(next);
    }
    return poly;
}

namespace {

long log2_estimate(const Discriminant& disc, const InvariantKind& kind, bool all_forms) {
    mpq_class s = 0;
    if (all_forms) {
        for (const QuadForm& f : enumerate_reduced(disc)) s += mpq_class(mpz_class(1), f.A);
    } else {
        for (const auto& [eps, v] : genus_inverse_sums(disc)) s = std::max(s, v);
    }
    double lnT = 3.141592653589793 * std::sqrt(static_cast<double>(-disc.D)) * mpq_class(s * kind.height_ratio()).get_d();
    return static_cast<long>(lnT / 0.6931471805599453) + 1;
}

bool round_all(const std::vector<Complex>& poly, std::vector<mpz_class>& out) {
    const Real quarter(mpq_class(1, 4), 64);
    out.clear();
    for (const auto& c : poly) {
        mpz_class r = round_to_mpz(c.re);
        if (abs(c.re - Real(r, c.prec())) >= quarter || abs(c.im) >= quarter) return false;
        out.push_back(r);
    }
    return true;
}

}  // namespace

ClassPolynomial class_poly_full(const Discriminant& disc, const InvariantKind& kind, long* bits_used) {
    NSystem sys = invariant_n_system(kind, disc);
    ClassPolynomial cp;
    cp.disc = disc;
    cp.kind = kind;
    const long max_bits = max_precision_bits();
    long bits = log2_estimate(disc, kind, true) + static_cast<long>(sys.forms.size()) + 64;
    for (;;) {
        if (bits > max_bits) throw PrecisionExhausted("class_poly_full: precision ceiling reached");
        PrecisionBudget pb{bits, 64};
        auto roots = evaluate_theta(kind, sys.forms, disc.D, pb);
        auto poly = expand_product(roots, pb.working());
        if (round_all(poly, cp.int_coeffs)) break;
        bits *= 2;
    }
    if (bits_used) *bits_used = bits;
    return cp;
}

ClassPolynomial class_poly_divisor(const Discriminant& disc, const InvariantKind& kind,
                                   std::optional<std::vector<int>> phi0, DivisorTranscript* transcript) {
    std::vector<int> eps = phi0 ? *phi0 : std::vector<int>(disc.t(), 1);
    std::vector<QuadForm> forms = coset_forms(disc, kind, eps);
    check_internal(!forms.empty(), "class_poly_divisor: empty genus");
    const size_t deg = forms.size();
    const long max_bits = max_precision_bits();

    Real T0 = bound_T0_heuristic(disc, kind);
    int escalations = 0;
    long extra = 0;
    for (;;) {
        RecoveryPlan plan = make_plan(disc, T0);
        long bits = plan.float_bits + static_cast<long>(deg) + 32 + extra;
        if (bits > max_bits) throw PrecisionExhausted("class_poly_divisor: precision ceiling reached");
        PrecisionBudget pb{bits, 64};
        auto roots = evaluate_theta(kind, forms, disc.D, pb);
        auto poly = expand_product(roots, pb.working());

        std::vector<GFElem> coeffs(deg + 1);
        bool failed = false;
        const long n = static_cast<long>(deg);
        std::exception_ptr hard;
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < n; ++k) {
            try {
                const Complex& c = poly[k];
                Complex gr(c.re * 2L, Real(c.prec()));
                Complex gi(Real(c.prec()), c.im * 2L);
                auto b = recover_coords(gr, plan, Side::REAL);
                auto bp = recover_coords(gi, plan, Side::IMAG);
                GFElem z(plan.basis.field);
                for (unsigned mu = 0; mu < plan.basis.m(); ++mu) {
                    z += plan.basis.beta[mu] * mpq_class(b[mu]);
                    z += plan.basis.beta_star[mu] * mpq_class(bp[mu]);
                }
                z *= mpq_class(1, 2);
                // the value must match and every conjugate must respect T0
                Complex diff = z.eval(pb.working()) - c;
                bool good = abs(diff) < plan.epsilon * 4L;
                for (unsigned lam = 0; good && lam < (1u << disc.t()); ++lam)
                    good = abs(z.eval(pb.working(), lam)) <= T0;
#pragma omp critical(cmforge_divisor)
                {
                    if (good) coeffs[k] = z;
                    else failed = true;
                }
            } catch (const PrecisionEscalation&) {
#pragma omp critical(cmforge_divisor)
                failed = true;
            } catch (...) {
#pragma omp critical(cmforge_divisor)
                if (!hard) hard = std::current_exception();
            }
        }
        if (hard) std::rethrow_exception(hard);
        if (!failed) {
            coeffs[deg] = GFElem(plan.basis.field, 1);
            ClassPolynomial cp;
            cp.disc = disc;
            cp.kind = kind;
            cp.phi0 = eps;
            cp.gf_coeffs = std::move(coeffs);
            if (transcript) {
                transcript->T0 = T0;
                transcript->N0_real = plan.real.N0;
                transcript->N0_imag = plan.imag.N0;
                transcript->epsilon = plan.epsilon;
                transcript->float_bits = bits;
                transcript->escalations = escalations;
            }
            return cp;
        }
        // more working precision, and a larger bound in case the heuristic was short
        ++escalations;
        extra = extra ? extra * 2 : bits;
        T0 = T0 * Real(65536L, T0.prec());
    }
}

std::vector<GFElem> gf_poly_mul(const std::vector<GFElem>& a, const std::vector<GFElem>& b) {
    std::vector<GFElem> out(a.size() + b.size() - 1, GFElem(a[0].field()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

bool coset_product_check(const Discriminant& disc, const InvariantKind& kind) {
    ClassPolynomial full = class_poly_full(disc, kind);
    std::vector<GFElem> prod;
    for (const auto& eps : phi_image(disc)) {
        ClassPolynomial part = class_poly_divisor(disc, kind, eps);
        prod = prod.empty() ? part.gf_coeffs : gf_poly_mul(prod, part.gf_coeffs);
    }
    if (prod.size() != full.int_coeffs.size()) return false;
    for (size_t k = 0; k < prod.size(); ++k) {
        if (!prod[k].is_rational()) return false;
        const mpq_class& v = prod[k][0];
        if (v.get_den() != 1 || v.get_num() != full.int_coeffs[k]) return false;
    }
    return true;
}

}  // namespace cmforge
