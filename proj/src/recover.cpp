#include "cmforge/recover.hpp"

#include "cmforge/errors.hpp"
#include "cmforge/forms.hpp"

#include <algorithm>

namespace cmforge {

std::map<std::vector<int>, mpq_class> genus_inverse_sums(const Discriminant& disc) {
    std::map<std::vector<int>, mpq_class> sums;
    for (const QuadForm& f : enumerate_reduced(disc)) {
        mpq_class inv(1, f.A);
        inv.canonicalize();
        sums[phi_class(f, disc)] += inv;
    }
    return sums;
}

Real bound_T0_heuristic(const Discriminant& disc, const InvariantKind& kind, mpfr_prec_t prec) {
    mpq_class best = 0;
    for (const auto& [eps, s] : genus_inverse_sums(disc)) best = std::max(best, s);
    Real lnT = real_pi(prec) * sqrt(Real(-disc.D, prec)) * Real(mpq_class(best * kind.height_ratio()), prec);
    return exp(lnT) * Real(256L, prec);
}

Real bound_T0_rigorous(long D, mpfr_prec_t prec) {
    const Real c1 = sqrt(Real(3L, prec)) * real_pi(prec);
    const Real c2(mpq_class(18587, 1000), prec), c3(mpq_class(17442, 1000), prec), c4(mpq_class(11594, 1000), prec);
    Real N = sqrt(Real(mpq_class(std::labs(D), 3), prec));
    Real lN = log(N);
    return exp(c1 * N * lN * lN + c2 * N * lN + c3 * N + c1 * lN + c4);
}

std::vector<GFElem> default_X(const Discriminant& disc, const FieldPtr& field) {
    const unsigned m = 1u << (disc.t() - 1);
    std::vector<GFElem> X{GFElem(field, 1)};
    for (unsigned eta = 1; eta < m; ++eta) X.push_back(delta_g(disc, field, eta).g);
    return X;
}

namespace {

constexpr mpfr_prec_t kPlanPrec = 256;

SidePlan build_side(const Discriminant& disc, const GenusBasis& basis, MPairVariant variant, const Real& T0) {
    SidePlan sp;
    const unsigned m = basis.m();
    const mpfr_prec_t P = kPlanPrec;
    sp.mp = build_mpair(basis, variant);
    sp.base = variant == MPairVariant::REAL_PART ? basis.beta[0] : basis.beta_star[0];
    std::vector<GFElem> X = default_X(disc, basis.field);
    sp.sc = structure_constants(sp.mp, X);

    Real minbase = abs(sp.base.eval(P, 0));
    for (unsigned l = 1; l < m; ++l) {
        Real v = abs(sp.base.eval(P, l));
        if (v < minbase) minbase = v;
    }
    sp.T0prime = T0 * 2L / minbase;

    Real Delta(1L, P);
    Real sd = sqrt(Real(std::labs(disc.d), P));
    for (unsigned i = 0; i < m; ++i) Delta *= sd;

    std::vector<Real> mv;
    for (unsigned l = 0; l < m; ++l) mv.push_back(sp.mp.mvals[l].eval(P).re);
    Real MId = abs(mv[0]);

    sp.Zreq = Real(1L, P);
    if (m > 1) {
        for (unsigned eta = 0; eta < m; ++eta) {
            Real s(0L, P);
            for (unsigned l = 1; l < m; ++l) s += abs(mv[l] * X[eta].eval(P, l).re);
            Real base = s * Delta * sp.T0prime * 4L;
            Real req(1L, P);
            for (unsigned k = 0; k + 1 < m; ++k) req *= base;
            if (req > sp.Zreq) sp.Zreq = req;
        }
    }
    Real C(0L, P);
    for (unsigned l = 1; l < m; ++l) C += abs(mv[l]);
    sp.N0 = floor_to_mpz(sp.Zreq * MId + C * Delta) + 2;

    CTensor c = c_tensor(disc, sp.mp);
    sp.run = run_approx(disc, sp.mp, c, sp.N0);
    sp.Z = sp.run.Z.eval(P + static_cast<mpfr_prec_t>(mpz_sizeinbase(sp.N0.get_mpz_t(), 2))).re;
    check_internal(m == 1 || sp.Z > sp.Zreq, "make_plan: achieved Z below the required threshold");

    Real babs = abs(sp.base.eval(P));
    sp.epsilon = Real(-1L, P);
    for (unsigned eta = 0; eta < m; ++eta) {
        Real e = babs / (MId * abs(X[eta].eval(P).re) * sp.Z * 4L);
        if (sp.epsilon.sign() < 0 || e < sp.epsilon) sp.epsilon = e;
    }

    GFElem binv = sp.base.inverse();
    for (unsigned eta = 0; eta < m; ++eta)
        sp.K.push_back(sp.mp.mvals[0] * sp.run.Z * X[eta] * binv);
    sp.M.assign(m, std::vector<mpz_class>(m));
    for (unsigned eta = 0; eta < m; ++eta)
        for (unsigned xi = 0; xi < m; ++xi)
            for (unsigned mu = 0; mu < m; ++mu) sp.M[eta][xi] += sp.run.A[mu] * sp.sc.x[mu][xi][eta];
    return sp;
}

}  // namespace

RecoveryPlan make_plan(const Discriminant& disc, const Real& T0) {
    RecoveryPlan plan;
    plan.disc = disc;
    plan.basis = build_basis(disc);
    plan.T0 = T0;
    plan.real = build_side(disc, plan.basis, MPairVariant::REAL_PART, T0);
    plan.imag = build_side(disc, plan.basis, MPairVariant::IMAG_PART, T0);
    // sum b beta = 2 Re z, so the coefficient itself needs half the error
    plan.epsilon = (plan.real.epsilon < plan.imag.epsilon ? plan.real.epsilon : plan.imag.epsilon) / 2L;
    Real ratio = T0 / plan.epsilon;
    plan.float_bits = std::max(0L, ratio.exponent()) + 64;
    return plan;
}

RecoveryPlan make_plan(const Discriminant& disc, const InvariantKind& kind) {
    return make_plan(disc, bound_T0_heuristic(disc, kind));
}

std::optional<std::vector<mpz_class>> solve_integer_system(std::vector<std::vector<mpz_class>> M,
                                                           std::vector<mpz_class> r) {
    const size_t n = M.size();
    for (size_t i = 0; i < n; ++i) M[i].push_back(r[i]);
    mpz_class prev = 1;
    for (size_t k = 0; k < n; ++k) {
        size_t p = k;
        while (p < n && M[p][k] == 0) ++p;
        if (p == n) throw InternalError("solve_integer_system: singular matrix");
        std::swap(M[p], M[k]);
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j <= n; ++j) {
                mpz_class v = M[k][k] * M[i][j] - M[i][k] * M[k][j];
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                M[i][j] = v;
            }
            M[i][k] = 0;
        }
        prev = M[k][k];
    }
    std::vector<mpq_class> x(n);
    for (size_t ii = n; ii-- > 0;) {
        mpq_class acc(M[ii][n]);
        for (size_t j = ii + 1; j < n; ++j) acc -= M[ii][j] * x[j];
        x[ii] = acc / mpq_class(M[ii][ii]);
    }
    std::vector<mpz_class> out(n);
    for (size_t i = 0; i < n; ++i) {
        if (x[i].get_den() != 1) return std::nullopt;
        out[i] = x[i].get_num();
    }
    return out;
}

std::vector<mpz_class> recover_coords(const Complex& gamma, const RecoveryPlan& plan, Side side) {
    const SidePlan& sp = plan.side(side);
    const unsigned m = static_cast<unsigned>(sp.K.size());
    mpfr_prec_t prec = gamma.prec() + static_cast<mpfr_prec_t>(mpz_sizeinbase(sp.N0.get_mpz_t(), 2)) + 64;
    std::vector<mpz_class> rhs(m);
    const Real quarter(mpq_class(1, 4), 64);
    for (unsigned eta = 0; eta < m; ++eta) {
        Real v = (gamma * sp.K[eta].eval(prec)).re;
        mpz_class r = round_to_mpz(v);
        Real resid = abs(v - Real(r, prec));
        if (resid >= quarter) throw PrecisionEscalation("recover_coords: rounding residual too large");
        rhs[eta] = r;
    }
    auto b = solve_integer_system(sp.M, rhs);
    if (!b) throw PrecisionEscalation("recover_coords: non-integral solution");
    return *b;
}

}  // namespace cmforge
