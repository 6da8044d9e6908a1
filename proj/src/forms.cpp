#include "cmforge/forms.hpp"

#include "cmforge/errors.hpp"

#include <algorithm>
#include <tuple>

namespace cmforge {

namespace {

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

mpz_class mod_pos(const mpz_class& a, const mpz_class& n) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t());
    return r;
}

mpz_class inverse_mod(const mpz_class& a, const mpz_class& n) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), mpz_class(mod_pos(a, n)).get_mpz_t(), n.get_mpz_t()))
        throw InternalError("inverse_mod: not invertible");
    return r;
}

QuadForm translate(const QuadForm& f, const mpz_class& k) {
    return {f.A, f.B + 2 * f.A * k, f.A * k * k + f.B * k + f.C};
}

}  // namespace

bool QuadForm::is_reduced() const {
    if (abs(B) > A || A > C) return false;
    if (B < 0 && (abs(B) == A || A == C)) return false;
    return true;
}

bool QuadForm::is_primitive() const {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), C.get_mpz_t());
    return g == 1;
}

bool operator<(const QuadForm& x, const QuadForm& y) {
    return std::make_tuple(x.A, mpz_class(abs(x.B)), mpz_class(-x.B), x.C) <
           std::make_tuple(y.A, mpz_class(abs(y.B)), mpz_class(-y.B), y.C);
}

Sl2 Sl2::operator*(const Sl2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

QuadForm act(const QuadForm& f, const Sl2& m) {
    return {f.A * m.a * m.a + f.B * m.a * m.c + f.C * m.c * m.c,
            2 * f.A * m.a * m.b + f.B * (m.a * m.d + m.b * m.c) + 2 * f.C * m.c * m.d,
            f.A * m.b * m.b + f.B * m.b * m.d + f.C * m.d * m.d};
}

Reduction reduce_tracked(const QuadForm& f) {
    if (f.A <= 0 || f.disc() >= 0) throw InvalidParameters("reduce: form must be positive definite");
    QuadForm g = f;
    Sl2 total;
    const Sl2 S{0, -1, 1, 0};
    for (;;) {
        mpz_class k = floor_div(g.A - g.B, 2 * g.A);
        if (k != 0) {
            g = translate(g, k);
            total = total * Sl2{1, k, 0, 1};
        }
        if (g.A > g.C) {
            g = {g.C, -g.B, g.A};
            total = total * S;
            continue;
        }
        break;
    }
    if (g.A == g.C && g.B < 0) {
        g = {g.C, -g.B, g.A};
        total = total * S;
    }
    return {g, total};
}

QuadForm reduce(const QuadForm& f) { return reduce_tracked(f).form; }

std::vector<QuadForm> enumerate_reduced(const Discriminant& disc) {
    std::vector<QuadForm> out;
    long D = disc.D;
    for (long A = 1; 3 * A * A <= -D; ++A) {
        for (long B = -A + 1; B <= A; ++B) {
            long num = B * B - D;
            if (num % (4 * A) != 0) continue;
            long C = num / (4 * A);
            if (C < A) continue;
            if (B < 0 && C == A) continue;
            QuadForm f{A, B, C};
            if (f.is_primitive()) out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

QuadForm make_coprime(const QuadForm& f, const mpz_class& N) {
    QuadForm g = f;
    mpz_class N0 = 1;
    for (auto& [lp, e] : factor_small(N.get_si())) {
        mpz_class l = lp;
        if (g.A % l != 0) {
            // identity
        } else if ((g.A + N0 * g.B + N0 * N0 * g.C) % l != 0) {
            g = act(g, Sl2{1, 0, N0, 1});
        } else {
            // x = l x' + b y', y = N0 x' + a y' with a l - b N0 = 1
            mpz_class a = (N0 == 1) ? mpz_class(1) : inverse_mod(l, N0);
            mpz_class b = (a * l - 1) / N0;
            g = act(g, Sl2{l, b, N0, a});
            check_internal(g.A % l != 0, "make_coprime: third substitution failed");
        }
        N0 *= l;
    }
    return g;
}

NSystem n_system_with_residue(const Discriminant& disc, const mpz_class& N, const mpz_class& target) {
    NSystem sys;
    sys.N = N;
    sys.disc = disc;
    for (const QuadForm& r : enumerate_reduced(disc)) {
        QuadForm g = make_coprime(r, N);
        if (N > 1) {
            mpz_class diff = target - g.B;
            check_internal(diff % 2 == 0, "n_system: residue parity mismatch");
            mpz_class a = mod_pos(inverse_mod(g.A, N) * (diff / 2), N);
            g = translate(g, a);
        }
        // keep B in (-NA, NA]; shifts by multiples of N preserve B mod 2N
        mpz_class k = floor_div(N * g.A - g.B, 2 * N * g.A);
        g = translate(g, N * k);
        sys.forms.push_back(g);
    }
    return sys;
}

NSystem n_system(const Discriminant& disc, const mpz_class& N) {
    auto reduced = enumerate_reduced(disc);
    QuadForm first = make_coprime(reduced.front(), N);
    return n_system_with_residue(disc, N, first.B);
}

bool is_n_system(const NSystem& sys) {
    auto reduced = enumerate_reduced(sys.disc);
    if (sys.forms.size() != reduced.size()) return false;
    std::vector<QuadForm> seen;
    for (const QuadForm& f : sys.forms) {
        if (f.disc() != sys.disc.D || f.A <= 0) return false;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), f.A.get_mpz_t(), sys.N.get_mpz_t());
        if (g != 1) return false;
        if ((f.B - sys.forms.front().B) % (2 * sys.N) != 0) return false;
        seen.push_back(reduce(f));
    }
    std::sort(seen.begin(), seen.end());
    return seen == reduced;
}

Complex root_of_form(const QuadForm& f, mpfr_prec_t prec) {
    Real twoA(mpz_class(2 * f.A), prec);
    Real re = Real(mpz_class(-f.B), prec) / twoA;
    Real im = sqrt(Real(mpz_class(-f.disc()), prec)) / twoA;
    return Complex(re, im);
}

std::vector<int> phi_class(const QuadForm& f, const Discriminant& disc) {
    QuadForm g = make_coprime(f, mpz_class(-disc.D));
    std::vector<int> eps;
    for (long q : disc.qstars) eps.push_back(kronecker(mpz_class(q), g.A));
    return eps;
}

}  // namespace cmforge
