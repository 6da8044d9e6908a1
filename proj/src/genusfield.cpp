#include "cmforge/genusfield.hpp"

#include "cmforge/errors.hpp"

#include <sstream>

namespace cmforge {

unsigned popcount(unsigned x) { return static_cast<unsigned>(__builtin_popcount(x)); }

unsigned GenusField::neg_mask() const {
    unsigned m = 0;
    for (int i = 0; i < t(); ++i)
        if (qstars[i] < 0) m |= 1u << i;
    return m;
}

FieldPtr make_field(const std::vector<long>& qstars) {
    auto f = std::make_shared<GenusField>();
    f->qstars = qstars;
    return f;
}

GFElem::GFElem(FieldPtr field) : field_(std::move(field)), c_(field_->dim()) {}

GFElem::GFElem(FieldPtr field, const mpq_class& r) : GFElem(std::move(field)) { c_[0] = r; }

GFElem GFElem::basis(FieldPtr field, unsigned S, const mpq_class& c) {
    GFElem e(std::move(field));
    e.c_[S] = c;
    return e;
}

void GFElem::check_same(const GFElem& o) const {
    if (field_ != o.field_ && (!field_ || !o.field_ || field_->qstars != o.field_->qstars))
        throw InvalidParameters("genus field elements over different fields");
}

GFElem& GFElem::operator+=(const GFElem& o) {
    check_same(o);
    for (unsigned S = 0; S < c_.size(); ++S) c_[S] += o.c_[S];
    return *this;
}

GFElem& GFElem::operator-=(const GFElem& o) {
    check_same(o);
    for (unsigned S = 0; S < c_.size(); ++S) c_[S] -= o.c_[S];
    return *this;
}

GFElem& GFElem::operator*=(const GFElem& o) {
    check_same(o);
    const auto& q = field_->qstars;
    std::vector<mpq_class> out(c_.size());
    for (unsigned S = 0; S < c_.size(); ++S) {
        if (c_[S] == 0) continue;
        for (unsigned T = 0; T < c_.size(); ++T) {
            if (o.c_[T] == 0) continue;
            mpz_class k = 1;
            unsigned both = S & T;
            for (int i = 0; both; ++i, both >>= 1)
                if (both & 1) k *= q[i];
            out[S ^ T] += c_[S] * o.c_[T] * k;
        }
    }
    c_ = std::move(out);
    return *this;
}

GFElem& GFElem::operator*=(const mpq_class& r) {
    for (auto& v : c_) v *= r;
    return *this;
}

GFElem GFElem::operator-() const {
    GFElem r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

bool GFElem::is_zero() const {
    for (const auto& v : c_)
        if (v != 0) return false;
    return true;
}

bool GFElem::is_rational() const {
    for (unsigned S = 1; S < c_.size(); ++S)
        if (c_[S] != 0) return false;
    return true;
}

bool GFElem::operator==(const GFElem& o) const {
    check_same(o);
    return c_ == o.c_;
}

GFElem GFElem::conj() const { return tau(field_->neg_mask()); }

GFElem GFElem::tau(unsigned lambda) const {
    GFElem r = *this;
    for (unsigned S = 0; S < c_.size(); ++S)
        if (popcount(S & lambda) % 2) r.c_[S] = -r.c_[S];
    return r;
}

GFElem GFElem::inverse() const {
    if (is_zero()) throw InvalidParameters("inverse of zero");
    GFElem y = *this;
    GFElem acc(field_, 1);
    for (int i = 0; i < field_->t(); ++i) {
        GFElem c = y.tau(1u << i);
        acc *= c;
        y *= c;
    }
    check_internal(y.is_rational(), "GFElem::inverse: norm not rational");
    mpq_class inv = 1 / y.c_[0];
    acc *= inv;
    return acc;
}

Complex GFElem::eval(mpfr_prec_t prec, unsigned tau_mask) const {
    const auto& q = field_->qstars;
    int t = field_->t();
    std::vector<Complex> e(c_.size(), Complex(prec));
    e[0] = Complex(1L, prec);
    for (int i = 0; i < t; ++i) {
        Real r = sqrt(Real(std::labs(q[i]), prec));
        if (tau_mask & (1u << i)) r = -r;
        Complex s = q[i] > 0 ? Complex(r, Real(prec)) : Complex(Real(prec), r);
        unsigned bit = 1u << i;
        for (unsigned S = 0; S < bit; ++S) e[S | bit] = e[S] * s;
    }
    Complex sum(prec);
    for (unsigned S = 0; S < c_.size(); ++S)
        if (c_[S] != 0) sum += e[S] * Real(c_[S], prec);
    return sum;
}

std::string GFElem::str() const {
    std::ostringstream os;
    bool first = true;
    for (unsigned S = 0; S < c_.size(); ++S) {
        if (c_[S] == 0) continue;
        if (first) os << c_[S].get_str();
        else os << (c_[S] < 0 ? " - " : " + ") << mpq_class(abs(c_[S])).get_str();
        first = false;
        for (int i = 0; i < field_->t(); ++i)
            if (S & (1u << i)) os << "*sqrt(" << field_->qstars[i] << ")";
    }
    if (first) os << "0";
    return os.str();
}

GFElem operator+(const GFElem& a, const GFElem& b) {
    GFElem r = a;
    r += b;
    return r;
}

GFElem operator-(const GFElem& a, const GFElem& b) {
    GFElem r = a;
    r -= b;
    return r;
}

GFElem operator*(const GFElem& a, const GFElem& b) {
    GFElem r = a;
    r *= b;
    return r;
}

GFElem operator*(const GFElem& a, const mpq_class& s) {
    GFElem r = a;
    r *= s;
    return r;
}

GFElem operator/(const GFElem& a, const GFElem& b) { return a * b.inverse(); }

std::vector<mpq_class> coordinates(const GFElem& x, const std::vector<GFElem>& basis) {
    const unsigned rows = x.dim();
    const unsigned n = static_cast<unsigned>(basis.size());
    std::vector<std::vector<mpq_class>> M(rows, std::vector<mpq_class>(n + 1));
    for (unsigned r = 0; r < rows; ++r) {
        for (unsigned k = 0; k < n; ++k) M[r][k] = basis[k][r];
        M[r][n] = x[r];
    }
    std::vector<int> pivot_col;
    unsigned row = 0;
    for (unsigned col = 0; col < n && row < rows; ++col) {
        unsigned p = row;
        while (p < rows && M[p][col] == 0) ++p;
        if (p == rows) continue;
        std::swap(M[p], M[row]);
        mpq_class inv = 1 / M[row][col];
        for (unsigned k = col; k <= n; ++k) M[row][k] *= inv;
        for (unsigned r = 0; r < rows; ++r) {
            if (r == row || M[r][col] == 0) continue;
            mpq_class f = M[r][col];
            for (unsigned k = col; k <= n; ++k) M[r][k] -= f * M[row][k];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++row;
    }
    if (pivot_col.size() != n) throw InvalidParameters("coordinates: basis is linearly dependent");
    for (unsigned r = row; r < rows; ++r)
        if (M[r][n] != 0) throw InvalidParameters("coordinates: element outside the span");
    std::vector<mpq_class> out(n);
    for (unsigned r = 0; r < n; ++r) out[pivot_col[r]] = M[r][n];
    return out;
}

std::string to_string(BasisCase c) {
    switch (c) {
        case BasisCase::DEGENERATE: return "DEGENERATE";
        case BasisCase::ALL_ODD: return "ALL_ODD";
        case BasisCase::EVEN_8_POSITIVE: return "EVEN_8_POSITIVE";
        case BasisCase::EVEN_NEG_MIXED: return "EVEN_NEG_MIXED";
        case BasisCase::EVEN_NEG_ALLPOS: return "EVEN_NEG_ALLPOS";
    }
    return "?";
}

GFElem GenusBasis::sqrt_d() const { return GFElem::basis(field, field->dim() - 1); }

namespace {

struct Alphas {
    FieldPtr F;

    GFElem one() const { return GFElem(F, 1); }
    GFElem sq(int i) const { return GFElem::basis(F, 1u << i); }
    // (1 + sqrt q)/2 for odd q; sqrt(q/4) for even q
    GFElem a(int i) const {
        if (F->qstars[i] % 2 == 0) return GFElem::basis(F, 1u << i, mpq_class(1, 2));
        GFElem e(F, mpq_class(1, 2));
        e[1u << i] = mpq_class(1, 2);
        return e;
    }
    GFElem abar(int i) const {
        GFElem e(F, mpq_class(1, 2));
        e[1u << i] = mpq_class(-1, 2);
        return e;
    }
};

bool bit(unsigned s, int i) { return (s >> i) & 1u; }

}  // namespace

GenusBasis build_basis(const Discriminant& disc) {
    GenusBasis B;
    B.field = make_field(disc.qstars);
    B.u = disc.u();
    const int t = disc.t();
    const auto& q = disc.qstars;
    Alphas al{B.field};

    if (t == 1) {
        B.kind = BasisCase::DEGENERATE;
        B.beta = {al.one()};
        B.beta_star = {al.sq(0)};
        return B;
    }

    if (q[0] == 8) B.kind = BasisCase::EVEN_8_POSITIVE;
    else if (q[t - 1] == -4 || q[t - 1] == -8)
        B.kind = (B.u == t - 1) ? BasisCase::EVEN_NEG_ALLPOS : BasisCase::EVEN_NEG_MIXED;
    else B.kind = BasisCase::ALL_ODD;

    const unsigned m = 1u << (t - 1);
    const int u = B.u;
    for (unsigned s = 0; s < m; ++s) {
        GFElem beta(B.field), beta_s(B.field);
        // leading factor over the positive indices
        GFElem lead = al.one(), lead_s = al.one();
        int start = 0;
        if (B.kind == BasisCase::EVEN_8_POSITIVE) {
            GFElem sqrt2 = GFElem::basis(B.field, 1u, mpq_class(1, 2));
            if (bit(s, 0)) lead *= sqrt2; else lead_s *= sqrt2;
            start = 1;
        }
        int pos_end = (B.kind == BasisCase::EVEN_NEG_ALLPOS) ? t - 1 : u;
        for (int i = start; i < pos_end; ++i) {
            if (bit(s, i)) {
                lead *= al.abar(i);
                lead_s *= -al.abar(i);
            } else {
                lead *= al.a(i);
                lead_s *= al.a(i);
            }
        }

        if (B.kind == BasisCase::EVEN_NEG_ALLPOS) {
            beta = lead;
            beta_s = lead_s * al.sq(t - 1);
        } else {
            // middle products over the odd negative indices before the tail
            int mid_end = (B.kind == BasisCase::EVEN_NEG_MIXED) ? t - 2 : t - 1;
            GFElem p1 = al.one(), p2 = al.one(), p1s = al.one(), p2s = al.one();
            for (int i = u; i < mid_end; ++i) {
                if (bit(s, i)) {
                    p1 *= al.abar(i);
                    p2 *= al.a(i);
                    p1s *= -al.abar(i);
                    p2s *= -al.a(i);
                } else {
                    p1 *= al.a(i);
                    p2 *= al.abar(i);
                    p1s *= al.a(i);
                    p2s *= al.abar(i);
                }
            }
            if (B.kind == BasisCase::EVEN_NEG_MIXED) {
                int k = t - 2;  // odd negative q_{t-1}; q_t even
                GFElem at = al.a(t - 1);
                GFElem one = al.one();
                bool sk = bit(s, k);
                GFElem x1 = sk ? at : one, x2 = sk ? -at : one;
                GFElem y1 = sk ? one : at, y2 = sk ? one : -at;
                beta = lead * (p1 * al.a(k) * x1 + p2 * al.abar(k) * x2);
                beta_s = lead_s * (p1s * al.a(k) * y1 - p2s * al.abar(k) * y2);
            } else {
                beta = lead * (p1 * al.a(t - 1) + p2 * al.abar(t - 1));
                beta_s = lead_s * (p1s * al.a(t - 1) - p2s * al.abar(t - 1));
            }
        }
        B.beta.push_back(beta);
        B.beta_star.push_back(beta_s);
    }
    return B;
}

GFElem duality_sum(const GenusBasis& basis, unsigned eta, unsigned nu) {
    GFElem prod = basis.beta[eta] * basis.beta_star[nu];
    GFElem sum(basis.field);
    for (unsigned mu = 0; mu < basis.m(); ++mu) {
        GFElem term = prod.tau(mu);
        if (popcount(mu) % 2) sum -= term; else sum += term;
    }
    return sum;
}

GFElem mpair_duality(const MPair& mp, unsigned l, unsigned lp) {
    GFElem prod = mp.omega[l] * mp.omega_star[lp];
    GFElem sum(prod.field());
    for (unsigned mu = 0; mu < mp.mvals.size(); ++mu) sum += mp.mvals[mu] * prod.tau(mu);
    return sum;
}

MPair build_mpair(const GenusBasis& basis, MPairVariant variant) {
    MPair mp;
    mp.variant = variant;
    const unsigned m = basis.m();
    GFElem b0inv = basis.beta[0].inverse();
    GFElem bs0inv = basis.beta_star[0].inverse();
    std::vector<GFElem> w, ws;
    for (unsigned mu = 0; mu < m; ++mu) {
        w.push_back(basis.beta[mu] * b0inv);
        ws.push_back(basis.beta_star[mu] * bs0inv);
    }
    if (variant == MPairVariant::REAL_PART) {
        mp.omega = w;
        mp.omega_star = ws;
    } else {
        mp.omega = ws;
        mp.omega_star = w;
    }
    GFElem base = basis.beta[0] * basis.beta_star[0];
    GFElem inv_sqrt_d = basis.sqrt_d().inverse();
    for (unsigned mu = 0; mu < m; ++mu) {
        GFElem v = base.tau(mu) * inv_sqrt_d;
        if (popcount(mu) % 2) v = -v;
        mp.mvals.push_back(v);
    }
    GFElem one(basis.field, 1), zero(basis.field);
    for (unsigned l = 0; l < m; ++l)
        for (unsigned lp = 0; lp < m; ++lp)
            check_internal(mpair_duality(mp, l, lp) == (l == lp ? one : zero), "build_mpair: duality failed");
    return mp;
}

StructureConstants structure_constants(const MPair& mp, const std::vector<GFElem>& X) {
    const unsigned m = static_cast<unsigned>(mp.omega.size());
    if (X.size() != m) throw InvalidParameters("structure_constants: |X| must equal 2^(t-1)");
    StructureConstants sc;
    sc.X = X;
    sc.x.assign(m, std::vector<std::vector<mpz_class>>(m, std::vector<mpz_class>(m)));
    for (unsigned xi = 0; xi < m; ++xi)
        for (unsigned eta = 0; eta < m; ++eta) {
            auto coords = coordinates(mp.omega[xi] * X[eta], mp.omega);
            for (unsigned mu = 0; mu < m; ++mu) {
                if (coords[mu].get_den() != 1)
                    throw InvalidParameters("structure_constants: X is not in the integral span");
                sc.x[mu][xi][eta] = coords[mu].get_num();
            }
        }
    return sc;
}

}  // namespace cmforge
