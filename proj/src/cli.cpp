#include "cmforge/cli.hpp"

#include "cmforge/approx.hpp"
#include "cmforge/classpoly.hpp"
#include "cmforge/curve.hpp"
#include "cmforge/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace cmforge {

namespace {

using Json = nlohmann::ordered_json;

std::string s(const mpz_class& v) { return v.get_str(); }

mpz_class parse_z(const std::string& text, const char* what) {
    mpz_class v;
    if (text.empty() || v.set_str(text, 10) != 0) throw InvalidParameters(std::string("not an integer: ") + what);
    return v;
}

mpz_class json_z(const Json& j, const char* key) {
    if (!j.contains(key)) throw InvalidParameters(std::string("missing field: ") + key);
    const Json& v = j.at(key);
    if (v.is_string()) return parse_z(v.get<std::string>(), key);
    if (v.is_number_integer()) return mpz_class(std::to_string(v.get<long long>()));
    throw InvalidParameters(std::string("bad field: ") + key);
}

Json params_row(long D, const mpz_class& p, const mpz_class& u, const mpz_class& v) {
    Json row;
    row["D"] = D;
    row["p"] = s(p);
    row["u"] = s(u);
    row["v"] = s(v);
    row["orders"] = Json::array({s(p + 1 - u), s(p + 1 + u)});
    return row;
}

struct Args {
    long disc = 0;
    std::string p_min = "0", p_max, bits = "64";
    std::string fixed_p;
    long disc_min = 3, disc_max = 0;

    std::string invariant = "j";
    bool genus_divisor = false, coset_check = false;

    std::string prime, order;
    bool force_full = false, transcript = false;

    std::string threshold;
    bool imag = false;

    std::string input = "-";
};

void cmd_params(const Args& a, std::ostream& out, std::uint64_t seed) {
    if (!a.fixed_p.empty()) {
        mpz_class p = parse_z(a.fixed_p, "--fixed-p");
        for (long D : discriminant_range(a.disc_min, a.disc_max)) {
            auto hit = search_fixed_p(p, {D}, [](const mpz_class&, const mpz_class&) { return true; });
            if (hit) out << params_row(D, hit->second.p, hit->second.u, hit->second.v).dump() << "\n";
        }
        return;
    }
    Discriminant disc = split_discriminant(a.disc);
    if (!a.p_max.empty()) {
        mpz_class lo = parse_z(a.p_min, "--p-min"), hi = parse_z(a.p_max, "--p-max");
        if (hi > 100000000) throw InvalidParameters("--p-max above 10^8; use --bits for random search");
        for (mpz_class p = std::max(lo, mpz_class(5)); p <= hi; ++p) {
            if (!is_prime(p) || kronecker(mpz_class(disc.D), p) != 1 || disc.f % p == 0) continue;
            auto uv = cornacchia(disc.D, 4 * p);
            if (!uv) continue;
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), uv->first.get_mpz_t(), p.get_mpz_t());
            if (g != 1) continue;
            out << params_row(disc.D, p, uv->first, uv->second).dump() << "\n";
        }
        return;
    }
    SearchOptions so;
    so.p_bits = static_cast<unsigned>(std::stoul(a.bits));
    so.seed = seed;
    auto hit = search_fixed_D(disc, [](const mpz_class&, const mpz_class&) { return true; }, so);
    if (hit) out << params_row(disc.D, hit->p, hit->u, hit->v).dump() << "\n";
}

void cmd_classpoly(const Args& a, std::ostream& out) {
    Discriminant disc = split_discriminant(a.disc);
    InvariantKind kind = parse_invariant(a.invariant, disc);
    Json j;
    j["D"] = disc.D;
    j["invariant"] = kind.name();
    if (a.coset_check) {
        j["coset_check"] = coset_product_check(disc, kind);
    } else if (a.genus_divisor) {
        DivisorTranscript tr;
        ClassPolynomial cp = class_poly_divisor(disc, kind, std::nullopt, &tr);
        j["phi0"] = *cp.phi0;
        j["field"] = disc.qstars;
        j["degree"] = cp.degree();
        Json coeffs = Json::array();
        for (const GFElem& c : cp.gf_coeffs) coeffs.push_back(c.str());
        j["coeffs"] = coeffs;
        j["N0_real"] = s(tr.N0_real);
        j["N0_imag"] = s(tr.N0_imag);
        j["float_bits"] = tr.float_bits;
        j["escalations"] = tr.escalations;
    } else {
        ClassPolynomial cp = class_poly_full(disc, kind);
        j["degree"] = cp.degree();
        Json coeffs = Json::array();
        for (const mpz_class& c : cp.int_coeffs) coeffs.push_back(s(c));
        j["coeffs"] = coeffs;
        j["poly"] = poly_to_string(cp.int_coeffs);
    }
    out << j.dump() << "\n";
}

void cmd_gencurve(const Args& a, std::ostream& out, std::uint64_t seed) {
    Discriminant disc = split_discriminant(a.disc);
    mpz_class p = parse_z(a.prime, "--prime");
    if (p <= 3 || !is_prime(p)) throw InvalidParameters("p must be a prime greater than 3");
    auto rep = cornacchia(disc.D, 4 * p);
    if (!rep) throw InvalidParameters("4p is not of the form u^2 + |D| v^2");
    mpz_class u = rep->first, v = rep->second;
    if (!a.order.empty()) {
        u = p + 1 - parse_z(a.order, "--order");
        mpz_class rest = 4 * p - u * u;
        if (rest <= 0 || rest % (-disc.D) != 0 || !is_square(rest / (-disc.D)))
            throw InvalidParameters("order " + a.order + " is not attainable with CM by D");
        v = sqrt(mpz_class(rest / (-disc.D)));
    }
    InvariantKind kind = parse_invariant(a.invariant, disc);
    GenCurveOptions opt;
    opt.seed = seed;
    opt.force_full = a.force_full;
    GenCurveResult r = gen_curve(disc.D, p, u, v, kind, opt);
    Json j;
    j["p"] = s(p);
    j["a"] = s(r.curve.a);
    j["b"] = s(r.curve.b);
    j["j"] = s(r.j);
    j["order"] = s(r.order);
    j["D"] = disc.D;
    j["u"] = s(u);
    j["v"] = s(v);
    j["invariant"] = kind.name();
    j["path"] = r.path;
    if (a.transcript) {
        Json t;
        t["root"] = s(r.root);
        t["twist_index"] = r.twist_index;
        if (r.path == "divisor") {
            t["T0"] = r.transcript.T0.str(20);
            t["N0_real"] = s(r.transcript.N0_real);
            t["N0_imag"] = s(r.transcript.N0_imag);
            t["epsilon"] = r.transcript.epsilon.str(20);
            t["float_bits"] = r.transcript.float_bits;
            t["escalations"] = r.transcript.escalations;
        } else {
            t["float_bits"] = r.full_bits;
        }
        j["transcript"] = t;
    }
    out << j.dump() << "\n";
}

void cmd_approx(const Args& a, std::ostream& out) {
    Discriminant disc = split_discriminant(a.disc);
    if (disc.f != 1) throw InvalidParameters("approx needs a fundamental discriminant");
    mpz_class N0 = parse_z(a.threshold, "--threshold");
    if (N0 < 1) throw InvalidParameters("--threshold must be positive");
    GenusBasis basis = build_basis(disc);
    MPair mp = build_mpair(basis, a.imag ? MPairVariant::IMAG_PART : MPairVariant::REAL_PART);
    CTensor c = c_tensor(disc, mp);
    const mpfr_prec_t prec = 128 + static_cast<mpfr_prec_t>(2 * mpz_sizeinbase(N0.get_mpz_t(), 2));
    std::vector<Real> ws;
    for (const GFElem& w : mp.omega_star) ws.push_back(w.eval(prec).re);
    auto observer = [&](const ApproxRun& run, unsigned lambda, const mpz_class& q) {
        const CFRegister& reg = run.registers[lambda - 1];
        Real Z(0L, prec);
        Json A = Json::array();
        for (size_t mu = 0; mu < run.A.size(); ++mu) {
            Z += ws[mu] * Real(run.A[mu], prec);
            A.push_back(s(run.A[mu]));
        }
        Json j;
        j["iteration"] = run.iterations;
        j["lambda"] = lambda;
        j["a"] = s(q);
        j["x"] = s(reg.x);
        j["y"] = s(reg.y);
        j["A"] = A;
        j["Z"] = Z.str(20);
        out << j.dump() << "\n";
    };
    ApproxOptions opt;
    opt.check_invariants = true;
    run_approx(disc, mp, c, N0, opt, observer);
}

bool j_is_class_root(long D, const mpz_class& j, const mpz_class& p) {
    Discriminant disc = split_discriminant(D);
    ClassPolynomial H = class_poly_full(disc, make_invariant(InvariantTag::J, disc));
    return fppoly::eval(reduce_divisor_mod_p(H, p), j, p) == 0;
}

void cmd_verify(const Args& a, std::ostream& out, std::uint64_t seed) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (a.input != "-") {
        file.open(a.input);
        if (!file) throw InvalidParameters("cannot open " + a.input);
        in = &file;
    }
    std::string line;
    bool any = false;
    while (std::getline(*in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        any = true;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw InvalidParameters("verify: malformed JSON");
        if (!j.contains("D") || !j.at("D").is_number_integer()) throw InvalidParameters("missing field: D");
        const long D = j.at("D").get<long>();
        const mpz_class p = json_z(j, "p"), u = json_z(j, "u"), v = json_z(j, "v"), order = json_z(j, "order");
        check_cm_parameters(D, p, u, v);
        WeierstrassCurve E{p, mod_p(json_z(j, "a"), p), mod_p(json_z(j, "b"), p)};
        mpz_class jinv = E.j_invariant();
        if (!j_is_class_root(D, jinv, p)) throw InvalidParameters("verify: j-invariant is not a CM root for D");
        Rng rng(seed);
        bool ok = p <= kNaiveCountLimit ? naive_count(E) == order
                                        : has_order(E, order, candidate_orders(D, p, u, v), rng);
        if (!ok) throw InvalidParameters("verify: order mismatch");
        Json r;
        r["p"] = s(p);
        r["order"] = s(order);
        r["status"] = "order confirmed";
        out << r.dump() << "\n";
    }
    if (!any) throw InvalidParameters("verify: no input");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CM elliptic curve construction with genus-field divisors"};
    app.require_subcommand(1);
    Args a;
    int threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--threads", threads, "worker cap (0: runtime default)");
    app.add_option("--seed", seed, "random seed");

    auto* params = app.add_subcommand("params", "CM parameters (D, p, u, v)");
    params->add_option("--disc", a.disc, "discriminant");
    params->add_option("--p-min", a.p_min);
    params->add_option("--p-max", a.p_max);
    params->add_option("--bits", a.bits, "random search size when no p range is given");
    params->add_option("--fixed-p", a.fixed_p);
    params->add_option("--disc-min", a.disc_min);
    params->add_option("--disc-max", a.disc_max);

    auto* classpoly = app.add_subcommand("classpoly", "class polynomial or its genus divisor");
    classpoly->add_option("--disc", a.disc)->required();
    classpoly->add_option("--invariant", a.invariant, "j|gamma2|weber|doubleeta:p1,p2");
    classpoly->add_flag("--genus-divisor", a.genus_divisor);
    classpoly->add_flag("--coset-check", a.coset_check);

    auto* gencurve = app.add_subcommand("gencurve", "curve with a prescribed order");
    gencurve->add_option("--disc", a.disc)->required();
    gencurve->add_option("--prime", a.prime)->required();
    gencurve->add_option("--order", a.order);
    gencurve->add_option("--invariant", a.invariant);
    gencurve->add_flag("--full", a.force_full, "skip the divisor path");
    gencurve->add_flag("--transcript", a.transcript);

    auto* approx = app.add_subcommand("approx", "trace of the simultaneous approximation run");
    approx->add_option("--disc", a.disc)->required();
    approx->add_option("--threshold", a.threshold)->required();
    approx->add_flag("--imag", a.imag, "use the imaginary-part pair");

    auto* verify = app.add_subcommand("verify", "recount orders of curve JSON lines");
    verify->add_option("--input", a.input, "file, or - for stdin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (threads > 0) omp_set_num_threads(threads);
        if (*params) cmd_params(a, out, seed);
        else if (*classpoly) cmd_classpoly(a, out);
        else if (*gencurve) cmd_gencurve(a, out, seed);
        else if (*approx) cmd_approx(a, out);
        else if (*verify) cmd_verify(a, out, seed);
        return 0;
    } catch (const InvalidParameters& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionExhausted& e) {
        err << "precision exhausted: " << e.what() << "\n";
        return 3;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace cmforge
