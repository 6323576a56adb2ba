#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freeconv/convolution.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/oracle.hpp"
#include "freeconv/regularity.hpp"
#include "measure_io.hpp"

using namespace freeconv;
using nlohmann::json;

namespace {

struct Config {
    std::string measure;
    std::string out;
    std::string format = "csv";
    std::string p = "1", q = "1", t = "0", lambda = "1";
    std::vector<std::string> p_list;
    std::vector<double> window;
    std::vector<double> z;
    std::size_t grid_n = 2001;
    int orders = 6;
    double rel_tol = 1e-4;
    bool allow_sub_one = false;
    bool infdiv = false;
    std::size_t samples = 1000;
    std::uint64_t seed = 20240601;
};

[[noreturn]] void invalid(const std::string& msg) { fail(ErrorCode::InvalidParameter, msg); }

OpOptions options(const Config& c) {
    OpOptions o;
    o.grid_n = c.grid_n;
    if (!c.window.empty()) {
        if (!(c.window[1] > c.window[0])) invalid("--window needs lo < hi");
        o.window = Interval{c.window[0], c.window[1]};
    }
    if (c.grid_n < 2) invalid("--grid-n must be at least 2");
    return o;
}

BpqParams params_of(const std::string& ps, const std::string& qs) {
    long long pn = 0, pd = 0, qn = 0, qd = 0;
    double p = io::parse_number(ps, &pn, &pd), q = io::parse_number(qs, &qn, &qd);
    if (!(q > 0.0)) invalid("q must be > 0");
    if (pd > 0 && qd > 0 && pn > 0 && qn > 0) return BpqParams::rational(pn, pd, qn, qd);
    return BpqParams(p, q);
}

void emit(const Config& c, const SpectralResult& r) {
    if (c.out.empty()) {
        std::cout << io::result_json(r).dump(2) << '\n';
        return;
    }
    if (c.format == "json") {
        io::write_json(c.out, io::result_json(r));
        return;
    }
    io::write_density_csv(c.out, r.density);
    io::write_json(io::atoms_path(c.out), io::atoms_json(r.atoms));
}

void emit_json(const Config& c, const json& j) {
    if (c.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        io::write_json(c.out, j);
}

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

int run_transform(const Config& c) {
    Measure mu = io::parse_measure_file(c.measure);
    if (c.z.size() != 2) invalid("transform needs --z RE IM");
    cplx z(c.z[0], c.z[1]);
    json j = {{"z", cplx_json(z)}, {"G", cplx_json(eval_G(mu, z))}};
    j["F"] = cplx_json(eval_F(mu, z));
    j["E"] = cplx_json(eval_E(mu, z));
    emit_json(c, j);
    return 0;
}

int run_power(const Config& c) {
    Measure mu = io::parse_measure_file(c.measure);
    double p = io::parse_number(c.p);
    OpOptions o = options(c);
    if (p >= 1.0) {
        emit(c, free_power(mu, p, o));
    } else if (c.allow_sub_one && p > 0.0) {
        emit(c, free_power_sub_one(mu, p, o));
    } else {
        invalid("power needs p >= 1 (or p in (0,1) with --allow-sub-one)");
    }
    return 0;
}

int run_bpq(const Config& c) {
    Measure mu = io::parse_measure_file(c.measure);
    BpqParams b = params_of(c.p, c.q);
    if (!(b.p >= 1.0)) invalid("bpq needs p >= 1");
    OpOptions o = options(c);
    emit(c, bpq(mu, b, o));
    return 0;
}

int run_brownian(const Config& c) {
    Measure nu = io::parse_measure_file(c.measure);
    double t = io::parse_number(c.t);
    if (!(t >= 0.0)) invalid("t must be >= 0");
    OpOptions o = options(c);
    emit(c, t == 0.0 ? boolean_power(nu, 1.0, o) : free_brownian(nu, t, o));
    return 0;
}

int run_poisson(const Config& c) {
    Measure nu = io::parse_measure_file(c.measure);
    double lambda = io::parse_number(c.lambda);
    if (!(lambda > 0.0)) invalid("lambda must be > 0");
    emit(c, compound_free_poisson(lambda, nu, options(c)));
    return 0;
}

int run_atoms(const Config& c) {
    Measure mu = io::parse_measure_file(c.measure);
    BpqParams b = params_of(c.p, c.q);
    if (!(b.p >= 1.0)) invalid("atoms needs p >= 1");
    ReciprocalTransform F = reciprocal(mu);
    Interval w;
    if (!c.window.empty())
        w = {c.window[0], c.window[1]};
    else
        w = b.p == 1.0 ? boolean_reciprocal(F, b.q).support_hint() : default_x_window(F, b.p);
    AtomScan s = scan_atoms(F, b.p, b.q, w);
    json cands = json::array();
    for (const auto& k : s.candidates)
        cands.push_back({{"preimage", k.preimage},
                         {"position", std::isfinite(k.position) ? json(k.position) : json(nullptr)},
                         {"f_mu", k.f_mu_infinite ? json("inf") : json(k.f_mu)},
                         {"accepted", k.accepted},
                         {"reason", k.reason}});
    emit_json(c, {{"atoms", io::atoms_json(s.atoms)}, {"candidates", cands}});
    return 0;
}

int run_support(const Config& c) {
    Measure mu = io::parse_measure_file(c.measure);
    std::vector<double> ps;
    for (const auto& s : c.p_list.empty() ? std::vector<std::string>{c.p} : c.p_list) ps.push_back(io::parse_number(s));
    for (double p : ps)
        if (!(p > 1.0)) invalid("support needs p > 1");
    std::optional<Interval> w;
    if (!c.window.empty()) w = Interval{c.window[0], c.window[1]};
    ComponentReport rep = monotonicity_report(mu, ps, w);
    json rows = json::array();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        json iv = json::array();
        for (const auto& v : rep.intervals[i])
            iv.push_back({{"left", v.left}, {"right", v.right}, {"below_resolution", v.below_resolution}});
        rows.push_back({{"p", ps[i]}, {"count", rep.counts[i]}, {"intervals", iv}});
    }
    emit_json(c, {{"components", rows}, {"non_increasing", true}});
    return 0;
}

int run_verify(const Config& c) {
    Measure mu = io::parse_measure_file(c.measure);
    BpqParams b = params_of(c.p, c.q);
    if (!(b.p >= 1.0)) invalid("verify needs p >= 1");
    if (c.orders < 0 || c.orders > kMaxMomentOrder) invalid("--orders must be in [0, 12]");
    SpectralResult r = bpq(mu, b, options(c));
    MomentVector pred = predict_moments_bpq(mu, b.p, b.q, c.orders);
    MomentComparison cmp = compare(r, pred, c.orders, c.rel_tol);
    json j = {{"p", b.p},
              {"q", b.q},
              {"orders", c.orders},
              {"rel_tol", c.rel_tol},
              {"computed", cmp.computed},
              {"predicted", cmp.predicted},
              {"deviation", cmp.deviation},
              {"total_mass", r.total_mass()},
              {"pass", cmp.pass}};
    if (c.infdiv) {
        InfdivReport rep = infdiv_diagnostics(mu, b, c.samples, c.seed);
        json checks = json::array();
        for (const auto& k : rep.checks)
            checks.push_back({{"name", k.name}, {"pairs", k.pairs}, {"worst_slack", k.worst_slack}});
        j["infdiv"] = {{"passed", rep.passed}, {"checks", checks}};
    }
    emit_json(c, j);
    if (!cmp.pass) {
        std::cerr << json{{"error", "DiagnosticFailure"}, {"message", "moment deviation above tolerance"}}.dump() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free and Boolean convolution powers of probability measures"};
    app.require_subcommand(1);
    Config c;

    auto add_common = [&](CLI::App* s, bool window) {
        s->add_option("--measure", c.measure, "measure JSON file")->required();
        s->add_option("--out", c.out, "output file (stdout JSON if omitted)");
        if (window) {
            s->add_option("--window", c.window, "output window lo hi")->expected(2);
            s->add_option("--grid-n", c.grid_n, "density samples");
            s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        }
    };

    auto* transform = app.add_subcommand("transform", "evaluate G, F and E at a point");
    add_common(transform, false);
    transform->add_option("--z", c.z, "RE IM")->expected(2)->required();

    auto* power = app.add_subcommand("power", "free convolution power");
    add_common(power, true);
    power->add_option("--p", c.p, "power (decimal or a/b)")->required();
    power->add_flag("--allow-sub-one", c.allow_sub_one, "permit 0 < p < 1");

    auto* bpqc = app.add_subcommand("bpq", "(mu^{boxplus p})^{uplus q}");
    add_common(bpqc, true);
    bpqc->add_option("--p", c.p)->required();
    bpqc->add_option("--q", c.q)->required();

    auto* brown = app.add_subcommand("brownian", "free Brownian motion nu boxplus gamma_t");
    add_common(brown, true);
    brown->add_option("--t", c.t)->required();

    auto* pois = app.add_subcommand("poisson", "compound free Poisson law with jump law given by --measure");
    add_common(pois, true);
    pois->add_option("--lambda", c.lambda)->required();

    auto* atoms = app.add_subcommand("atoms", "atom scan with certificates");
    add_common(atoms, false);
    atoms->add_option("--p", c.p);
    atoms->add_option("--q", c.q);
    atoms->add_option("--window", c.window, "scan window lo hi")->expected(2);

    auto* support = app.add_subcommand("support", "support components for each p");
    add_common(support, false);
    support->add_option("--p", c.p_list, "one or more p > 1")->required();
    support->add_option("--window", c.window, "x window lo hi")->expected(2);

    auto* verify = app.add_subcommand("verify", "compare output moments with the cumulant oracle");
    add_common(verify, true);
    verify->add_option("--p", c.p);
    verify->add_option("--q", c.q);
    verify->add_option("--orders", c.orders);
    verify->add_option("--rel-tol", c.rel_tol);
    verify->add_flag("--infdiv", c.infdiv, "also run the infinite-divisibility diagnostics");
    verify->add_option("--samples", c.samples);
    verify->add_option("--seed", c.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*transform) return run_transform(c);
        if (*power) return run_power(c);
        if (*bpqc) return run_bpq(c);
        if (*brown) return run_brownian(c);
        if (*pois) return run_poisson(c);
        if (*atoms) return run_atoms(c);
        if (*support) return run_support(c);
        if (*verify) return run_verify(c);
    } catch (const Error& e) {
        std::cerr << json{{"error", std::string(error_name(e.code()))}, {"message", e.what()}}.dump() << '\n';
        return is_numerical_failure(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
        return 3;
    }
    return 2;
}
