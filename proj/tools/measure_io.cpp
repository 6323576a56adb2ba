#include "measure_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freeconv/errors.hpp"

namespace freeconv::io {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
    fail(ErrorCode::SchemaError, path + ": " + msg);
}

double number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) schema(path + "." + key, "missing");
    const json& v = j.at(key);
    if (!v.is_number()) schema(path + "." + key, "expected a number");
    return v.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) schema(path + "." + key, "missing");
    const json& v = j.at(key);
    if (!v.is_array()) schema(path + "." + key, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) schema(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

Shape parse_shape(const json& c, const std::string& path) {
    if (!c.contains("family") || !c.at("family").is_string()) schema(path + ".family", "missing or not a string");
    const std::string fam = c.at("family").get<std::string>();
    if (fam == "semicircle") return Semicircle{number(c, "center", path), number(c, "variance", path)};
    if (fam == "marchenko_pastur") return MarchenkoPastur{number(c, "rate", path), number(c, "jump", path)};
    if (fam == "cauchy") return CauchyLaw{number(c, "location", path), number(c, "scale", path)};
    if (fam == "arcsine") return Arcsine{number(c, "left", path), number(c, "right", path)};
    if (fam == "tabulated") return Tabulated{numbers(c, "grid", path), numbers(c, "density", path)};
    schema(path + ".family", "unknown family '" + fam + "'");
}

}  // namespace

Measure parse_measure(const json& doc) {
    if (!doc.is_object()) schema("$", "expected an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "atoms" && it.key() != "ac") schema("$." + it.key(), "unknown key");
    MeasureSpec spec;
    if (doc.contains("atoms")) {
        const json& a = doc.at("atoms");
        if (!a.is_array()) schema("$.atoms", "expected an array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string p = "$.atoms[" + std::to_string(i) + "]";
            if (!a[i].is_object()) schema(p, "expected an object");
            spec.atoms.push_back({number(a[i], "pos", p), number(a[i], "mass", p)});
        }
    }
    if (doc.contains("ac")) {
        const json& a = doc.at("ac");
        if (!a.is_array()) schema("$.ac", "expected an array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string p = "$.ac[" + std::to_string(i) + "]";
            if (!a[i].is_object()) schema(p, "expected an object");
            spec.ac.push_back({number(a[i], "weight", p), parse_shape(a[i], p)});
        }
    }
    return build_measure(spec);
}

Measure parse_measure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::SchemaError, "cannot open measure file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaError, "$: " + std::string(e.what()));
    }
    return parse_measure(doc);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_density_csv(const std::string& path, const DensityTable& t) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidParameter, "cannot write '" + path + "'");
    out << "x,density\n";
    for (std::size_t i = 0; i < t.size(); ++i) out << format_double(t.x[i]) << ',' << format_double(t.density[i]) << '\n';
}

json atoms_json(const std::vector<AtomRecord>& atoms) {
    json a = json::array();
    for (const auto& r : atoms)
        a.push_back({{"position", r.position},
                     {"mass", r.mass},
                     {"preimage", r.preimage},
                     {"certificate",
                      {{"boundary_F", r.certificate.boundary_F},
                       {"f_mu", r.certificate.f_mu},
                       {"jc_derivative", r.certificate.jc_derivative},
                       {"regime", regime_name(r.certificate.regime)}}}});
    return a;
}

json result_json(const SpectralResult& r) {
    json j;
    json params = {{"operation", r.params.operation}};
    if (r.params.p) params["p"] = *r.params.p;
    if (r.params.q) params["q"] = *r.params.q;
    if (r.params.t) params["t"] = *r.params.t;
    if (r.params.lambda) params["lambda"] = *r.params.lambda;
    j["params"] = params;
    j["x"] = r.density.x;
    j["density"] = r.density.density;
    json s = json::array();
    for (const auto& i : r.density.support) s.push_back({i.left, i.right});
    j["support"] = s;
    j["atoms"] = atoms_json(r.atoms);
    j["diagnostics"] = {{"max_residual", r.diagnostics.max_residual},
                        {"stieltjes_unconverged", r.diagnostics.stieltjes_unconverged},
                        {"total_mass", r.total_mass()}};
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::InvalidParameter, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

std::string atoms_path(const std::string& density_path) {
    std::string stem = density_path;
    auto slash = stem.find_last_of('/');
    auto dot = stem.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) stem.erase(dot);
    return stem + ".atoms.json";
}

double parse_number(const std::string& s, long long* num, long long* den) {
    auto bad = [&]() -> double { fail(ErrorCode::InvalidParameter, "cannot parse number '" + s + "'"); };
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        long long a = 0, b = 0;
        const char* p0 = s.data();
        auto r1 = std::from_chars(p0, p0 + slash, a);
        auto r2 = std::from_chars(p0 + slash + 1, p0 + s.size(), b);
        if (r1.ec != std::errc() || r1.ptr != p0 + slash || r2.ec != std::errc() || r2.ptr != p0 + s.size() || b == 0)
            return bad();
        if (b < 0) a = -a, b = -b;
        if (num) *num = a;
        if (den) *den = b;
        return static_cast<double>(a) / static_cast<double>(b);
    }
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        return bad();
    }
    if (used != s.size() || !std::isfinite(v)) return bad();
    long long iv = static_cast<long long>(v);
    if (static_cast<double>(iv) == v && std::abs(v) < 1e15) {
        if (num) *num = iv;
        if (den) *den = 1;
    } else {
        if (den) *den = 0;  // not exact
    }
    return v;
}

}  // namespace freeconv::io
