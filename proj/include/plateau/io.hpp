#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plateau/core.hpp"
#include "plateau/family.hpp"
#include "plateau/geometry.hpp"
#include "plateau/green.hpp"
#include "plateau/polynomial.hpp"

namespace plateau::io {

using json = nlohmann::json;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot write " + p.string());
    out << text;
    if (!out) fail(ErrorKind::IoError, "write failed for " + p.string());
}

/// Parses JSON text, reporting syntax errors as "name:line:column: message".
inline json parse_json(const std::string& text, const std::string& name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const size_t pos = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
        int line = 1, col = 1;
        for (size_t k = 0; k < pos; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (const auto col = msg.find("column"); col != std::string::npos) {
            if (const auto colon = msg.find(": ", col); colon != std::string::npos) msg = msg.substr(colon + 2);
        }
        fail(ErrorKind::ParseError, name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

inline json load_json(const std::filesystem::path& p) { return parse_json(read_file(p), p.string()); }

namespace detail {

[[noreturn]] inline void schema(const std::string& where, const std::string& what) {
    fail(ErrorKind::ParseError, where + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema(where, std::string("missing field \"") + key + "\"");
    return j.at(key);
}

inline double number(const json& j, const std::string& where) {
    if (!j.is_number()) schema(where, "expected a number");
    return j.get<double>();
}

inline int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) schema(where, "expected an integer");
    return j.get<int>();
}

inline cplx complex_value(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    schema(where, "expected a number or [re, im]");
}

/// [re, im] for a constant, or {"t_poly": [c0, c1, ...]} with real or [re, im] entries.
inline std::vector<cplx> t_poly(const json& j, const std::string& where) {
    if (j.is_object()) {
        const auto& tp = field(j, "t_poly", where);
        if (!tp.is_array() || tp.empty()) schema(where, "t_poly must be a non-empty array");
        std::vector<cplx> out;
        for (size_t k = 0; k < tp.size(); ++k) out.push_back(complex_value(tp[k], where + ".t_poly[" + std::to_string(k) + "]"));
        return out;
    }
    return {complex_value(j, where)};
}

/// Frequency keys: integers, decimals ("0.5") or fractions ("1/2").
inline double frequency(const std::string& key, const std::string& where) {
    try {
        size_t used = 0;
        if (const auto slash = key.find('/'); slash != std::string::npos) {
            const double num = std::stod(key.substr(0, slash), &used);
            if (used != slash) throw std::invalid_argument(key);
            const std::string den = key.substr(slash + 1);
            const double d = std::stod(den, &used);
            if (used != den.size() || d == 0.0) throw std::invalid_argument(key);
            return num / d;
        }
        const double v = std::stod(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::logic_error&) {
        schema(where, "bad frequency key \"" + key + "\"");
    }
}

inline CoordSeries series(const json& j, const std::string& where) {
    CoordSeries s;
    const auto& coeffs = field(j, "coeffs", where);
    if (!coeffs.is_object()) schema(where, "coeffs must be an object keyed by frequency");
    for (const auto& [key, val] : coeffs.items())
        s.terms.push_back({frequency(key, where), t_poly(val, where + ".coeffs[\"" + key + "\"]")});
    std::sort(s.terms.begin(), s.terms.end(), [](const auto& a, const auto& b) { return a.freq < b.freq; });
    return s;
}

inline CurveSpec curve_spec(const json& j, const std::string& where) {
    CurveSpec c;
    c.cover = j.contains("cover") ? integer(j["cover"], where + ".cover") : 1;
    c.orientation = j.contains("orientation") ? integer(j["orientation"], where + ".orientation") : 1;
    c.z1 = series(field(j, "z1", where), where + ".z1");
    c.z2 = series(field(j, "z2", where), where + ".z2");
    return c;
}

}  // namespace detail

/// Curve family from the JSON input format. Explicit per-t curves take
/// precedence over templates at the same grid value.
inline CurveFamily parse_family(const json& j, int quadratureN = 0) {
    using namespace detail;
    const std::string where = "family";
    if (!j.is_object()) schema(where, "top level must be an object");
    if (j.contains("n") && integer(j["n"], "n") != 1) schema("n", "only one-parameter families are supported");
    CurveFamily fam;
    fam.quadratureN = quadratureN > 0 ? quadratureN
                                      : (j.contains("quadratureN") ? integer(j["quadratureN"], "quadratureN") : 256);
    const auto& tg = field(j, "tGrid", where);
    if (!tg.is_array() || tg.empty()) schema("tGrid", "expected a non-empty array");
    for (size_t k = 0; k < tg.size(); ++k) fam.tGrid.push_back(number(tg[k], "tGrid[" + std::to_string(k) + "]"));
    const int nt = fam.size();
    fam.slices.resize(nt);
    fam.transverse.assign(nt, true);
    std::vector<bool> explicitSlice(nt, false);

    auto slot = [&](double t, const std::string& w) {
        for (int s = 0; s < nt; ++s)
            if (std::abs(fam.tGrid[s] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
        schema(w, "t = " + fmt(t) + " is not on the tGrid");
    };
    try {
        if (j.contains("curves")) {
            const auto& cs = j["curves"];
            if (!cs.is_array()) schema("curves", "expected an array");
            for (size_t k = 0; k < cs.size(); ++k) {
                const std::string w = "curves[" + std::to_string(k) + "]";
                const double t = number(field(cs[k], "t", w), w + ".t");
                const int s = slot(t, w);
                fam.slices[s].push_back(sample_curve(curve_spec(cs[k], w), fam.quadratureN, fam.tGrid[s]));
                explicitSlice[s] = true;
            }
        }
        if (j.contains("templates")) {
            const auto& ts = j["templates"];
            if (!ts.is_array()) schema("templates", "expected an array");
            for (size_t k = 0; k < ts.size(); ++k) {
                const std::string w = "templates[" + std::to_string(k) + "]";
                CurveTemplate tpl;
                tpl.spec = curve_spec(ts[k], w);
                if (ts[k].contains("tRange")) {
                    const auto& r = ts[k]["tRange"];
                    if (!r.is_array() || r.size() != 2) schema(w + ".tRange", "expected [tmin, tmax]");
                    tpl.tmin = number(r[0], w + ".tRange[0]");
                    tpl.tmax = number(r[1], w + ".tRange[1]");
                }
                fam.templates.push_back(tpl);
            }
            for (int s = 0; s < nt; ++s) {
                if (explicitSlice[s]) continue;
                for (const auto& tpl : fam.templates)
                    if (tpl.covers(fam.tGrid[s]))
                        fam.slices[s].push_back(sample_curve(tpl.spec, fam.quadratureN, fam.tGrid[s]));
            }
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) throw;
        fail(ErrorKind::ParseError, std::string("invalid curve: ") + e.what());
    }
    if (j.contains("transverse")) {
        const auto& tr = j["transverse"];
        if (!tr.is_array() || static_cast<int>(tr.size()) != nt) schema("transverse", "expected one boolean per t");
        for (int s = 0; s < nt; ++s) {
            if (!tr[s].is_boolean()) schema("transverse", "expected booleans");
            fam.transverse[s] = tr[s].get<bool>();
        }
    }
    try {
        fam.validate();
    } catch (const Error& e) {
        fail(ErrorKind::ParseError, e.what());
    }
    return fam;
}

/// {"d1": ..., "d2": ..., "coeffs": [{"i": a, "j": b, "t_poly": [...]}]}
inline DefiningFunction parse_defining_function(const json& j) {
    using namespace detail;
    const int d1 = integer(field(j, "d1", "F"), "F.d1"), d2 = integer(field(j, "d2", "F"), "F.d2");
    if (d1 < 0 || d2 < 0 || d1 > 64 || d2 > 64) schema("F", "degrees must lie in [0, 64]");
    DefiningFunction F(d1, d2);
    const auto& cs = field(j, "coeffs", "F");
    if (!cs.is_array()) schema("F.coeffs", "expected an array");
    for (size_t k = 0; k < cs.size(); ++k) {
        const std::string w = "F.coeffs[" + std::to_string(k) + "]";
        const int a = integer(field(cs[k], "i", w), w + ".i"), b = integer(field(cs[k], "j", w), w + ".j");
        if (a < 0 || a > d1 || b < 0 || b > d2) schema(w, "monomial exponent outside the declared degrees");
        F.tpoly(a, b) = t_poly(cs[k], w);
    }
    return F;
}

inline json to_json(const DefiningFunction& F) {
    json j;
    j["d1"] = F.d1();
    j["d2"] = F.d2();
    j["coeffs"] = json::array();
    for (int a = 0; a <= F.d1(); ++a)
        for (int b = 0; b <= F.d2(); ++b) {
            const auto& tp = F.tpoly(a, b);
            if (tp.empty()) continue;
            json c = json::array();
            for (auto v : tp) c.push_back({v.real(), v.imag()});
            j["coeffs"].push_back({{"i", a}, {"j", b}, {"t_poly", c}});
        }
    return j;
}

/// Pipeline configuration; every field has a default and may be overridden
/// by a JSON config file and then by command-line flags.
struct RunConfig {
    int quadratureN = 256;
    std::optional<GridSpec> grid;
    int nx = 64;
    int ny = 64;
    int kMax = 0;
    double momentTol = 1e-6;
    double newtonTol = 1e-6;
    double stokesTol = 1e-6;
    double dbarTol = 1e-3;
    double greenTol = 5e-2;
    double harmonicTol = 1e-3;
    double extensionTol = 1e-3;
    double jumpTol = 5e-3;
    double discTol = 1e-8;
    double massSlack = 0.1;
    double collarFactor = 1.1;
    int greenNodes = 10000;
    std::string outputDir;
    std::vector<std::string> stages;

    void validate() const {
        if (quadratureN < 16 || quadratureN > (1 << 16) || (quadratureN & (quadratureN - 1)))
            fail(ErrorKind::InvalidSpec, "quadratureN must be a power of two in [16, 65536]");
        if (nx < 8 || ny < 8 || nx > 4096 || ny > 4096) fail(ErrorKind::InvalidSpec, "grid resolution must lie in [8, 4096]");
        if (kMax < 0 || kMax > 64) fail(ErrorKind::InvalidSpec, "kMax must lie in [0, 64]");
        for (double v : {momentTol, newtonTol, stokesTol, dbarTol, greenTol, harmonicTol, extensionTol, jumpTol, discTol,
                         massSlack})
            if (!(v > 0) || !std::isfinite(v)) fail(ErrorKind::InvalidSpec, "tolerances must be positive");
        if (!(collarFactor >= 1.0)) fail(ErrorKind::InvalidSpec, "collarFactor must be >= 1");
        if (greenNodes < 100 || greenNodes > 1000000) fail(ErrorKind::InvalidSpec, "greenNodes must lie in [100, 1e6]");
        if (grid && (!(grid->xmax > grid->xmin) || !(grid->ymax > grid->ymin)))
            fail(ErrorKind::InvalidSpec, "grid bounds are empty");
    }

    SweepOptions sweep_options() const {
        SweepOptions o;
        o.grid = grid;
        o.nx = nx;
        o.ny = ny;
        o.kMax = kMax;
        o.recon.momentTol = momentTol;
        o.recon.newtonTol = newtonTol;
        o.recon.stokesTol = stokesTol;
        o.recon.discTol = discTol;
        o.recon.massSlack = massSlack;
        return o;
    }
};

inline void apply_config(RunConfig& c, const json& j) {
    using namespace detail;
    if (!j.is_object()) schema("config", "top level must be an object");
    auto num = [&](const char* key, double& dst) {
        if (j.contains(key)) dst = number(j[key], std::string("config.") + key);
    };
    auto integ = [&](const char* key, int& dst) {
        if (j.contains(key)) dst = integer(j[key], std::string("config.") + key);
    };
    integ("quadratureN", c.quadratureN);
    integ("kMax", c.kMax);
    integ("greenNodes", c.greenNodes);
    num("collarFactor", c.collarFactor);
    if (j.contains("zetaGrid")) {
        const auto& g = j["zetaGrid"];
        const std::string w = "config.zetaGrid";
        if (g.contains("nx")) c.nx = integer(g["nx"], w + ".nx");
        if (g.contains("ny")) c.ny = integer(g["ny"], w + ".ny");
        if (g.contains("bounds")) {
            const auto& b = g["bounds"];
            if (!b.is_array() || b.size() != 4) schema(w + ".bounds", "expected [xmin, xmax, ymin, ymax]");
            GridSpec s;
            s.xmin = number(b[0], w);
            s.xmax = number(b[1], w);
            s.ymin = number(b[2], w);
            s.ymax = number(b[3], w);
            s.nx = c.nx;
            s.ny = c.ny;
            c.grid = s;
        }
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) schema("config.tolerances", "expected an object");
        const std::pair<const char*, double*> names[] = {
            {"momentTol", &c.momentTol},   {"newtonTol", &c.newtonTol},       {"stokesTol", &c.stokesTol},
            {"dbarTol", &c.dbarTol},       {"greenTol", &c.greenTol},         {"harmonicTol", &c.harmonicTol},
            {"extensionTol", &c.extensionTol}, {"jumpTol", &c.jumpTol},       {"discTol", &c.discTol},
            {"massSlack", &c.massSlack}};
        for (const auto& [key, val] : t.items()) {
            bool known = false;
            for (const auto& [name, dst] : names)
                if (key == name) {
                    *dst = number(val, "config.tolerances." + key);
                    known = true;
                }
            if (!known) schema("config.tolerances", "unknown tolerance \"" + key + "\"");
        }
    }
    if (j.contains("outputDir")) {
        if (!j["outputDir"].is_string()) schema("config.outputDir", "expected a string");
        c.outputDir = j["outputDir"].get<std::string>();
    }
    if (j.contains("stages")) {
        if (!j["stages"].is_array()) schema("config.stages", "expected an array");
        for (const auto& s : j["stages"]) {
            if (!s.is_string()) schema("config.stages", "expected strings");
            c.stages.push_back(s.get<std::string>());
        }
    }
    if (c.grid) {
        c.grid->nx = c.nx;
        c.grid->ny = c.ny;
    }
}

inline json to_json(const RunConfig& c) {
    json j;
    j["quadratureN"] = c.quadratureN;
    j["kMax"] = c.kMax;
    j["zetaGrid"] = {{"nx", c.nx}, {"ny", c.ny}};
    if (c.grid) j["zetaGrid"]["bounds"] = {c.grid->xmin, c.grid->xmax, c.grid->ymin, c.grid->ymax};
    j["tolerances"] = {{"momentTol", c.momentTol},     {"newtonTol", c.newtonTol}, {"stokesTol", c.stokesTol},
                       {"dbarTol", c.dbarTol},         {"greenTol", c.greenTol},   {"harmonicTol", c.harmonicTol},
                       {"extensionTol", c.extensionTol}, {"jumpTol", c.jumpTol}, {"discTol", c.discTol},
                       {"massSlack", c.massSlack}};
    j["collarFactor"] = c.collarFactor;
    j["greenNodes"] = c.greenNodes;
    return j;
}

inline json grid_json(const GridSpec& g) {
    return {{"xmin", g.xmin}, {"xmax", g.xmax}, {"ymin", g.ymin}, {"ymax", g.ymax}, {"nx", g.nx}, {"ny", g.ny}};
}

inline json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

/// Point cloud: Re zeta, Im zeta, Re w, Im w, sheet, component.
inline std::string slice_csv(const ChainSlice& s) {
    std::string out = "re_zeta,im_zeta,re_w,im_w,sheet,component\n";
    if (s.empty()) return out;
    const auto& g = s.map->grid;
    for (int idx = 0; idx < static_cast<int>(s.roots.size()); ++idx) {
        const cplx z = g.point(idx);
        for (size_t r = 0; r < s.roots[idx].size(); ++r) {
            const int sheet = r < s.sheets[idx].size() ? s.sheets[idx][r] : static_cast<int>(r);
            out += fmt(z.real()) + "," + fmt(z.imag()) + "," + fmt(s.roots[idx][r].real()) + "," +
                   fmt(s.roots[idx][r].imag()) + "," + std::to_string(sheet) + "," + std::to_string(s.map->label[idx]) +
                   "\n";
        }
    }
    return out;
}

/// Fiber polynomial coefficients per grid point.
inline json slice_json(const ChainSlice& s) {
    json j;
    j["t"] = s.t;
    j["empty"] = s.empty();
    j["sign"] = s.sign;
    j["momentResidual"] = s.momentResidual;
    j["stokesResidual"] = s.stokesResidual;
    j["massEstimate"] = s.massEstimate;
    j["massBound"] = s.massBound;
    j["fibers"] = json::array();
    if (s.empty()) return j;
    const auto& g = s.map->grid;
    for (const auto& f : s.fibers) {
        json fj;
        fj["component"] = f.componentId;
        fj["degree"] = f.degree;
        fj["points"] = json::array();
        for (size_t q = 0; q < f.points.size(); ++q) {
            json pj;
            pj["zeta"] = cjson(g.point(f.points[q]));
            pj["e"] = json::array();
            for (auto v : f.coeffs[q].e) pj["e"].push_back(cjson(v));
            fj["points"].push_back(pj);
        }
        j["fibers"].push_back(fj);
    }
    return j;
}

inline std::string singular_csv(const LeviFlatSet& set) {
    std::string out = "t_index,t,i,j,re_zeta,im_zeta\n";
    for (const auto& e : set.singularLocus)
        out += std::to_string(e.tIndex) + "," + fmt(e.t) + "," + std::to_string(e.i) + "," + std::to_string(e.j) + "," +
               fmt(e.zeta.real()) + "," + fmt(e.zeta.imag()) + "\n";
    return out;
}

inline json manifest_json(const LeviFlatSet& set, const RunConfig& cfg) {
    json j;
    j["tGrid"] = set.tGrid;
    j["grid"] = grid_json(set.grid);
    j["config"] = to_json(cfg);
    j["signs"] = set.signs();
    j["signsConsistent"] = set.signsConsistent;
    j["slices"] = json::array();
    for (size_t s = 0; s < set.slices.size(); ++s) {
        const auto& sl = set.slices[s];
        json e;
        e["index"] = s;
        e["t"] = set.tGrid[s];
        e["empty"] = sl.empty();
        e["momentResidual"] = sl.momentResidual;
        e["stokesResidual"] = sl.stokesResidual;
        e["massEstimate"] = sl.massEstimate;
        e["massBound"] = sl.massBound;
        e["singularCells"] = sl.singular.size();
        e["file"] = "slice_" + std::to_string(s) + ".csv";
        j["slices"].push_back(e);
    }
    j["failures"] = json::array();
    for (const auto& f : set.failures)
        j["failures"].push_back({{"index", f.index}, {"t", f.t}, {"kind", to_string(f.kind)}, {"message", f.message}});
    j["warnings"] = set.warnings;
    json c;
    c["skipped"] = set.continuity.skipped;
    c["pass"] = set.continuity.pass;
    c["maxRatio"] = set.continuity.maxRatio;
    c["bound"] = set.continuity.bound;
    c["note"] = set.continuity.note;
    j["continuity"] = c;
    return j;
}

/// Writes the sweep directory: input.json, manifest.json, slice_<i>.csv,
/// slice_<i>.json and singular.csv.
inline void write_sweep(const std::filesystem::path& dir, const LeviFlatSet& set, const RunConfig& cfg,
                        const std::string& inputText) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string());
    write_file(dir / "input.json", inputText);
    write_file(dir / "manifest.json", manifest_json(set, cfg).dump(2) + "\n");
    for (size_t s = 0; s < set.slices.size(); ++s) {
        write_file(dir / ("slice_" + std::to_string(s) + ".csv"), slice_csv(set.slices[s]));
        write_file(dir / ("slice_" + std::to_string(s) + ".json"), slice_json(set.slices[s]).dump() + "\n");
    }
    write_file(dir / "singular.csv", singular_csv(set));
}

/// Boundary data for one slice: u and u' either as real parts of Fourier
/// series in theta, or as the trace of Re p(z1) for a polynomial p.
struct SliceBoundaryData {
    double t = 0.0;
    int curve = 0;
    std::optional<CoordSeries> u;
    std::optional<CoordSeries> uPrime;
    std::vector<std::vector<cplx>> extensionOf;  // t-polynomial coefficient of z1^k
    std::vector<cplx> targets;
    std::vector<cplx> exterior;
};

inline std::vector<SliceBoundaryData> parse_boundary_data(const json& j) {
    using namespace detail;
    std::vector<SliceBoundaryData> out;
    const auto& sl = field(j, "slices", "boundary");
    if (!sl.is_array() || sl.empty()) schema("boundary.slices", "expected a non-empty array");
    for (size_t k = 0; k < sl.size(); ++k) {
        const std::string w = "boundary.slices[" + std::to_string(k) + "]";
        SliceBoundaryData d;
        d.t = number(field(sl[k], "t", w), w + ".t");
        if (sl[k].contains("curve")) d.curve = integer(sl[k]["curve"], w + ".curve");
        if (sl[k].contains("extension_of")) {
            const auto& e = field(sl[k]["extension_of"], "coeffs", w + ".extension_of");
            if (!e.is_array()) schema(w + ".extension_of.coeffs", "expected an array");
            for (size_t q = 0; q < e.size(); ++q) {
                const std::string wq = w + ".extension_of.coeffs[" + std::to_string(q) + "]";
                const int deg = integer(field(e[q], "k", wq), wq + ".k");
                if (deg < 0 || deg > 64) schema(wq, "degree outside [0, 64]");
                if (static_cast<int>(d.extensionOf.size()) <= deg) d.extensionOf.resize(deg + 1);
                d.extensionOf[deg] = t_poly(e[q], wq);
            }
        } else {
            d.u = series(field(sl[k], "u", w), w + ".u");
            d.uPrime = series(field(sl[k], "u_prime", w), w + ".u_prime");
        }
        auto points = [&](const char* key, std::vector<cplx>& dst) {
            if (!sl[k].contains(key)) return;
            const auto& a = sl[k][key];
            if (!a.is_array()) schema(w + "." + key, "expected an array of [re, im]");
            for (size_t q = 0; q < a.size(); ++q) dst.push_back(complex_value(a[q], w + "." + key));
        };
        points("targets", d.targets);
        points("exterior", d.exterior);
        out.push_back(std::move(d));
    }
    return out;
}

/// Samples u and u' on the nodes of a boundary curve.
inline CauchyDatum boundary_datum(const SliceBoundaryData& d, const ParamCurve& c) {
    const int n = c.size();
    std::vector<double> u(n), up(n);
    if (!d.extensionOf.empty()) {
        for (int j = 0; j < n; ++j) {
            const cplx z = c.nodes[j].z1;
            cplx p{}, dp{};
            for (int k = static_cast<int>(d.extensionOf.size()) - 1; k >= 0; --k) {
                cplx ck{};
                for (int q = static_cast<int>(d.extensionOf[k].size()) - 1; q >= 0; --q)
                    ck = ck * d.t + d.extensionOf[k][q];
                dp = dp * z + p;
                p = p * z + ck;
            }
            // normal direction nu = -i tau of the leaf
            const C2 v = c.velocity[j] * static_cast<double>(c.orientation);
            const cplx nu1 = -I * v.z1 / abs(v);
            u[j] = p.real();
            up[j] = (dp * nu1).real();
        }
    } else {
        for (int j = 0; j < n; ++j) {
            u[j] = d.u->eval(c.params[j], d.t).real();
            up[j] = d.uPrime->eval(c.params[j], d.t).real();
        }
    }
    return cauchy_datum(c, std::move(u), std::move(up));
}

}  // namespace plateau::io
