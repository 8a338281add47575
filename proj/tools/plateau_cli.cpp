#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "plateau/family.hpp"
#include "plateau/green.hpp"
#include "plateau/io.hpp"
#include "plateau/moments.hpp"
#include "plateau/reconstruct.hpp"

namespace fs = std::filesystem;
using namespace plateau;
using io::json;

namespace {

enum Exit { kOk = 0, kThreshold = 1, kInput = 2, kNumeric = 3, kNegative = 4, kObstructed = 5 };

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError:
        case ErrorKind::IoError:
        case ErrorKind::InvalidSpec:
            return kInput;
        case ErrorKind::MomentViolation:
            return kThreshold;
        case ErrorKind::NonPositiveChain:
            return kNegative;
        case ErrorKind::ObstructedExtension:
            return kObstructed;
        default:
            return kNumeric;
    }
}

struct Common {
    std::string config;
    std::string out;
    bool force = false;
    std::optional<int> quadratureN;
    std::optional<int> kMax;
    std::optional<double> tolMoment, tolNewton, tolStokes, tolDbar, tolGreen, tolHarmonic, tolExtension, tolJump;

    void add(CLI::App* app) {
        app->add_option("--config", config, "JSON run configuration");
        app->add_option("--out", out, "output directory");
        app->add_flag("--force", force, "continue past moment violations");
        app->add_option("--quadrature-n", quadratureN, "boundary nodes per curve (power of two)");
        app->add_option("--kmax", kMax, "highest power sum");
        app->add_option("--tol-moment", tolMoment);
        app->add_option("--tol-newton", tolNewton);
        app->add_option("--tol-stokes", tolStokes);
        app->add_option("--tol-dbar", tolDbar);
        app->add_option("--tol-green", tolGreen);
        app->add_option("--tol-harmonic", tolHarmonic);
        app->add_option("--tol-extension", tolExtension);
        app->add_option("--tol-jump", tolJump);
    }

    io::RunConfig resolve() const {
        io::RunConfig c;
        if (!config.empty()) io::apply_config(c, io::load_json(config));
        if (quadratureN) c.quadratureN = *quadratureN;
        if (kMax) c.kMax = *kMax;
        if (tolMoment) c.momentTol = *tolMoment;
        if (tolNewton) c.newtonTol = *tolNewton;
        if (tolStokes) c.stokesTol = *tolStokes;
        if (tolDbar) c.dbarTol = *tolDbar;
        if (tolGreen) c.greenTol = *tolGreen;
        if (tolHarmonic) c.harmonicTol = *tolHarmonic;
        if (tolExtension) c.extensionTol = *tolExtension;
        if (tolJump) c.jumpTol = *tolJump;
        if (!out.empty()) c.outputDir = out;
        c.validate();
        return c;
    }
};

cplx parse_point(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return std::stod(s);
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::logic_error&) {
        fail(ErrorKind::ParseError, "bad point \"" + s + "\"; expected re,im");
    }
}

void emit(const json& report, const io::RunConfig& cfg, const std::string& name) {
    const std::string text = report.dump(2) + "\n";
    std::fwrite(text.data(), 1, text.size(), stdout);
    if (!cfg.outputDir.empty()) {
        fs::create_directories(cfg.outputDir);
        io::write_file(fs::path(cfg.outputDir) / name, text);
    }
}

int cmd_check_moments(const std::string& input, const Common& common) {
    const auto cfg = common.resolve();
    const auto fam = io::parse_family(io::load_json(input), cfg.quadratureN);
    const auto forms = standard_test_forms(3);
    const GridSpec grid = cfg.grid ? *cfg.grid : family_grid(fam, cfg.nx, cfg.ny);
    json rep;
    rep["tGrid"] = fam.tGrid;
    rep["slices"] = json::array();
    rep["offending"] = json::array();
    double worst = 0.0;
    for (int s = 0; s < fam.size(); ++s) {
        json e;
        e["t"] = fam.tGrid[s];
        double res = 0.0, formMax = 0.0;
        if (!fam.slices[s].empty()) {
            const auto ps = project_z1(fam.slices[s]);
            auto map = std::make_shared<const ComponentMap>(classify_components(ps, grid));
            const int kMax = cfg.kMax > 0 ? cfg.kMax : 2 * map->max_winding() + 2;
            res = moment_residual(build_moment_table(fam.slices[s], map, kMax));
            e["forms"] = json::array();
            for (const auto& h : forms) {
                const cplx v = fam.transverse[s] ? family_moment_direct(fam, h, s)
                                                 : family_moment_poincare(fam, h, fam.tGrid[s]);
                e["forms"].push_back(io::cjson(v));
                formMax = std::max(formMax, std::abs(v));
            }
        }
        e["momentResidual"] = res;
        e["maxFormIntegral"] = formMax;
        const double r = std::max(res, formMax);
        e["pass"] = r < cfg.momentTol;
        if (!(r < cfg.momentTol)) rep["offending"].push_back(fam.tGrid[s]);
        worst = std::max(worst, r);
        rep["slices"].push_back(e);
    }
    rep["maxResidual"] = worst;
    rep["momentTol"] = cfg.momentTol;
    rep["pass"] = rep["offending"].empty();
    emit(rep, cfg, "moments.json");
    if (!rep["offending"].empty()) {
        for (const auto& t : rep["offending"]) std::cerr << "moment condition fails at t = " << io::fmt(t.get<double>()) << "\n";
        return kThreshold;
    }
    return kOk;
}

int sweep_exit(const LeviFlatSet& set, const io::RunConfig& cfg) {
    int code = kOk;
    for (const auto& f : set.failures) {
        std::cerr << "slice " << f.index << " (t = " << io::fmt(f.t) << "): " << f.message << "\n";
        if (f.kind == ErrorKind::NonPositiveChain) return kNegative;
    }
    for (const auto& f : set.failures) code = std::max(code, exit_code(f.kind) == kInput ? kNumeric : exit_code(f.kind));
    if (code != kOk) return code;
    for (size_t s = 0; s < set.slices.size(); ++s)
        if (!set.slices[s].empty() && !(set.slices[s].stokesResidual < cfg.stokesTol)) {
            std::cerr << "slice " << s << ": Stokes residual " << io::fmt(set.slices[s].stokesResidual) << "\n";
            code = kThreshold;
        }
    if (!set.signsConsistent) {
        std::cerr << "boundary orientation is inconsistent across t\n";
        code = kThreshold;
    }
    return code;
}

int cmd_sweep(const std::string& input, const Common& common, std::optional<int> only) {
    auto cfg = common.resolve();
    if (cfg.outputDir.empty()) cfg.outputDir = "plateau_out";
    const std::string text = io::read_file(input);
    auto fam = io::parse_family(io::parse_json(text, input), cfg.quadratureN);
    auto opt = cfg.sweep_options();
    opt.recon.force = common.force;
    if (!opt.grid) opt.grid = family_grid(fam, cfg.nx, cfg.ny);
    if (only) {
        if (*only < 0 || *only >= fam.size()) fail(ErrorKind::InvalidSpec, "--t-index outside the t-grid");
        CurveFamily one;
        one.quadratureN = fam.quadratureN;
        one.tGrid = {fam.tGrid[*only]};
        one.slices = {fam.slices[*only]};
        one.transverse = {fam.transverse[*only]};
        fam = one;
    }
    const auto set = sweep(fam, opt);
    io::write_sweep(cfg.outputDir, set, cfg, text);
    json summary = io::manifest_json(set, cfg);
    summary.erase("config");
    const std::string s = summary.dump(2) + "\n";
    std::fwrite(s.data(), 1, s.size(), stdout);
    return sweep_exit(set, cfg);
}

int cmd_validate(const std::string& input, const Common& common) {
    const auto cfg = common.resolve();
    const auto fam = io::parse_family(io::load_json(input), cfg.quadratureN);
    const GridSpec grid = cfg.grid ? *cfg.grid : family_grid(fam, cfg.nx, cfg.ny);
    json rep;
    rep["grid"] = io::grid_json(grid);
    rep["slices"] = json::array();
    int code = kOk;
    for (int s = 0; s < fam.size(); ++s) {
        json e;
        e["t"] = fam.tGrid[s];
        e["curves"] = fam.slices[s].size();
        e["transverse"] = static_cast<bool>(fam.transverse[s]);
        if (!fam.slices[s].empty()) {
            const auto ps = project_z1(fam.slices[s]);
            const auto map = classify_components(ps, grid);
            e["components"] = map.components();
            e["maxWinding"] = map.max_winding();
            e["minWinding"] = map.min_winding();
            if (map.min_winding() < 0) code = kNegative;
        }
        rep["slices"].push_back(e);
    }
    rep["pass"] = code == kOk;
    emit(rep, cfg, "validate.json");
    return code;
}

int cmd_green(const std::string& fPath, double t, const std::string& center, double radius,
              const std::string& zstar, const Common& common) {
    const auto cfg = common.resolve();
    const auto F = io::parse_defining_function(io::load_json(fPath));
    const cplx c = parse_point(center);
    const BiPoly Ft = F.at(t);
    const auto d = discretize_curve(Ft, t, c, radius, mesh_for_nodes(radius, cfg.greenNodes));
    const cplx zs1 = parse_point(zstar);
    const int zs = d.nearest(lift(Ft, zs1, 0.0));
    if (zs < 0) fail(ErrorKind::InvalidSpec, "z* lies outside the discretized disk");
    std::vector<int> targets;
    for (int k = 0; k < static_cast<int>(d.nodes.size()); ++k)
        if (k != zs) targets.push_back(k);
    const auto g = green_field(d, zs, targets);
    std::vector<cplx> value(d.nodes.size(), cplx{});
    for (size_t q = 0; q < targets.size(); ++q) value[targets[q]] = g[q];

    const cplx z0 = d.nodes[zs].z.z1;
    double harmonic = 0.0;
    std::string csv = "re_z1,im_z1,re_z2,im_z2,sheet,re_g,im_g,laplacian\n";
    for (int k = 0; k < static_cast<int>(d.nodes.size()); ++k) {
        const auto& n = d.nodes[k];
        double lap = std::numeric_limits<double>::quiet_NaN();
        bool stencilClear = k != zs;
        for (int di = -1; di <= 1 && stencilClear; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                if (d.find(n.i + di, n.j + dj, n.sheet) == zs) stencilClear = false;
        if (stencilClear) lap = std::abs(laplacian9(d, [&](int q) { return value[q]; }, k));
        const bool far = std::abs(n.z.z1 - z0) > 0.25 * radius && std::abs(n.z.z1 - c) < 0.8 * radius;
        if (far && std::isfinite(lap)) harmonic = std::max(harmonic, lap);
        csv += io::fmt(n.z.z1.real()) + "," + io::fmt(n.z.z1.imag()) + "," + io::fmt(n.z.z2.real()) + "," +
               io::fmt(n.z.z2.imag()) + "," + std::to_string(n.sheet) + "," + io::fmt(value[k].real()) + "," +
               io::fmt(value[k].imag()) + "," + (std::isfinite(lap) ? io::fmt(lap) : std::string("nan")) + "\n";
    }
    json rep;
    rep["nodes"] = d.nodes.size();
    rep["h"] = d.h;
    rep["zstar"] = io::cjson(z0);
    rep["pairing"] = json::array();
    double worst = 0.0;
    for (const auto& b : standard_bumps(c, radius)) {
        const cplx p = green_pairing(d, zs, [&](cplx z) { return b.laplacian(z); });
        const double err = std::abs(p - b(z0));
        worst = std::max(worst, err);
        rep["pairing"].push_back({{"value", io::cjson(p)}, {"chi", b(z0)}, {"error", err}});
    }
    rep["pairingResidual"] = worst;
    rep["harmonicResidual"] = harmonic;
    const bool pass = worst < cfg.greenTol && harmonic < cfg.harmonicTol;
    rep["pass"] = pass;
    if (!cfg.outputDir.empty()) {
        fs::create_directories(cfg.outputDir);
        io::write_file(fs::path(cfg.outputDir) / "green.csv", csv);
    }
    emit(rep, cfg, "green.json");
    return pass ? kOk : kThreshold;
}

int cmd_extend(const std::string& sweepDir, const std::string& fPath, const std::string& dataPath,
               const Common& common) {
    const auto cfg = common.resolve();
    const fs::path dir(sweepDir);
    if (!fs::is_directory(dir) || !fs::exists(dir / "manifest.json") || !fs::exists(dir / "input.json"))
        fail(ErrorKind::IoError, "not a sweep output directory: " + sweepDir);
    const auto fam = io::parse_family(io::load_json(dir / "input.json"), cfg.quadratureN);
    const auto F = io::parse_defining_function(io::load_json(fPath));
    const auto data = io::parse_boundary_data(io::load_json(dataPath));

    json rep;
    rep["slices"] = json::array();
    int code = kOk;
    std::vector<std::pair<std::string, std::string>> files;
    for (size_t k = 0; k < data.size(); ++k) {
        const auto& bd = data[k];
        int s = -1;
        for (int q = 0; q < fam.size(); ++q)
            if (std::abs(fam.tGrid[q] - bd.t) <= 1e-12 * std::max(1.0, std::abs(bd.t))) s = q;
        if (s < 0) fail(ErrorKind::ParseError, "boundary data at t = " + io::fmt(bd.t) + " is not on the sweep grid");
        if (bd.curve < 0 || bd.curve >= static_cast<int>(fam.slices[s].size()))
            fail(ErrorKind::ParseError, "boundary data refers to a missing curve");
        const ParamCurve& curve = fam.slices[s][bd.curve];
        const BiPoly Ft = F.at(bd.t);
        const auto datum = io::boundary_datum(bd, curve);
        const ExtensionSolver ext(Ft, datum);

        cplx c{};
        cplx w{};
        for (const auto& p : curve.nodes) {
            c += p.z1;
            w += p.z2;
        }
        c /= static_cast<double>(curve.size());
        w /= static_cast<double>(curve.size());
        double R = 0.0;
        for (const auto& p : curve.nodes) R = std::max(R, std::abs(p.z1 - c));

        std::vector<C2> exterior;
        if (bd.exterior.empty()) {
            for (int a = 0; a < 16; ++a) exterior.push_back(lift(Ft, c + 1.3 * R * std::exp(I * (two_pi * a / 16 + 0.1)), w));
        } else {
            for (auto z : bd.exterior) exterior.push_back(lift(Ft, z, w));
        }
        std::vector<C2> targets;
        const auto proj = project_z1(curve);
        if (bd.targets.empty()) {
            const double h = R / 8;
            for (int j = -8; j <= 8; ++j)
                for (int i = -8; i <= 8; ++i) {
                    const cplx z = c + h * cplx(i, j);
                    if (proj.distance(z) < 0.1 * R) continue;
                    if (winding_number(proj, z, 0.0).value != 0) targets.push_back(lift(Ft, z, w));
                }
        } else {
            for (auto z : bd.targets) targets.push_back(lift(Ft, z, w));
        }

        json e;
        e["t"] = bd.t;
        e["curve"] = bd.curve;
        const double moment = green_moment_test(ext, exterior);
        e["greenMomentResidual"] = moment;
        if (!(moment < cfg.extensionTol)) {
            e["obstructed"] = true;
            rep["slices"].push_back(e);
            std::cerr << "t = " << io::fmt(bd.t) << ": Green moment residual " << io::fmt(moment)
                      << " exceeds " << io::fmt(cfg.extensionTol) << "\n";
            code = kObstructed;
            continue;
        }
        const auto U = harmonic_extend(ext, targets);
        const auto J = jump_check(Ft, ext, datum);
        e["obstructed"] = false;
        e["jumpResidual"] = J.residual;
        e["targets"] = targets.size();
        rep["slices"].push_back(e);
        if (!(J.residual < cfg.jumpTol) && code == kOk) code = kThreshold;

        std::string csv = "re_z1,im_z1,re_z2,im_z2,U\n";
        for (size_t q = 0; q < targets.size(); ++q)
            csv += io::fmt(targets[q].z1.real()) + "," + io::fmt(targets[q].z1.imag()) + "," +
                   io::fmt(targets[q].z2.real()) + "," + io::fmt(targets[q].z2.imag()) + "," + io::fmt(U[q]) + "\n";
        std::string jcsv = "theta,u_plus,u_minus,residual\n";
        for (size_t q = 0; q < J.theta.size(); ++q) {
            const int node = static_cast<int>(q * curve.size() / J.theta.size());
            jcsv += io::fmt(J.theta[q]) + "," + io::fmt(J.uPlus[q]) + "," + io::fmt(J.uMinus[q]) + "," +
                    io::fmt(std::abs(datum.u[node] - (J.uPlus[q] - J.uMinus[q]))) + "\n";
        }
        files.emplace_back("extension_" + std::to_string(k) + ".csv", csv);
        files.emplace_back("jump_" + std::to_string(k) + ".csv", jcsv);
    }
    rep["pass"] = code == kOk;
    if (!cfg.outputDir.empty()) {
        fs::create_directories(cfg.outputDir);
        for (const auto& [name, text] : files) io::write_file(fs::path(cfg.outputDir) / name, text);
    }
    emit(rep, cfg, "extension.json");
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holomorphic chain filling of curve families in C^2"};
    app.require_subcommand(1);

    Common common;
    std::string input, fPath, dataPath, center = "0,0", zstar = "0.05,0";
    double t = 0.0, radius = 1.0;
    std::optional<int> tIndex;

    auto* check = app.add_subcommand("check-moments", "moment residuals per slice");
    check->add_option("input", input, "curve-family JSON")->required();
    common.add(check);

    auto* recon = app.add_subcommand("reconstruct", "reconstruct one slice");
    recon->add_option("input", input, "curve-family JSON")->required();
    recon->add_option("--t-index", tIndex, "slice index")->required();
    common.add(recon);

    auto* sw = app.add_subcommand("sweep", "reconstruct every slice and export the Levi-flat set");
    sw->add_option("input", input, "curve-family JSON")->required();
    common.add(sw);

    auto* val = app.add_subcommand("validate", "check the input and classify each slice");
    val->add_option("input", input, "curve-family JSON")->required();
    common.add(val);

    auto* gr = app.add_subcommand("green", "Green function on a disk of the curve {F = 0}");
    gr->add_option("--F", fPath, "defining-function JSON")->required();
    gr->add_option("--t", t, "parameter value");
    gr->add_option("--center", center, "disk center re,im");
    gr->add_option("--radius", radius, "disk radius");
    gr->add_option("--zstar", zstar, "pole re,im (z1 coordinate)");
    common.add(gr);

    auto* ex = app.add_subcommand("extend", "harmonic extension of boundary data");
    ex->add_option("sweep", input, "sweep output directory")->required();
    ex->add_option("--F", fPath, "defining-function JSON")->required();
    ex->add_option("--data", dataPath, "boundary-data JSON")->required();
    common.add(ex);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInput;
    }

    try {
        if (*check) return cmd_check_moments(input, common);
        if (*recon) return cmd_sweep(input, common, tIndex);
        if (*sw) return cmd_sweep(input, common, std::nullopt);
        if (*val) return cmd_validate(input, common);
        if (*gr) return cmd_green(fPath, t, center, radius, zstar, common);
        if (*ex) return cmd_extend(input, fPath, dataPath, common);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: IoError: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kInput;
}
