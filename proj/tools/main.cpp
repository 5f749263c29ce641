// exitmoments command-line front end.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence,
// 4 a checked inequality failed beyond its budget.

#include "exitmoments/comparison.hpp"
#include "exitmoments/errors.hpp"
#include "exitmoments/grid_solver.hpp"
#include "exitmoments/io.hpp"
#include "exitmoments/iso_radius.hpp"
#include "exitmoments/radial_solver.hpp"
#include "exitmoments/rearrange.hpp"
#include "exitmoments/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

using namespace exitmoments;
using io::json;

namespace {

constexpr int kInvalidInput = 2;
constexpr int kNonConvergence = 3;
constexpr int kCheckFailed = 4;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream out;
    out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

// Human-readable text goes to stdout unless stdout carries the JSON result.
struct Output {
    std::string path;
    std::ostream& text() const { return path.empty() ? std::cerr : std::cout; }
    void emit(const json& j) const {
        if (path.empty()) {
            std::cout << j.dump(2) << '\n';
        } else {
            io::write_json_file(path, j);
        }
    }
};

// Config values fill every option the command line left unset. Presets are
// applied the same way, underneath the config file.
void apply_defaults(CLI::App* app, const json& values, const std::string& origin) {
    for (const auto& item : values.items()) {
        CLI::Option* opt = app->get_option_no_throw("--" + item.key());
        if (opt == nullptr || item.key() == "config") {
            throw InvalidInput(origin + ": unknown key '" + item.key() + "' for " + app->get_name());
        }
        if (opt->count() > 0) {
            continue;
        }
        std::vector<std::string> results;
        const auto convert = [&](const json& v) {
            if (v.is_string()) {
                results.push_back(v.get<std::string>());
            } else if (v.is_number() || v.is_boolean()) {
                results.push_back(v.dump());
            } else {
                throw InvalidInput(origin + ": '" + item.key() + "' must be a number, string or list");
            }
        };
        if (item.value().is_array()) {
            for (const auto& v : item.value()) convert(v);
        } else {
            convert(item.value());
        }
        opt->add_result(results);
        opt->run_callback();
    }
}

void apply_config(CLI::App* app, const std::string& config_path, const json& preset) {
    if (!config_path.empty()) {
        const json config = io::read_json_file(config_path);
        if (!config.is_object()) {
            throw InvalidInput("config file must hold a JSON object");
        }
        apply_defaults(app, config, "config");
    }
    if (!preset.is_null()) {
        apply_defaults(app, preset, "preset");
    }
}

// ---------------------------------------------------------------------------
// Surfaces and masks shared by grid-moments and compare.

struct SurfaceArgs {
    std::string surface = "flat_torus";
    double lx = 1.0;
    double ly = 1.0;
    double radius = 1.0;
    std::vector<int> resolution{128, 128};
    std::string mask = "rectangle";
    std::vector<double> center{0.5, 0.5};
    double cap_radius = 0.25;
    std::vector<double> bounds{0.0, 0.5, 0.0, 0.5};
    std::string mask_file;
};

void add_surface_options(CLI::App* app, SurfaceArgs& a) {
    app->add_option("--surface", a.surface, "flat_torus or round_sphere")
        ->check(CLI::IsMember({"flat_torus", "round_sphere"}));
    app->add_option("--lx", a.lx, "torus side L_x");
    app->add_option("--ly", a.ly, "torus side L_y");
    app->add_option("--radius", a.radius, "sphere radius");
    app->add_option("--resolution", a.resolution, "nx ny, or n_theta n_phi")->expected(2);
    app->add_option("--mask", a.mask, "cap, rectangle or file")->check(CLI::IsMember({"cap", "rectangle", "file"}));
    app->add_option("--center", a.center, "cap center (x y, or theta phi)")->expected(2);
    app->add_option("--cap-radius", a.cap_radius, "cap radius");
    app->add_option("--bounds", a.bounds, "rectangle a_lo a_hi b_lo b_hi")->expected(4);
    app->add_option("--mask-file", a.mask_file, "explicit 0/1 mask file");
}

std::pair<ClosedSurface, MaskSpec> make_domain_spec(const SurfaceArgs& a) {
    if (a.mask == "file") {
        if (a.mask_file.empty()) {
            throw InvalidInput("--mask file needs --mask-file");
        }
        auto mask = read_mask_file(a.mask_file);
        const auto surface = mask.surface;
        return {surface, MaskSpec::from_mask(std::move(mask))};
    }
    const ClosedSurface surface = a.surface == "flat_torus"
                                      ? ClosedSurface::flat_torus(a.lx, a.ly, a.resolution[0], a.resolution[1])
                                      : ClosedSurface::round_sphere(a.radius, a.resolution[0], a.resolution[1]);
    const MaskSpec mask = a.mask == "cap" ? MaskSpec::cap(a.center[0], a.center[1], a.cap_radius)
                                          : MaskSpec::rectangle(a.bounds[0], a.bounds[1], a.bounds[2], a.bounds[3]);
    return {surface, mask};
}

std::string describe_surface(const ClosedSurface& s) {
    std::string out = to_string(s.kind) + " ";
    out += s.kind == SurfaceKind::flat_torus ? fmt(s.lx) + "x" + fmt(s.ly) : "R=" + fmt(s.radius);
    return out + " at " + std::to_string(s.n1) + "x" + std::to_string(s.n2);
}

ModelSpace make_space(const std::string& space, int d, double radius, double curvature) {
    if (space == "sphere") return ModelSpace::sphere(radius, d);
    if (space == "euclidean") return ModelSpace::euclidean(d);
    return ModelSpace::hyperbolic(curvature, d);
}

// ---------------------------------------------------------------------------
// ball-moments

struct BallArgs {
    std::string space = "euclidean";
    int d = 2;
    double radius = 1.0;
    double curvature = -1.0;
    double rho = kNaN;
    int n = 4;
    std::size_t n_radii = kDefaultRadialNodes;
    std::string profiles;
};

int run_ball_moments(const BallArgs& a, const Output& out) {
    if (!std::isfinite(a.rho)) {
        throw InvalidInput("ball-moments needs --rho");
    }
    const GeodesicBall ball(make_space(a.space, a.d, a.radius, a.curvature), a.rho);
    const auto hier = moment_hierarchy_ball(ball, a.n, a.n_radii);
    if (!a.profiles.empty()) {
        std::ofstream csv(a.profiles);
        if (!csv) throw InvalidInput("cannot write '" + a.profiles + "'");
        std::vector<std::string> names;
        for (int n = 1; n <= a.n; ++n) names.push_back("u_" + std::to_string(n));
        io::write_profiles_csv(csv, hier.profiles, names);
    }
    json j = io::to_json(hier.moments);
    j["source"] = "ball " + a.space + " d=" + std::to_string(a.d) +
                  (a.space == "sphere" ? " R=" + fmt(a.radius) : "") +
                  (a.space == "hyperbolic" ? " K=" + fmt(a.curvature) : "") + " rho=" + fmt(a.rho) +
                  " n_radii=" + std::to_string(a.n_radii);
    j["timestamp"] = timestamp();
    out.emit(j);
    auto& text = out.text();
    text << std::setprecision(17);
    for (int n = 1; n <= a.n; ++n) text << "T_" << n << " = " << hier.moments[n] << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// grid-moments

struct GridArgs {
    SurfaceArgs surface;
    int n = 4;
    int eigen = 0;
    std::string spectrum_out;
    std::string fields_dir;
};

int run_grid_moments(const GridArgs& a, const Output& out) {
    const auto [surface, mask] = make_domain_spec(a.surface);
    const auto domain = build_domain(surface, mask);
    const auto hier = moment_hierarchy_grid(domain, a.n);
    const std::string source = describe_surface(surface) + " " + mask.describe();
    if (!a.fields_dir.empty()) {
        std::filesystem::create_directories(a.fields_dir);
        for (int n = 1; n <= a.n; ++n) {
            std::ofstream csv(std::filesystem::path(a.fields_dir) / ("u_" + std::to_string(n) + ".csv"));
            if (!csv) throw InvalidInput("cannot write into '" + a.fields_dir + "'");
            write_field_csv(csv, domain, hier.fields[n - 1]);
        }
    }
    json j = io::to_json(hier.moments);
    j["source"] = source;
    j["timestamp"] = timestamp();
    out.emit(j);
    auto& text = out.text();
    text << std::setprecision(17) << "Vol = " << domain.volume << " (" << domain.size() << " interior nodes, "
         << domain.components << " component(s))\n";
    for (int n = 1; n <= a.n; ++n) text << "T_" << n << " = " << hier.moments[n] << '\n';
    if (a.eigen > 0) {
        const auto eig = dirichlet_eigenpairs(domain, a.eigen);
        json s = io::to_json(eig.spectral);
        s["source"] = source;
        s["timestamp"] = timestamp();
        if (a.spectrum_out.empty()) {
            text << s.dump(2) << '\n';
        } else {
            io::write_json_file(a.spectrum_out, s);
        }
        text << "lambda_1 = " << eig.eigenvalues.front() << ", spec* pairs: " << eig.spectral.pairs.size() << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// eig-bounds

struct BoundArgs {
    std::string preset;
    std::string moments;
    std::string spectrum;
    std::string route = "moments";
    int n = 1;
    int k_min = 1;
    int k_max = 6;
    double nu_cutoff = kNaN;
    double noise = 1e-15;
    int recover = 0;
};

json bound_table(const std::vector<EigenBoundReport>& reports, std::ostream& text) {
    json list = json::array();
    text << std::setw(4) << "k" << std::setw(26) << "bound" << "  route\n";
    for (const auto& r : reports) {
        list.push_back(io::to_json(r));
        text << std::setw(4) << r.k << std::setw(26);
        if (r.vacuous) {
            text << "vacuous";
        } else {
            text << std::setprecision(17) << r.bound;
        }
        text << "  " << r.route << '\n';
    }
    return list;
}

SpectralData interval_spectrum(int terms) {
    SpectralData s{1.0, {}};
    for (int j = 0; j < terms; ++j) {
        const double m = 2 * j + 1;
        s.pairs.push_back({m * m * kPi * kPi, 8 / (m * m * kPi * kPi)});
    }
    return s;
}

int run_interval_preset(const BoundArgs& a, const Output& out) {
    const auto spec = interval_spectrum(20000);
    const auto moments = moments_from_spectrum(spec, 24).moments;
    auto& text = out.text();
    json runs = json::array();
    bool ok = true;
    for (int n : {1, 3}) {
        const double lambda = n == 1 ? kPi * kPi : 9 * kPi * kPi;
        const double cutoff = n == 1 ? 0.0 : 2 * kPi * kPi;
        const SpectralData below{1.0, n == 1 ? std::vector<SpectralPair>{} : std::vector<SpectralPair>{spec.pairs[0]}};
        for (const std::string route : {"moments", "spectral_tail"}) {
            std::vector<EigenBoundReport> reports;
            for (int k = a.k_min; k <= a.k_max; ++k) {
                reports.push_back(route == "moments" ? eigenvalue_bound(moments, below, n, k, a.noise)
                                                     : eigenvalue_bound_tail(spec, n, k, cutoff));
                const auto& r = reports.back();
                // The noise floor is ten times the input uncertainty of each bracket.
                const double slack = r.route == "moments" ? 0.2 * r.noise_floor / r.denominator : 1e-12;
                if (!r.vacuous && r.bound < lambda * (1 - slack)) ok = false;
            }
            text << "interval, n = " << n << " (lambda_n = " << std::setprecision(17) << lambda << ")\n";
            runs.push_back({{"n", n}, {"route", route}, {"lambda_n", lambda}, {"bounds", bound_table(reports, text)}});
        }
    }
    const auto rec = recover_spectrum(moments, std::max(a.recover, 2), {a.noise, 10.0});
    json j{{"preset", "interval-bounds"},
           {"moments", io::to_json(moments)},
           {"runs", runs},
           {"recovery", io::to_json(rec)},
           {"all_pass", ok},
           {"timestamp", timestamp()}};
    out.emit(j);
    text << "recovered " << rec.pairs.size() << " pair(s); " << rec.stop_reason << '\n';
    return ok ? 0 : kCheckFailed;
}

int run_eig_bounds(const BoundArgs& a, const Output& out) {
    if (a.k_min < 1 || a.k_max < a.k_min) {
        throw InvalidInput("need 1 <= --k-min <= --k-max");
    }
    if (a.preset == "interval-bounds") {
        return run_interval_preset(a, out);
    }
    if (!a.preset.empty()) {
        throw InvalidInput("unknown preset '" + a.preset + "'");
    }
    std::vector<EigenBoundReport> reports;
    json j{{"source", a.route == "moments" ? a.moments : a.spectrum}, {"n", a.n}, {"route", a.route}};
    auto& text = out.text();
    if (a.route == "spectral_tail") {
        if (a.spectrum.empty()) throw InvalidInput("--route spectral_tail needs --spectrum");
        const auto spec = io::spectral_from_json(io::read_json_file(a.spectrum));
        const double cutoff = std::isfinite(a.nu_cutoff) ? a.nu_cutoff : 0.0;
        for (int k = a.k_min; k <= a.k_max; ++k) reports.push_back(eigenvalue_bound_tail(spec, a.n, k, cutoff));
    } else {
        if (a.moments.empty()) throw InvalidInput("eig-bounds needs --moments");
        const auto moments = io::moments_from_json(io::read_json_file(a.moments));
        SpectralData below{moments.volume, {}};
        if (!a.spectrum.empty()) {
            for (const auto& p : io::spectral_from_json(io::read_json_file(a.spectrum)).pairs) {
                if (!std::isfinite(a.nu_cutoff) || p.nu < a.nu_cutoff) below.pairs.push_back(p);
            }
        }
        for (int k = a.k_min; k <= a.k_max; ++k) {
            reports.push_back(eigenvalue_bound(moments, below, a.n, k, a.noise));
        }
        if (a.recover > 0) {
            const auto rec = recover_spectrum(moments, a.recover, {a.noise, 10.0});
            j["recovery"] = io::to_json(rec);
            text << "recovered " << rec.pairs.size() << " pair(s); " << rec.stop_reason << '\n';
        }
    }
    j["bounds"] = bound_table(reports, text);
    j["timestamp"] = timestamp();
    out.emit(j);
    return 0;
}

// ---------------------------------------------------------------------------
// iso-radius

struct IsoArgs {
    double curvature = 0.0;
    int d = 2;
    double diam = kNaN;
};

int run_iso_radius(const IsoArgs& a, const Output& out) {
    if (!std::isfinite(a.diam)) throw InvalidInput("iso-radius needs --diam");
    const double r = comparison_radius({a.curvature, a.d, a.diam});
    std::cout << std::setprecision(17) << r << '\n';
    if (!out.path.empty()) {
        io::write_json_file(out.path, {{"K", a.curvature}, {"d", a.d}, {"diam", a.diam}, {"R", r}, {"timestamp", timestamp()}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::string preset;
    SurfaceArgs surface;
    int n = 5;
    std::string choice = "bbg_R";
    std::vector<std::string> checks{"moments"};
    int refine = 2;
    std::size_t n_radii = kDefaultRadialNodes;
    double source = 1.0;
    double cheeger = kNaN;
    std::vector<int> k{1, 2, 3};
};

const std::map<std::string, json> kComparePresets{
    {"torus-square-vs-cap",
     {{"surface", "flat_torus"}, {"lx", 1}, {"ly", 1}, {"resolution", {256, 256}}, {"mask", "rectangle"},
      {"bounds", {0, 0.5, 0, 0.5}}, {"choice", "bbg_R"}, {"n-moments", 5}}},
    {"sphere-rect-vs-cap",
     {{"surface", "round_sphere"}, {"radius", 1}, {"resolution", {256, 512}}, {"mask", "rectangle"},
      {"bounds", {kPi / 3, 2 * kPi / 3, 0, kPi / 2}}, {"choice", "sqrtK"}, {"n-moments", 5}}},
};

int run_compare(const CompareArgs& a, const Output& out) {
    const auto [surface, mask] = make_domain_spec(a.surface);
    const SphereChoice choice = sphere_choice_from_string(a.choice);
    ComparisonOptions options;
    options.refine = a.refine;
    options.n_radii = a.n_radii;
    auto& text = out.text();
    json checks = json::object();
    bool ok = true;
    for (const auto& check : a.checks) {
        if (check == "moments") {
            const auto r = moment_comparison_report(surface, mask, a.n, choice, options);
            write_summary(text, r);
            checks["moments"] = io::to_json(r);
            ok = ok && r.all_pass();
        } else if (check == "pde") {
            const double c = a.source;
            const auto r = pde_comparison_check(surface, mask, [c](double, double) { return c; }, choice, options);
            text << std::setprecision(6) << "pde: max(u* - v) = " << r.max_violation << ", budget " << r.budget
                 << "  " << (r.pass ? "pass" : "FAIL") << '\n';
            checks["pde"] = io::to_json(r);
            ok = ok && r.pass;
        } else if (check == "faber-krahn") {
            const auto r = faber_krahn_check(surface, mask, choice, options);
            text << std::setprecision(10) << "faber-krahn: lambda_1 = " << r.lambda_domain
                 << ", lambda_1(ball) = " << r.lambda_star << ", budget " << std::setprecision(3) << r.budget
                 << "  " << (r.pass ? "pass" : "FAIL") << '\n';
            checks["faber_krahn"] = io::to_json(r);
            ok = ok && r.pass;
        } else if (check == "cheeger") {
            if (!std::isfinite(a.cheeger)) throw InvalidInput("--check cheeger needs --cheeger");
            const int k_max = *std::max_element(a.k.begin(), a.k.end());
            const auto fine = surface.refined(a.refine);
            const auto domain = build_domain(fine, mask);
            const auto moments = moment_hierarchy_grid(domain, std::max(2 * k_max - 1, 1)).moments;
            json list = json::array();
            for (int k : a.k) {
                const auto r = cheeger_bound_check(a.cheeger, domain.volume, fine.volume(), moments, k);
                text << std::setprecision(10) << "cheeger k=" << k << ": C^2 = " << r.lhs << " <= " << r.rhs
                     << "  " << (r.pass ? "pass" : "FAIL") << '\n';
                list.push_back(io::to_json(r));
                ok = ok && r.pass;
            }
            checks["cheeger"] = list;
        } else {
            throw InvalidInput("unknown check '" + check + "' (moments, pde, faber-krahn, cheeger)");
        }
    }
    json j;
    if (!a.preset.empty()) j["preset"] = a.preset;
    j["surface"] = describe_surface(surface);
    j["domain"] = mask.describe();
    j["checks"] = checks;
    j["all_pass"] = ok;
    j["timestamp"] = timestamp();
    out.emit(j);
    return ok ? 0 : kCheckFailed;
}

// ---------------------------------------------------------------------------
// symmetrize

struct SymArgs {
    std::string input;
    double ambient = kNaN;
    double radius = 1.0;
    int d = 2;
    std::size_t n_radii = kDefaultRadialNodes;
};

int run_symmetrize(const SymArgs& a, const Output& out) {
    if (a.input.empty()) throw InvalidInput("symmetrize needs --in");
    if (!std::isfinite(a.ambient)) throw InvalidInput("symmetrize needs --ambient-volume");
    std::ifstream in(a.input);
    if (!in) throw InvalidInput("cannot open '" + a.input + "'");
    const auto sample = io::read_weighted_csv(in, a.ambient);
    const auto ball = symmetrized_ball(sample.domain_volume, a.ambient, ModelSpace::sphere(a.radius, a.d));
    const auto profile = spherical_symmetrization(sample, ball, a.n_radii);
    if (out.path.empty()) {
        io::write_radial_csv(std::cout, profile, "f_star");
    } else {
        std::ofstream csv(out.path);
        if (!csv) throw InvalidInput("cannot write '" + out.path + "'");
        io::write_radial_csv(csv, profile, "f_star");
    }
    out.text() << std::setprecision(17) << "cap radius " << ball.radius << ", L1 mean " << lp_mean(sample, 1.0)
               << " -> " << lp_mean(profile, 1.0) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exit-time moment spectra: radial and grid solvers, spectral bounds, comparison checks"};
    app.require_subcommand(1);
    std::string config;
    Output out;

    BallArgs ball;
    auto* ball_cmd = app.add_subcommand("ball-moments", "moment hierarchy on a geodesic ball");
    ball_cmd->add_option("--space", ball.space)->check(CLI::IsMember({"sphere", "euclidean", "hyperbolic"}));
    ball_cmd->add_option("-d,--dimension", ball.d);
    ball_cmd->add_option("-R,--radius", ball.radius, "sphere radius");
    ball_cmd->add_option("-K,--curvature", ball.curvature, "hyperbolic curvature (< 0)");
    ball_cmd->add_option("--rho", ball.rho, "ball radius");
    ball_cmd->add_option("-N,--n-moments", ball.n);
    ball_cmd->add_option("--n-radii", ball.n_radii);
    ball_cmd->add_option("--profiles", ball.profiles, "CSV of u_1..u_N");

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("grid-moments", "moment hierarchy on a masked grid domain");
    add_surface_options(grid_cmd, grid.surface);
    grid_cmd->add_option("-N,--n-moments", grid.n);
    grid_cmd->add_option("--eigen", grid.eigen, "also compute this many Dirichlet eigenpairs");
    grid_cmd->add_option("--spectrum-out", grid.spectrum_out, "SpectralData JSON path");
    grid_cmd->add_option("--fields-dir", grid.fields_dir, "directory for u_n CSV dumps");

    BoundArgs bounds;
    auto* bound_cmd = app.add_subcommand("eig-bounds", "eigenvalue bounds from moments");
    bound_cmd->add_option("--preset", bounds.preset)->check(CLI::IsMember({"interval-bounds"}));
    bound_cmd->add_option("--moments", bounds.moments, "MomentSequence JSON");
    bound_cmd->add_option("--spectrum", bounds.spectrum, "SpectralData JSON");
    bound_cmd->add_option("--route", bounds.route)->check(CLI::IsMember({"moments", "spectral_tail"}));
    bound_cmd->add_option("-n,--index", bounds.n, "eigenvalue index n");
    bound_cmd->add_option("--k-min", bounds.k_min);
    bound_cmd->add_option("--k-max", bounds.k_max);
    bound_cmd->add_option("--nu-cutoff", bounds.nu_cutoff, "subtract pairs with nu below this");
    bound_cmd->add_option("--noise", bounds.noise, "relative noise of the input moments");
    bound_cmd->add_option("--recover", bounds.recover, "recover this many spectral pairs");

    IsoArgs iso;
    auto* iso_cmd = app.add_subcommand("iso-radius", "comparison sphere radius R(K, d, diam)");
    iso_cmd->add_option("-K,--curvature", iso.curvature);
    iso_cmd->add_option("-d,--dimension", iso.d);
    iso_cmd->add_option("--diam", iso.diam);

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "comparison checks against the symmetrized cap");
    cmp_cmd->add_option("--preset", cmp.preset)->check(CLI::IsMember({"torus-square-vs-cap", "sphere-rect-vs-cap"}));
    add_surface_options(cmp_cmd, cmp.surface);
    cmp_cmd->add_option("-N,--n-moments", cmp.n);
    cmp_cmd->add_option("--choice", cmp.choice)->check(CLI::IsMember({"bbg_R", "sqrtK"}));
    cmp_cmd->add_option("--check", cmp.checks, "moments, pde, faber-krahn, cheeger");
    cmp_cmd->add_option("--refine", cmp.refine);
    cmp_cmd->add_option("--n-radii", cmp.n_radii);
    cmp_cmd->add_option("--source", cmp.source, "constant right-hand side for the pde check");
    cmp_cmd->add_option("--cheeger", cmp.cheeger, "Cheeger constant of the surface");
    cmp_cmd->add_option("--k", cmp.k, "orders for the Cheeger check");

    SymArgs sym;
    auto* sym_cmd = app.add_subcommand("symmetrize", "spherical symmetrization of (value, weight) samples");
    sym_cmd->add_option("--in", sym.input, "CSV of value,weight");
    sym_cmd->add_option("--ambient-volume", sym.ambient);
    sym_cmd->add_option("-R,--radius", sym.radius, "target sphere radius");
    sym_cmd->add_option("-d,--dimension", sym.d);
    sym_cmd->add_option("--n-radii", sym.n_radii);

    for (auto* cmd : {ball_cmd, grid_cmd, bound_cmd, iso_cmd, cmp_cmd, sym_cmd}) {
        cmd->add_option("--config", config, "JSON file of option values (flags take precedence)");
        cmd->add_option("-o,--out", out.path, "output path (default: stdout)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInvalidInput;
    }

    try {
        for (auto* cmd : app.get_subcommands()) {
            json preset;
            if (cmd == cmp_cmd && !cmp.preset.empty()) preset = kComparePresets.at(cmp.preset);
            apply_config(cmd, config, preset);
        }
        if (*ball_cmd) return run_ball_moments(ball, out);
        if (*grid_cmd) return run_grid_moments(grid, out);
        if (*bound_cmd) return run_eig_bounds(bounds, out);
        if (*iso_cmd) return run_iso_radius(iso, out);
        if (*cmp_cmd) return run_compare(cmp, out);
        if (*sym_cmd) return run_symmetrize(sym, out);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (achieved " << e.achieved() << ")\n";
        return kNonConvergence;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    return kInvalidInput;
}
