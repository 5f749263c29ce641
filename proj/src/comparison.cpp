#include "exitmoments/comparison.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/iso_radius.hpp"
#include "exitmoments/numerics.hpp"
#include "exitmoments/rearrange.hpp"
#include "exitmoments/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace exitmoments {

namespace {

std::string describe_levels(const ClosedSurface& coarse, const ClosedSurface& fine) {
    std::ostringstream out;
    out << std::setprecision(17) << to_string(coarse.kind) << ' ';
    if (coarse.kind == SurfaceKind::flat_torus) {
        out << coarse.lx << 'x' << coarse.ly;
    } else {
        out << "R=" << coarse.radius;
    }
    out << " at " << coarse.n1 << 'x' << coarse.n2 << " / " << fine.n1 << 'x' << fine.n2;
    return out.str();
}

void check_options(const ComparisonOptions& options) {
    if (options.refine < 2) {
        throw InvalidInput("comparison needs a refinement factor >= 2");
    }
    if (options.n_radii < 16) {
        throw InvalidInput("comparison needs at least 16 radial nodes");
    }
}

// Interior values with full weight, boundary ring with half weight.
WeightedSample ring_sample(const GridDomain& d, const GridField& interior,
                           const std::vector<double>& ring) {
    std::vector<double> values = interior;
    std::vector<double> weights = d.weight;
    for (std::size_t i = 0; i < d.ring_nodes.size(); ++i) {
        values.push_back(ring[i]);
        weights.push_back(0.5 * d.node_volume[d.ring_nodes[i]]);
    }
    return WeightedSample::make(std::move(values), std::move(weights), d.surface.volume());
}

struct PdeLevel {
    RadialField u_star;
    RadialField v;
    double max_violation = 0.0;
    double max_gap = 0.0;
    double quantization = 0.0;
    double radial_tolerance = 0.0;
    double ball_radius = 0.0;
};

PdeLevel pde_level(const ClosedSurface& surface, const MaskSpec& mask, const SourceFunction& f,
                   const ModelSpace& sphere, const ComparisonOptions& options, bool radial_check) {
    const GridDomain d = build_domain(surface, mask);
    const auto source = [&](std::size_t node) {
        const auto c = surface.coordinates(node);
        const double value = f(c[0], c[1]);
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw InvalidInput("source f must be finite and nonnegative");
        }
        return value;
    };
    GridField rhs(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        rhs[i] = source(d.interior_nodes[i]);
    }
    const GridField u = poisson_solve(d, rhs, options.solver);
    std::vector<double> ring_f;
    for (std::size_t node : d.ring_nodes) {
        ring_f.push_back(source(node));
    }
    const WeightedSample u_sample = ring_sample(d, u, std::vector<double>(d.ring_nodes.size(), 0.0));
    const WeightedSample f_sample = ring_sample(d, rhs, ring_f);
    const GeodesicBall ball = symmetrized_ball(u_sample.domain_volume, u_sample.ambient_volume, sphere);

    PdeLevel level;
    level.ball_radius = ball.radius;
    level.u_star = spherical_symmetrization(u_sample, ball, options.n_radii);
    const RadialField f_star = spherical_symmetrization(f_sample, ball, options.n_radii);
    level.v = radial_poisson_solve(ball, f_star);
    for (std::size_t i = 0; i < level.v.size(); ++i) {
        const double diff = level.u_star.values[i] - level.v.values[i];
        level.max_violation = i == 0 ? diff : std::max(level.max_violation, diff);
        level.max_gap = std::max(level.max_gap, std::abs(diff));
    }
    const Rearrangement rearranged(u_sample);
    for (std::size_t i = 1; i < rearranged.levels().size(); ++i) {
        level.quantization =
            std::max(level.quantization, rearranged.levels()[i - 1] - rearranged.levels()[i]);
    }
    if (radial_check) {
        const std::size_t half = options.n_radii / 2;
        const RadialField f_half = spherical_symmetrization(f_sample, ball, half);
        const RadialField v_half = radial_poisson_solve(ball, f_half);
        for (std::size_t i = 0; i < v_half.size(); ++i) {
            level.radial_tolerance = std::max(
                level.radial_tolerance, std::abs(v_half.values[i] - level.v.at(v_half.radii[i])));
        }
    }
    return level;
}

} // namespace

std::string to_string(SphereChoice choice) {
    return choice == SphereChoice::bbg_R ? "bbg_R" : "sqrtK";
}

SphereChoice sphere_choice_from_string(const std::string& name) {
    if (name == "bbg_R") {
        return SphereChoice::bbg_R;
    }
    if (name == "sqrtK") {
        return SphereChoice::sqrtK;
    }
    throw InvalidInput("unknown sphere choice '" + name + "' (expected bbg_R or sqrtK)");
}

ModelSpace comparison_sphere(const ClosedSurface& surface, SphereChoice choice) {
    surface.validate();
    const double k = surface.curvature();
    if (choice == SphereChoice::sqrtK) {
        if (!(k > 0.0)) {
            throw InvalidInput("sqrtK comparison needs positive curvature");
        }
        return ModelSpace::sphere(1.0 / std::sqrt(k), 2);
    }
    return ModelSpace::sphere(comparison_radius({k, 2, surface.diameter()}), 2);
}

GeodesicBall symmetrized_ball(double vol_domain, double vol_M, const ModelSpace& sphere) {
    if (sphere.kind != SpaceKind::spherical) {
        throw InvalidInput("symmetrization target must be a round sphere");
    }
    if (!(vol_domain > 0.0) || !(vol_M > vol_domain) || !std::isfinite(vol_M)) {
        throw InvalidInput("symmetrized_ball needs 0 < Vol(Ω) < Vol(M)");
    }
    const double target = vol_domain / vol_M * sphere.total_volume();
    return GeodesicBall(sphere, cap_radius_for_volume(sphere, target));
}

bool ComparisonReport::all_pass() const {
    return std::all_of(pass.begin(), pass.end(), [](bool p) { return p; });
}

ComparisonReport moment_comparison_report(const ClosedSurface& surface, const MaskSpec& mask,
                                          int n_moments, SphereChoice choice,
                                          const ComparisonOptions& options) {
    check_options(options);
    if (n_moments < 1) {
        throw InvalidInput("comparison needs N >= 1");
    }
    const ModelSpace sphere = comparison_sphere(surface, choice);
    const ClosedSurface fine = surface.refined(options.refine);

    ComparisonReport report;
    report.domain = mask.describe();
    report.surface = describe_levels(surface, fine);
    report.choice = choice;
    report.sphere_radius = sphere.scale;

    std::vector<double> coarse_margin;
    std::vector<double> radial_tol(n_moments, 0.0);
    for (const ClosedSurface* level : {&surface, &fine}) {
        const GridDomain d = build_domain(*level, mask);
        const GridHierarchy grid = moment_hierarchy_grid(d, n_moments, options.solver);
        const GeodesicBall ball = symmetrized_ball(d.volume, level->volume(), sphere);
        const BallHierarchy cap = moment_hierarchy_ball(ball, n_moments, options.n_radii);
        std::vector<double> margin;
        std::vector<double> domain_ratio;
        std::vector<double> cap_ratio;
        for (int n = 1; n <= n_moments; ++n) {
            domain_ratio.push_back(grid.moments[n] / d.volume);
            cap_ratio.push_back(cap.moments[n] / ball.volume());
            margin.push_back(cap_ratio.back() - domain_ratio.back());
        }
        if (level == &surface) {
            coarse_margin = margin;
            continue;
        }
        const BallHierarchy half = moment_hierarchy_ball(ball, n_moments, options.n_radii / 2);
        for (int n = 1; n <= n_moments; ++n) {
            radial_tol[n - 1] = std::abs(half.moments[n] - cap.moments[n]) / ball.volume();
        }
        report.ball_radius = ball.radius;
        report.volume_domain = d.volume;
        report.volume_ball = ball.volume();
        report.domain_ratio = domain_ratio;
        report.cap_ratio = cap_ratio;
        report.margin = margin;
    }
    for (int i = 0; i < n_moments; ++i) {
        report.budget.push_back(std::abs(report.margin[i] - coarse_margin[i]) + radial_tol[i]);
        report.pass.push_back(report.margin[i] >= -report.budget[i]);
    }
    return report;
}

PdeComparisonReport pde_comparison_check(const ClosedSurface& surface, const MaskSpec& mask,
                                         const SourceFunction& f, SphereChoice choice,
                                         const ComparisonOptions& options) {
    check_options(options);
    const ModelSpace sphere = comparison_sphere(surface, choice);
    const PdeLevel coarse = pde_level(surface, mask, f, sphere, options, false);
    const PdeLevel fine = pde_level(surface.refined(options.refine), mask, f, sphere, options, true);

    PdeComparisonReport report;
    report.domain = mask.describe();
    report.choice = choice;
    report.ball_radius = fine.ball_radius;
    report.radii = fine.v.radii;
    report.u_star = fine.u_star.values;
    report.v = fine.v.values;
    report.max_violation = fine.max_violation;
    report.max_gap = fine.max_gap;
    report.resolution_delta = std::max(std::abs(fine.max_violation - coarse.max_violation),
                                       std::abs(fine.max_gap - coarse.max_gap));
    report.quantization = fine.quantization;
    report.radial_tolerance = fine.radial_tolerance;
    report.budget = report.resolution_delta + report.quantization + report.radial_tolerance;
    report.pass = report.max_violation <= report.budget;
    return report;
}

CheegerReport cheeger_bound_check(double cheeger, double vol_domain, double vol_manifold,
                                  const MomentSequence& moments, int k) {
    moments.validate();
    if (!(cheeger > 0.0) || !std::isfinite(cheeger)) {
        throw InvalidInput("Cheeger constant must be positive");
    }
    if (!(vol_domain > 0.0) || !(vol_manifold > 0.0)) {
        throw InvalidInput("volumes must be positive");
    }
    if (vol_domain > 0.5 * vol_manifold * (1.0 + 1e-12)) {
        throw InvalidInput("Cheeger bound needs Vol(Ω) <= Vol(M)/2");
    }
    if (k < 1 || 2 * k - 1 > static_cast<int>(moments.size())) {
        throw InvalidInput("Cheeger bound at order k needs T_1..T_{2k-1}");
    }
    CheegerReport report;
    report.cheeger = cheeger;
    report.volume = vol_domain;
    report.k = k;
    report.lhs = cheeger * cheeger;
    const double coefficient =
        numerics::factorial(k) * numerics::factorial(k) / numerics::factorial(2 * k - 1);
    report.rhs = vol_domain * coefficient * moments[2 * k - 1] / (moments[k] * moments[k]);
    report.slack = report.rhs - report.lhs;
    report.pass = report.slack >= 0.0;
    return report;
}

double ball_first_eigenvalue(const GeodesicBall& ball, std::size_t n_radii, double* error) {
    constexpr int kMoments = 24;
    const BallHierarchy full = moment_hierarchy_ball(ball, kMoments, n_radii);
    const BallHierarchy half = moment_hierarchy_ball(ball, kMoments, n_radii / 2);
    double noise = 0.0;
    for (int n = 1; n <= kMoments; ++n) {
        noise = std::max(noise, std::abs(full.moments[n] - half.moments[n]) / full.moments[n]);
    }
    RecoveryOptions recovery;
    recovery.input_rel_noise = noise;
    const RecoveryResult r = recover_spectrum(full.moments, 1, recovery);
    if (r.pairs.empty()) {
        throw ConvergenceError("no eigenvalue recoverable from the cap's moments", noise);
    }
    if (error) {
        *error = r.pairs.front().nu_error;
    }
    return r.pairs.front().nu;
}

FaberKrahnReport faber_krahn_check(const ClosedSurface& surface, const MaskSpec& mask,
                                   SphereChoice choice, const ComparisonOptions& options) {
    check_options(options);
    const ModelSpace sphere = comparison_sphere(surface, choice);
    const ClosedSurface fine = surface.refined(options.refine);

    FaberKrahnReport report;
    report.domain = mask.describe();
    report.choice = choice;
    const GridDomain dc = build_domain(surface, mask);
    const double coarse = dirichlet_eigenpairs(dc, 1).eigenvalues.front();
    const GridDomain df = build_domain(fine, mask);
    report.lambda_domain = dirichlet_eigenpairs(df, 1).eigenvalues.front();
    report.domain_delta = std::abs(report.lambda_domain - coarse);

    const GeodesicBall ball = symmetrized_ball(df.volume, fine.volume(), sphere);
    double err = 0.0;
    report.lambda_star = ball_first_eigenvalue(ball, options.n_radii, &err);
    report.star_error = err;
    report.budget = report.domain_delta + report.star_error;
    report.slack = report.lambda_domain - report.lambda_star;
    report.pass = report.lambda_star <= report.lambda_domain + report.budget;
    return report;
}

void write_summary(std::ostream& out, const ComparisonReport& report) {
    out << "domain  " << report.domain << '\n'
        << "surface " << report.surface << '\n'
        << "sphere  " << to_string(report.choice) << " R = " << std::setprecision(10)
        << report.sphere_radius << ", cap radius " << report.ball_radius << '\n';
    out << std::setw(3) << "n" << std::setw(18) << "T_n(Ω)/Vol" << std::setw(18) << "T_n(Ω*)/Vol"
        << std::setw(16) << "margin" << std::setw(12) << "budget" << "  result\n";
    for (std::size_t i = 0; i < report.margin.size(); ++i) {
        out << std::setw(3) << i + 1 << std::setw(18) << std::setprecision(10)
            << report.domain_ratio[i] << std::setw(18) << report.cap_ratio[i] << std::setw(16)
            << std::setprecision(6) << report.margin[i] << std::setw(12) << std::setprecision(3)
            << report.budget[i] << "  " << (report.pass[i] ? "pass" : "FAIL") << '\n';
    }
}

} // namespace exitmoments
