#pragma once

#include "exitmoments/grid_solver.hpp"
#include "exitmoments/model_space.hpp"
#include "exitmoments/moments.hpp"
#include "exitmoments/radial_solver.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace exitmoments {

/// Which model sphere Ω is compared against: the isoperimetric radius R from
/// (K, d, diam M), or S^d(1/√K) when K > 0.
enum class SphereChoice { bbg_R, sqrtK };

std::string to_string(SphereChoice choice);
SphereChoice sphere_choice_from_string(const std::string& name);

/// The comparison sphere for a grid surface.
ModelSpace comparison_sphere(const ClosedSurface& surface, SphereChoice choice);

/// The cap Ω* with Vol(Ω*)/Vol(S) = vol_domain/vol_M.
GeodesicBall symmetrized_ball(double vol_domain, double vol_M, const ModelSpace& sphere);

/// Every grid quantity is computed on `surface` (resolution h) and on its
/// refinement (h/refine); reported values are the fine ones and the budgets
/// hold the difference between the two.
struct ComparisonOptions {
    std::size_t n_radii = kDefaultRadialNodes;
    int refine = 2;
    SolverOptions solver;
};

struct ComparisonReport {
    std::string domain;  // mask description
    std::string surface; // e.g. "flat_torus 1x1 at 256x256 / 512x512"
    SphereChoice choice = SphereChoice::bbg_R;
    double sphere_radius = 0.0;
    double ball_radius = 0.0;
    double volume_domain = 0.0;
    double volume_ball = 0.0;
    std::vector<double> domain_ratio; // T_n(Ω)/Vol(Ω)
    std::vector<double> cap_ratio;    // T_n(Ω*)/Vol(Ω*)
    std::vector<double> margin;       // cap − domain
    std::vector<double> budget;       // discretization budget per n
    std::vector<bool> pass;           // margin ≥ −budget
    bool all_pass() const;
};

ComparisonReport moment_comparison_report(const ClosedSurface& surface, const MaskSpec& mask,
                                          int n_moments, SphereChoice choice,
                                          const ComparisonOptions& options = {});

/// f as a function of the node coordinates (x, y) or (θ, φ).
using SourceFunction = std::function<double(double, double)>;

struct PdeComparisonReport {
    std::string domain;
    SphereChoice choice = SphereChoice::bbg_R;
    double ball_radius = 0.0;
    std::vector<double> radii;
    std::vector<double> u_star; // symmetrized grid solution
    std::vector<double> v;      // radial solution with the symmetrized source
    double max_violation = 0.0; // max (u* − v)
    double max_gap = 0.0;       // max |u* − v|
    double resolution_delta = 0.0;
    double quantization = 0.0;  // largest jump of the rearranged step function
    double radial_tolerance = 0.0;
    double budget = 0.0;
    bool pass = false;          // max_violation ≤ budget
};

PdeComparisonReport pde_comparison_check(const ClosedSurface& surface, const MaskSpec& mask,
                                         const SourceFunction& f, SphereChoice choice,
                                         const ComparisonOptions& options = {});

struct CheegerReport {
    double cheeger = 0.0;
    double volume = 0.0;
    int k = 0;
    double lhs = 0.0; // C²
    double rhs = 0.0; // Vol (k!)²/(2k−1)! T_{2k−1}/T_k²
    double slack = 0.0;
    bool pass = false;
};

/// Requires Vol(Ω) ≤ Vol(M)/2 and T_1..T_{2k−1}.
CheegerReport cheeger_bound_check(double cheeger, double vol_domain, double vol_manifold,
                                  const MomentSequence& moments, int k);

struct FaberKrahnReport {
    std::string domain;
    SphereChoice choice = SphereChoice::bbg_R;
    double lambda_domain = 0.0;  // λ_1(Ω), fine grid
    double lambda_star = 0.0;    // λ_1(Ω*) from the cap's moments
    double domain_delta = 0.0;   // |λ_1 fine − λ_1 coarse|
    double star_error = 0.0;     // recovery error estimate plus radial tolerance
    double budget = 0.0;
    double slack = 0.0;          // λ_1(Ω) − λ_1(Ω*)
    bool pass = false;
};

FaberKrahnReport faber_krahn_check(const ClosedSurface& surface, const MaskSpec& mask,
                                   SphereChoice choice, const ComparisonOptions& options = {});

/// λ_1 of a geodesic ball from its radial moment sequence (N = 24).
double ball_first_eigenvalue(const GeodesicBall& ball, std::size_t n_radii, double* error = nullptr);

/// Fixed-width table of a report.
void write_summary(std::ostream& out, const ComparisonReport& report);

} // namespace exitmoments
