#pragma once

#include "exitmoments/moments.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace exitmoments {

enum class SurfaceKind { flat_torus, round_sphere };

std::string to_string(SurfaceKind kind);

/// A closed 2-D model surface with its structured grid.
///
/// Torus nodes sit at (i L_x/n_x, j L_y/n_y), both directions periodic.
/// Sphere nodes: north pole, then latitude rows θ_j = jπ/n_θ (j = 1..n_θ−1)
/// of n_φ nodes at φ_k = 2πk/n_φ, then south pole.
struct ClosedSurface {
    SurfaceKind kind = SurfaceKind::flat_torus;
    double lx = 1.0;
    double ly = 1.0;
    double radius = 1.0;
    int n1 = 0; // n_x or n_θ
    int n2 = 0; // n_y or n_φ

    static ClosedSurface flat_torus(double lx, double ly, int nx, int ny);
    static ClosedSurface round_sphere(double radius, int n_theta, int n_phi);

    void validate() const;
    std::size_t node_count() const;
    double volume() const;
    /// Sectional curvature K: 0 or 1/R².
    double curvature() const;
    /// diam(M): √(L_x² + L_y²)/2 or πR.
    double diameter() const;
    /// Same surface with both resolutions multiplied by `factor`.
    ClosedSurface refined(int factor) const;
    /// (x, y) or (θ, φ) of a node.
    std::array<double, 2> coordinates(std::size_t node) const;
    bool operator==(const ClosedSurface&) const = default;
};

/// A 0/1 interior mask tied to one grid.
struct ExplicitMask {
    ClosedSurface surface;
    std::vector<std::uint8_t> interior; // per node
};

/// Analytic or explicit description of Ω ⊂ M.
///
/// Coordinates are (x, y) on the torus and (θ, φ) on the sphere; caps use the
/// periodic (torus) or geodesic (sphere) distance. Rectangles are closed
/// coordinate boxes; a periodic side whose length reaches the period covers it.
/// Nodes on a boundary are exterior.
struct MaskSpec {
    enum class Kind { cap, rectangle, union_of, difference, explicit_mask };

    Kind kind = Kind::cap;
    std::array<double, 2> center{};
    double radius = 0.0;
    std::array<double, 4> bounds{}; // a_lo, a_hi, b_lo, b_hi
    std::vector<MaskSpec> parts;    // union: all; difference: parts[0] minus parts[1]
    std::shared_ptr<const ExplicitMask> mask;

    static MaskSpec cap(double c0, double c1, double radius);
    static MaskSpec rectangle(double a_lo, double a_hi, double b_lo, double b_hi);
    static MaskSpec unite(std::vector<MaskSpec> parts);
    static MaskSpec subtract(MaskSpec base, MaskSpec removed);
    static MaskSpec from_mask(ExplicitMask mask);

    /// Human-readable description, e.g. "cap(0, 0, 1.0471975511965976)".
    std::string describe() const;
};

/// Ω on the grid together with its Dirichlet stiffness matrix.
///
/// The discrete Laplacian is L = W⁻¹S with W the node volumes and S the
/// finite-volume stiffness on interior nodes (exterior neighbours carry u = 0),
/// so L is self-adjoint for ⟨u, v⟩_w = Σ w u v.
struct GridDomain {
    ClosedSurface surface;
    std::vector<std::uint8_t> interior_mask; // per node
    std::vector<double> node_volume;         // per node, Σ = Vol(M)
    std::vector<std::size_t> interior_nodes; // ascending node indices
    std::vector<std::size_t> ring_nodes;     // exterior nodes adjacent to the interior
    double volume = 0.0;                     // Σ interior w + ½ Σ ring w
    int components = 0;                      // connected components of the interior

    // Stiffness on interior unknowns (CSR, off-diagonal part stores conductances).
    std::vector<double> weight;           // node volume per unknown
    std::vector<double> diagonal;         // S_ii
    std::vector<double> boundary;         // conductance to exterior neighbours
    std::vector<std::size_t> row_offsets; // size n + 1
    std::vector<std::size_t> columns;
    std::vector<double> conductance; // S_ij = −conductance

    std::size_t size() const { return interior_nodes.size(); }
};

/// Values on interior nodes, in GridDomain::interior_nodes order.
using GridField = std::vector<double>;

GridDomain build_domain(const ClosedSurface& surface, const MaskSpec& mask);

/// S u.
GridField apply_stiffness(const GridDomain& domain, const GridField& u);
/// L u = W⁻¹ S u.
GridField apply_laplacian(const GridDomain& domain, const GridField& u);
/// ⟨u, v⟩_w.
double weighted_inner(const GridDomain& domain, const GridField& u, const GridField& v);
/// Σ w u over the interior.
double weighted_integral(const GridDomain& domain, const GridField& u);

struct SolverOptions {
    double rel_tol = 1e-12;    // target
    double accept_tol = 1e-10; // accepted when roundoff stalls the iteration above the target
    std::size_t max_iterations = 0; // 0: 20 × number of unknowns
};

struct SolveReport {
    std::size_t iterations = 0;
    double relative_residual = 0.0; // ‖Lu − f‖_w / ‖f‖_w
};

/// −Δu = rhs on Ω, u = 0 off Ω, by Jacobi-preconditioned conjugate gradients.
/// Throws ConvergenceError with the achieved residual at the iteration cap.
GridField poisson_solve(const GridDomain& domain, const GridField& rhs,
                        const SolverOptions& options = {}, SolveReport* report = nullptr);

struct GridHierarchy {
    MomentSequence moments;
    std::vector<GridField> fields; // u_1..u_N
};

GridHierarchy moment_hierarchy_grid(const GridDomain& domain, int n_moments,
                                    const SolverOptions& options = {});

struct EigenOptions {
    double residual_tol = 1e-8;   // ‖Lφ − λφ‖_w for ‖φ‖_w = 1
    double cluster_rel_tol = 1e-6; // eigenvalues this close share an eigenspace
    double spec_star_floor = 1e-10; // a² ≤ floor · Vol(Ω) is treated as zero
    int block_size = 4;
    std::uint64_t seed = 20240611;
};

struct EigenCluster {
    double nu = 0.0;       // mean eigenvalue of the cluster
    double a_sq = 0.0;     // Σ over the cluster of (Σ w φ)²
    std::size_t first = 0; // index range into eigenvalues
    std::size_t count = 0;
};

struct EigenDecomposition {
    std::vector<double> eigenvalues; // ascending
    std::vector<GridField> fields;   // weighted-orthonormal
    std::vector<double> residuals;   // ‖Lφ − λφ‖_w
    std::vector<double> projections; // Σ w φ
    std::vector<EigenCluster> clusters;
    SpectralData spectral; // clusters with a² above the floor
};

/// The m smallest Dirichlet eigenpairs of L. Throws ConvergenceError when a
/// pair misses the residual tolerance.
EigenDecomposition dirichlet_eigenpairs(const GridDomain& domain, int m,
                                        const EigenOptions& options = {});

/// Mask file: header line "flat_torus n_x n_y L_x L_y" or
/// "round_sphere n_θ n_φ R", then one text row per grid row of 0/1 entries.
/// Torus rows are y = const (n_y rows of n_x entries); sphere rows are
/// θ_0..θ_{n_θ} (n_θ + 1 rows of n_φ entries), pole rows uniform.
ExplicitMask read_mask(std::istream& in);
ExplicitMask read_mask_file(const std::string& path);
void write_mask(std::ostream& out, const ExplicitMask& mask);
/// The node mask of a built domain, as an explicit mask.
ExplicitMask domain_mask(const GridDomain& domain);

/// CSV dump: node, coordinate 1, coordinate 2, value (interior nodes only).
void write_field_csv(std::ostream& out, const GridDomain& domain, const GridField& field);

} // namespace exitmoments
