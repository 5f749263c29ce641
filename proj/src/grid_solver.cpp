#include "exitmoments/grid_solver.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace exitmoments {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Grid geometry

struct SphereGrid {
    int n_theta;
    int n_phi;
    double h;     // latitude spacing
    double h_phi; // longitude spacing

    explicit SphereGrid(const ClosedSurface& s)
        : n_theta(s.n1), n_phi(s.n2), h(kPi / s.n1), h_phi(2.0 * kPi / s.n2) {}

    std::size_t north() const { return 0; }
    std::size_t south() const { return 1 + static_cast<std::size_t>(n_theta - 1) * n_phi; }
    std::size_t node(int row, int k) const {
        if (row == 0) {
            return north();
        }
        if (row == n_theta) {
            return south();
        }
        const int kk = ((k % n_phi) + n_phi) % n_phi;
        return 1 + static_cast<std::size_t>(row - 1) * n_phi + kk;
    }
    int row(std::size_t node) const {
        if (node == north()) {
            return 0;
        }
        if (node == south()) {
            return n_theta;
        }
        return 1 + static_cast<int>((node - 1) / n_phi);
    }
    int column(std::size_t node) const {
        if (node == north() || node == south()) {
            return 0;
        }
        return static_cast<int>((node - 1) % n_phi);
    }
    double pole_conductance() const { return std::sin(0.5 * h) * h_phi / h; }
};

// Calls f(neighbor, conductance) for each stencil neighbour of `node`.
template <class F>
void for_each_neighbor(const ClosedSurface& s, std::size_t node, F&& f) {
    if (s.kind == SurfaceKind::flat_torus) {
        const std::size_t nx = s.n1;
        const std::size_t ny = s.n2;
        const double hx = s.lx / s.n1;
        const double hy = s.ly / s.n2;
        const std::size_t i = node % nx;
        const std::size_t j = node / nx;
        f(j * nx + (i + 1) % nx, hy / hx);
        f(j * nx + (i + nx - 1) % nx, hy / hx);
        f(((j + 1) % ny) * nx + i, hx / hy);
        f(((j + ny - 1) % ny) * nx + i, hx / hy);
        return;
    }
    const SphereGrid g(s);
    if (node == g.north() || node == g.south()) {
        const int row = node == g.north() ? 1 : g.n_theta - 1;
        for (int k = 0; k < g.n_phi; ++k) {
            f(g.node(row, k), g.pole_conductance());
        }
        return;
    }
    const int j = g.row(node);
    const int k = g.column(node);
    const double theta = j * g.h;
    const double along = g.h / (std::sin(theta) * g.h_phi);
    f(g.node(j, k + 1), along);
    f(g.node(j, k - 1), along);
    f(g.node(j - 1, k), std::sin(theta - 0.5 * g.h) * g.h_phi / g.h);
    f(g.node(j + 1, k), std::sin(theta + 0.5 * g.h) * g.h_phi / g.h);
}

std::vector<double> node_volumes(const ClosedSurface& s) {
    std::vector<double> w(s.node_count());
    if (s.kind == SurfaceKind::flat_torus) {
        std::fill(w.begin(), w.end(), (s.lx / s.n1) * (s.ly / s.n2));
        return w;
    }
    const SphereGrid g(s);
    const double r2 = s.radius * s.radius;
    const double cap = 2.0 * kPi * r2 * (1.0 - std::cos(0.5 * g.h));
    w[g.north()] = cap;
    w[g.south()] = cap;
    for (int j = 1; j < g.n_theta; ++j) {
        const double band = r2 * g.h_phi * 2.0 * std::sin(j * g.h) * std::sin(0.5 * g.h);
        for (int k = 0; k < g.n_phi; ++k) {
            w[g.node(j, k)] = band;
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Mask evaluation

double wrap(double v, double period) {
    double t = std::fmod(v, period);
    if (t < 0.0) {
        t += period;
    }
    return t;
}

// Signed containment in [lo, hi]: strict excludes a tol-neighbourhood of the
// ends, closed includes one.
bool in_interval(double v, double lo, double hi, double tol, bool strict) {
    return strict ? (v > lo + tol && v < hi - tol) : (v >= lo - tol && v <= hi + tol);
}

bool in_periodic_interval(double v, double lo, double hi, double period, double tol,
                          bool strict) {
    if (hi - lo >= period - tol) {
        return true;
    }
    const double t = wrap(v - lo, period);
    if (strict) {
        return t > tol && t < (hi - lo) - tol;
    }
    return t <= (hi - lo) + tol || t >= period - tol;
}

double geodesic_angle(double t1, double p1, double t2, double p2) {
    // Angle between unit vectors, via atan2 for accuracy at small and large angles.
    const double x1 = std::sin(t1) * std::cos(p1), y1 = std::sin(t1) * std::sin(p1), z1 = std::cos(t1);
    const double x2 = std::sin(t2) * std::cos(p2), y2 = std::sin(t2) * std::sin(p2), z2 = std::cos(t2);
    const double cx = y1 * z2 - z1 * y2, cy = z1 * x2 - x1 * z2, cz = x1 * y2 - y1 * x2;
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), x1 * x2 + y1 * y2 + z1 * z2);
}

struct MaskContext {
    const ClosedSurface& surface;
    double tol; // coordinate tolerance (length on the torus, angle on the sphere)
};

bool contains(const MaskSpec& spec, const MaskContext& ctx, std::size_t node, bool strict) {
    const ClosedSurface& s = ctx.surface;
    const auto c = s.coordinates(node);
    const bool torus = s.kind == SurfaceKind::flat_torus;
    switch (spec.kind) {
    case MaskSpec::Kind::cap: {
        double dist;
        double radius;
        if (torus) {
            double dx = c[0] - spec.center[0];
            double dy = c[1] - spec.center[1];
            dx -= s.lx * std::round(dx / s.lx);
            dy -= s.ly * std::round(dy / s.ly);
            dist = std::hypot(dx, dy);
            radius = spec.radius;
        } else {
            dist = geodesic_angle(c[0], c[1], spec.center[0], spec.center[1]);
            radius = spec.radius / s.radius;
        }
        return strict ? dist < radius - ctx.tol : dist <= radius + ctx.tol;
    }
    case MaskSpec::Kind::rectangle: {
        const auto& b = spec.bounds;
        if (torus) {
            return in_periodic_interval(c[0], b[0], b[1], s.lx, ctx.tol, strict) &&
                   in_periodic_interval(c[1], b[2], b[3], s.ly, ctx.tol, strict);
        }
        return in_interval(c[0], b[0], b[1], ctx.tol, strict) &&
               in_periodic_interval(c[1], b[2], b[3], 2.0 * kPi, ctx.tol, strict);
    }
    case MaskSpec::Kind::union_of:
        return std::any_of(spec.parts.begin(), spec.parts.end(),
                           [&](const MaskSpec& p) { return contains(p, ctx, node, strict); });
    case MaskSpec::Kind::difference:
        return contains(spec.parts[0], ctx, node, strict) &&
               !contains(spec.parts[1], ctx, node, !strict);
    case MaskSpec::Kind::explicit_mask:
        return spec.mask->interior[node] != 0;
    }
    return false;
}

void check_mask_spec(const MaskSpec& spec, const ClosedSurface& surface) {
    switch (spec.kind) {
    case MaskSpec::Kind::cap:
        if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
            throw InvalidInput("cap radius must be positive and finite");
        }
        break;
    case MaskSpec::Kind::rectangle:
        if (!(spec.bounds[1] > spec.bounds[0]) || !(spec.bounds[3] > spec.bounds[2])) {
            throw InvalidInput("rectangle bounds must satisfy lo < hi in both coordinates");
        }
        break;
    case MaskSpec::Kind::union_of:
        if (spec.parts.empty()) {
            throw InvalidInput("union of no masks");
        }
        for (const auto& p : spec.parts) {
            check_mask_spec(p, surface);
        }
        break;
    case MaskSpec::Kind::difference:
        if (spec.parts.size() != 2) {
            throw InvalidInput("difference needs exactly two masks");
        }
        check_mask_spec(spec.parts[0], surface);
        check_mask_spec(spec.parts[1], surface);
        break;
    case MaskSpec::Kind::explicit_mask:
        if (!spec.mask || !(spec.mask->surface == surface)) {
            throw InvalidInput("explicit mask was made for a different grid");
        }
        if (spec.mask->interior.size() != surface.node_count()) {
            throw InvalidInput("explicit mask size does not match the grid");
        }
        break;
    }
}

std::string format_number(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// Dense helpers for the eigen solver

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Orthonormalizes column `j` of V against columns [0, j) (two Gram-Schmidt
// passes); returns its norm before normalization.
double orthogonalize_column(Matrix& V, Eigen::Index j) {
    const double before = V.col(j).norm();
    for (int pass = 0; pass < 2; ++pass) {
        if (j > 0) {
            const Vector c = V.leftCols(j).transpose() * V.col(j);
            V.col(j) -= V.leftCols(j) * c;
        }
    }
    const double after = V.col(j).norm();
    if (after > 1e-10 * before && after > 0.0) {
        V.col(j) /= after;
    }
    return after / (before > 0.0 ? before : 1.0);
}

} // namespace

// ---------------------------------------------------------------------------
// ClosedSurface

std::string to_string(SurfaceKind kind) {
    return kind == SurfaceKind::flat_torus ? "flat_torus" : "round_sphere";
}

ClosedSurface ClosedSurface::flat_torus(double lx, double ly, int nx, int ny) {
    ClosedSurface s;
    s.kind = SurfaceKind::flat_torus;
    s.lx = lx;
    s.ly = ly;
    s.n1 = nx;
    s.n2 = ny;
    s.validate();
    return s;
}

ClosedSurface ClosedSurface::round_sphere(double radius, int n_theta, int n_phi) {
    ClosedSurface s;
    s.kind = SurfaceKind::round_sphere;
    s.radius = radius;
    s.n1 = n_theta;
    s.n2 = n_phi;
    s.validate();
    return s;
}

void ClosedSurface::validate() const {
    if (n1 < 16 || n2 < 16) {
        throw InvalidInput("grid resolutions must be at least 16");
    }
    if (kind == SurfaceKind::flat_torus) {
        if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
            throw InvalidInput("torus side lengths must be positive and finite");
        }
    } else if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidInput("sphere radius must be positive and finite");
    }
}

std::size_t ClosedSurface::node_count() const {
    if (kind == SurfaceKind::flat_torus) {
        return static_cast<std::size_t>(n1) * n2;
    }
    return 2 + static_cast<std::size_t>(n1 - 1) * n2;
}

double ClosedSurface::volume() const {
    return kind == SurfaceKind::flat_torus ? lx * ly : 4.0 * kPi * radius * radius;
}

double ClosedSurface::curvature() const {
    return kind == SurfaceKind::flat_torus ? 0.0 : 1.0 / (radius * radius);
}

double ClosedSurface::diameter() const {
    return kind == SurfaceKind::flat_torus ? 0.5 * std::hypot(lx, ly) : kPi * radius;
}

ClosedSurface ClosedSurface::refined(int factor) const {
    if (factor < 1) {
        throw InvalidInput("refinement factor must be >= 1");
    }
    ClosedSurface s = *this;
    s.n1 *= factor;
    s.n2 *= factor;
    return s;
}

std::array<double, 2> ClosedSurface::coordinates(std::size_t node) const {
    if (kind == SurfaceKind::flat_torus) {
        const std::size_t i = node % static_cast<std::size_t>(n1);
        const std::size_t j = node / static_cast<std::size_t>(n1);
        return {lx * static_cast<double>(i) / n1, ly * static_cast<double>(j) / n2};
    }
    const SphereGrid g(*this);
    return {g.row(node) * g.h, g.column(node) * g.h_phi};
}

// ---------------------------------------------------------------------------
// MaskSpec

MaskSpec MaskSpec::cap(double c0, double c1, double radius) {
    MaskSpec m;
    m.kind = Kind::cap;
    m.center = {c0, c1};
    m.radius = radius;
    return m;
}

MaskSpec MaskSpec::rectangle(double a_lo, double a_hi, double b_lo, double b_hi) {
    MaskSpec m;
    m.kind = Kind::rectangle;
    m.bounds = {a_lo, a_hi, b_lo, b_hi};
    return m;
}

MaskSpec MaskSpec::unite(std::vector<MaskSpec> parts) {
    MaskSpec m;
    m.kind = Kind::union_of;
    m.parts = std::move(parts);
    return m;
}

MaskSpec MaskSpec::subtract(MaskSpec base, MaskSpec removed) {
    MaskSpec m;
    m.kind = Kind::difference;
    m.parts = {std::move(base), std::move(removed)};
    return m;
}

MaskSpec MaskSpec::from_mask(ExplicitMask mask) {
    MaskSpec m;
    m.kind = Kind::explicit_mask;
    m.mask = std::make_shared<const ExplicitMask>(std::move(mask));
    return m;
}

std::string MaskSpec::describe() const {
    switch (kind) {
    case Kind::cap:
        return "cap(" + format_number(center[0]) + ", " + format_number(center[1]) + ", " +
               format_number(radius) + ")";
    case Kind::rectangle:
        return "rectangle(" + format_number(bounds[0]) + ", " + format_number(bounds[1]) + ", " +
               format_number(bounds[2]) + ", " + format_number(bounds[3]) + ")";
    case Kind::union_of: {
        std::string out = "union(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            out += (i ? ", " : "") + parts[i].describe();
        }
        return out + ")";
    }
    case Kind::difference:
        return "difference(" + parts[0].describe() + ", " + parts[1].describe() + ")";
    case Kind::explicit_mask:
        return "mask(" + to_string(mask->surface.kind) + ", " + std::to_string(mask->surface.n1) +
               "x" + std::to_string(mask->surface.n2) + ")";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Domain construction

GridDomain build_domain(const ClosedSurface& surface, const MaskSpec& spec) {
    surface.validate();
    check_mask_spec(spec, surface);

    GridDomain d;
    d.surface = surface;
    d.node_volume = node_volumes(surface);
    const std::size_t total = surface.node_count();

    const double h = surface.kind == SurfaceKind::flat_torus
                         ? std::min(surface.lx / surface.n1, surface.ly / surface.n2)
                         : kPi / surface.n1;
    const MaskContext ctx{surface, 1e-9 * h};
    d.interior_mask.assign(total, 0);
    for (std::size_t node = 0; node < total; ++node) {
        d.interior_mask[node] = contains(spec, ctx, node, true) ? 1 : 0;
    }

    if (surface.kind == SurfaceKind::round_sphere) {
        const SphereGrid g(surface);
        const bool pole_inside = d.interior_mask[g.north()] || d.interior_mask[g.south()];
        if (pole_inside) {
            for (int j = 1; j < g.n_theta; ++j) {
                const auto first = d.interior_mask[g.node(j, 0)];
                for (int k = 1; k < g.n_phi; ++k) {
                    if (d.interior_mask[g.node(j, k)] != first) {
                        throw InvalidInput(
                            "domain contains a sphere pole but is not a cap centered there");
                    }
                }
            }
        }
    }

    std::vector<std::size_t> unknown(total, kNone);
    for (std::size_t node = 0; node < total; ++node) {
        if (d.interior_mask[node]) {
            unknown[node] = d.interior_nodes.size();
            d.interior_nodes.push_back(node);
        }
    }
    if (d.interior_nodes.empty()) {
        throw InvalidInput("domain interior is empty on this grid");
    }
    if (d.interior_nodes.size() == total) {
        throw InvalidInput("domain covers the whole surface (complement is empty)");
    }

    std::vector<std::uint8_t> in_ring(total, 0);
    const std::size_t n = d.interior_nodes.size();
    d.weight.resize(n);
    d.diagonal.assign(n, 0.0);
    d.boundary.assign(n, 0.0);
    d.row_offsets.assign(n + 1, 0);
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t node = d.interior_nodes[row];
        d.weight[row] = d.node_volume[node];
        for_each_neighbor(surface, node, [&](std::size_t nb, double c) {
            d.diagonal[row] += c;
            if (unknown[nb] != kNone) {
                d.columns.push_back(unknown[nb]);
                d.conductance.push_back(c);
            } else {
                d.boundary[row] += c;
                in_ring[nb] = 1;
            }
        });
        d.row_offsets[row + 1] = d.columns.size();
    }
    numerics::CompensatedSum volume;
    for (std::size_t node = 0; node < total; ++node) {
        if (d.interior_mask[node]) {
            volume += d.node_volume[node];
        } else if (in_ring[node]) {
            d.ring_nodes.push_back(node);
            volume += 0.5 * d.node_volume[node];
        }
    }
    d.volume = volume.value();

    // Connectivity audit.
    std::vector<int> label(n, -1);
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (label[seed] >= 0) {
            continue;
        }
        label[seed] = d.components;
        stack.push_back(seed);
        while (!stack.empty()) {
            const std::size_t r = stack.back();
            stack.pop_back();
            for (std::size_t e = d.row_offsets[r]; e < d.row_offsets[r + 1]; ++e) {
                if (label[d.columns[e]] < 0) {
                    label[d.columns[e]] = d.components;
                    stack.push_back(d.columns[e]);
                }
            }
        }
        ++d.components;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Operators

GridField apply_stiffness(const GridDomain& d, const GridField& u) {
    if (u.size() != d.size()) {
        throw InvalidInput("field size does not match the domain");
    }
    GridField out(d.size());
    // Flux form Σ c (u_i − u_j): differences of nearby values cancel exactly,
    // which keeps the weighted residual floor low next to the poles.
    for (std::size_t r = 0; r < d.size(); ++r) {
        const double ur = u[r];
        double acc = 0.0;
        for (std::size_t e = d.row_offsets[r]; e < d.row_offsets[r + 1]; ++e) {
            acc += d.conductance[e] * (ur - u[d.columns[e]]);
        }
        out[r] = acc + d.boundary[r] * ur;
    }
    return out;
}

GridField apply_laplacian(const GridDomain& d, const GridField& u) {
    GridField out = apply_stiffness(d, u);
    for (std::size_t r = 0; r < d.size(); ++r) {
        out[r] /= d.weight[r];
    }
    return out;
}

double weighted_inner(const GridDomain& d, const GridField& u, const GridField& v) {
    if (u.size() != d.size() || v.size() != d.size()) {
        throw InvalidInput("field size does not match the domain");
    }
    numerics::CompensatedSum sum;
    for (std::size_t r = 0; r < d.size(); ++r) {
        sum += d.weight[r] * u[r] * v[r];
    }
    return sum.value();
}

double weighted_integral(const GridDomain& d, const GridField& u) {
    if (u.size() != d.size()) {
        throw InvalidInput("field size does not match the domain");
    }
    numerics::CompensatedSum sum;
    for (std::size_t r = 0; r < d.size(); ++r) {
        sum += d.weight[r] * u[r];
    }
    return sum.value();
}

// ---------------------------------------------------------------------------
// Conjugate gradients

GridField poisson_solve(const GridDomain& d, const GridField& rhs, const SolverOptions& options,
                        SolveReport* report) {
    const std::size_t n = d.size();
    if (rhs.size() != n) {
        throw InvalidInput("right-hand side size does not match the domain");
    }
    bool nonnegative = true;
    for (double f : rhs) {
        if (!std::isfinite(f)) {
            throw InvalidInput("right-hand side must be finite");
        }
        nonnegative = nonnegative && f >= 0.0;
    }
    const std::size_t cap = options.max_iterations ? options.max_iterations : 20 * n + 100;

    // S u = W f; the weighted residual of L u = f is Σ r²/w.
    std::vector<double> b(n);
    double rhs_norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = d.weight[i] * rhs[i];
        rhs_norm2 += d.weight[i] * rhs[i] * rhs[i];
    }
    GridField u(n, 0.0);
    if (report) {
        *report = {};
    }
    if (rhs_norm2 == 0.0) {
        return u;
    }
    const double rhs_norm = std::sqrt(rhs_norm2);
    const auto weighted_norm = [&](const std::vector<double>& r) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += r[i] * r[i] / d.weight[i];
        }
        return std::sqrt(s);
    };

    std::vector<double> r = b;
    std::vector<double> z(n), p(n), q(n);
    std::size_t it = 0;
    double relative = 1.0;
    for (int restart = 0;; ++restart) {
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / d.diagonal[i];
        }
        p = z;
        double rz = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rz += r[i] * z[i];
        }
        bool converged = false;
        while (it < cap) {
            q = apply_stiffness(d, p);
            double pq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                pq += p[i] * q[i];
            }
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                u[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            ++it;
            relative = weighted_norm(r) / rhs_norm;
            if (relative <= options.rel_tol) {
                converged = true;
                break;
            }
            double rz_next = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = r[i] / d.diagonal[i];
                rz_next += r[i] * z[i];
            }
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = z[i] + beta * p[i];
            }
        }
        // The recurrence residual drifts; confirm with the true one and restart if needed.
        const GridField su = apply_stiffness(d, u);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = b[i] - su[i];
        }
        relative = weighted_norm(r) / rhs_norm;
        if (relative <= options.rel_tol) {
            break;
        }
        if (converged && restart < 2) {
            continue;
        }
        if (relative <= options.accept_tol) {
            break;
        }
        throw ConvergenceError("conjugate gradients stopped above the residual tolerance", relative);
    }
    if (nonnegative) {
        // Discrete maximum principle: negative entries are CG roundoff.
        for (double& v : u) {
            v = std::max(v, 0.0);
        }
    }
    if (report) {
        report->iterations = it;
        report->relative_residual = relative;
    }
    return u;
}

GridHierarchy moment_hierarchy_grid(const GridDomain& d, int n_moments,
                                    const SolverOptions& options) {
    if (n_moments < 1) {
        throw InvalidInput("moment hierarchy needs N >= 1");
    }
    GridHierarchy h;
    h.moments.volume = d.volume;
    GridField previous(d.size(), 1.0);
    for (int k = 1; k <= n_moments; ++k) {
        GridField rhs(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            rhs[i] = k * previous[i];
        }
        GridField u = poisson_solve(d, rhs, options);
        h.moments.moments.push_back(weighted_integral(d, u));
        previous = u;
        h.fields.push_back(std::move(u));
    }
    return h;
}

// ---------------------------------------------------------------------------
// Eigenpairs

EigenDecomposition dirichlet_eigenpairs(const GridDomain& d, int m_in,
                                        const EigenOptions& options) {
    const auto n = static_cast<Eigen::Index>(d.size());
    if (m_in < 1) {
        throw InvalidInput("need at least one eigenpair");
    }
    const auto m = static_cast<Eigen::Index>(m_in);
    if (m > n) {
        throw InvalidInput("more eigenpairs requested than interior nodes");
    }

    Vector sqrt_w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sqrt_w[i] = std::sqrt(d.weight[i]);
    }
    // A = W^{-1/2} S W^{-1/2}, symmetric with the eigenvalues of L.
    const auto apply_a = [&](const Vector& y) {
        GridField x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x[i] = y[i] / sqrt_w[i];
        }
        const GridField sx = apply_stiffness(d, x);
        Vector out(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out[i] = sx[i] / sqrt_w[i];
        }
        return out;
    };

    Matrix ritz_vectors; // n × m, orthonormal
    Vector ritz_values;  // eigenvalues of A, ascending

    if (n <= 600) {
        Matrix dense(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            dense.col(j) = apply_a(Vector::Unit(n, j));
        }
        const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (dense + dense.transpose()));
        ritz_values = es.eigenvalues().head(m);
        ritz_vectors = es.eigenvectors().leftCols(m);
    } else {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(d.columns.size() + d.size());
        for (std::size_t r = 0; r < d.size(); ++r) {
            triplets.emplace_back(r, r, d.diagonal[r]);
            for (std::size_t e = d.row_offsets[r]; e < d.row_offsets[r + 1]; ++e) {
                triplets.emplace_back(r, d.columns[e], -d.conductance[e]);
            }
        }
        Eigen::SparseMatrix<double> stiffness(n, n);
        stiffness.setFromTriplets(triplets.begin(), triplets.end());
        const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(stiffness);
        if (factor.info() != Eigen::Success) {
            throw ConvergenceError("stiffness factorization failed", 0.0);
        }
        // A⁻¹ y = W^{1/2} S⁻¹ W^{1/2} y.
        const auto apply_inverse = [&](const Vector& y) -> Vector {
            const Vector x = factor.solve(Vector(sqrt_w.cwiseProduct(y)));
            return sqrt_w.cwiseProduct(x);
        };

        const Eigen::Index b = std::min<Eigen::Index>(std::max(options.block_size, 1), n);
        const Eigen::Index k_max = std::min<Eigen::Index>(n, std::max<Eigen::Index>(40 * m + 200, 400));
        Matrix V(n, std::min<Eigen::Index>(n, 4 * m + 8 * b + 64));
        Matrix H = Matrix::Zero(k_max + b + 1, k_max + b + 1);

        // Start block: the constant function, then seeded Gaussian vectors.
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> normal;
        Eigen::Index basis = 0;
        for (Eigen::Index c = 0; c < b; ++c) {
            if (c == 0) {
                V.col(basis) = sqrt_w;
            } else {
                for (Eigen::Index i = 0; i < n; ++i) {
                    V(i, basis) = normal(rng);
                }
            }
            if (orthogonalize_column(V, basis) > 1e-10) {
                ++basis;
            }
        }

        const double inverse_tol = 1e-3 * options.residual_tol;
        bool done = false;
        Eigen::Index steps = 0;
        for (Eigen::Index j = 0; j < k_max && j < basis && !done; ++j) {
            Vector z = apply_inverse(V.col(j));
            const double z_norm = z.norm();
            Vector coeff = Vector::Zero(basis);
            for (int pass = 0; pass < 2; ++pass) {
                const Vector c = V.leftCols(basis).transpose() * z;
                z -= V.leftCols(basis) * c;
                coeff += c;
            }
            H.block(0, j, basis, 1) = coeff;
            const double norm = z.norm();
            if (norm > 1e-12 * z_norm && basis < n && basis < k_max + b) {
                if (basis >= V.cols()) {
                    V.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(n, 2 * V.cols()));
                }
                V.col(basis) = z / norm;
                H(basis, j) = norm;
                ++basis;
            }
            steps = j + 1;

            const bool check = steps >= m + b && (steps % (2 * b) == 0 || steps == basis ||
                                                  steps == k_max);
            if (!check) {
                continue;
            }
            const Matrix T = H.topLeftCorner(steps, steps);
            const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (T + T.transpose()));
            // Largest θ of A⁻¹ are the smallest λ; the tail rows give the residuals.
            const Matrix tail = H.block(steps, 0, basis - steps, steps);
            bool all = true;
            for (Eigen::Index c = 0; c < m && all; ++c) {
                const Eigen::Index col = steps - 1 - c;
                const double theta = es.eigenvalues()[col];
                const double res = basis > steps ? (tail * es.eigenvectors().col(col)).norm() : 0.0;
                // ‖A y − λ y‖ ≈ λ² ‖A⁻¹y − θ y‖ for the converged low end.
                all = theta > 0.0 && res / (theta * theta) <= inverse_tol;
            }
            if (all || steps == basis || steps == k_max) {
                ritz_values.resize(m);
                ritz_vectors.resize(n, m);
                for (Eigen::Index c = 0; c < m; ++c) {
                    const Eigen::Index col = steps - 1 - c;
                    ritz_values[c] = 1.0 / es.eigenvalues()[col];
                    ritz_vectors.col(c) = V.leftCols(steps) * es.eigenvectors().col(col);
                }
                done = true;
            }
        }
        if (!done) {
            throw ConvergenceError("Lanczos basis exhausted before convergence", 0.0);
        }

        // Block inverse iteration + Rayleigh-Ritz sweeps until every residual passes.
        for (int sweep = 0; sweep < 6; ++sweep) {
            Matrix AY(n, m);
            for (Eigen::Index c = 0; c < m; ++c) {
                AY.col(c) = apply_a(ritz_vectors.col(c));
            }
            double worst = 0.0;
            for (Eigen::Index c = 0; c < m; ++c) {
                worst = std::max(worst, (AY.col(c) - ritz_values[c] * ritz_vectors.col(c)).norm());
            }
            if (worst <= 0.1 * options.residual_tol && sweep >= 1) {
                break;
            }
            Matrix Y(n, m);
            for (Eigen::Index c = 0; c < m; ++c) {
                Y.col(c) = apply_inverse(ritz_vectors.col(c));
            }
            for (Eigen::Index c = 0; c < m; ++c) {
                orthogonalize_column(Y, c);
            }
            Matrix AYn(n, m);
            for (Eigen::Index c = 0; c < m; ++c) {
                AYn.col(c) = apply_a(Y.col(c));
            }
            const Matrix G = Y.transpose() * AYn;
            const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G + G.transpose()));
            ritz_values = es.eigenvalues();
            ritz_vectors = Y * es.eigenvectors();
        }
    }

    EigenDecomposition out;
    std::vector<Eigen::Index> order(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        order[c] = c;
    }
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return ritz_values[a] < ritz_values[b]; });
    double worst = 0.0;
    for (Eigen::Index idx : order) {
        Vector y = ritz_vectors.col(idx);
        y /= y.norm();
        double projection = y.dot(sqrt_w);
        // Deterministic sign: positive mean, else positive first large entry.
        double sign_ref = projection;
        if (std::abs(projection) <= 1e-12 * std::sqrt(d.volume)) {
            Eigen::Index at;
            y.cwiseAbs().maxCoeff(&at);
            sign_ref = y[at];
        }
        if (sign_ref < 0.0) {
            y = -y;
            projection = -projection;
        }
        const double lambda = y.dot(apply_a(y));
        const double residual = (apply_a(y) - lambda * y).norm();
        worst = std::max(worst, residual);
        GridField phi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            phi[i] = y[i] / sqrt_w[i];
        }
        out.eigenvalues.push_back(lambda);
        out.residuals.push_back(residual);
        out.projections.push_back(projection);
        out.fields.push_back(std::move(phi));
    }
    if (worst > options.residual_tol) {
        throw ConvergenceError("eigenpair residual above tolerance", worst);
    }

    for (std::size_t i = 0; i < out.eigenvalues.size();) {
        EigenCluster c;
        c.first = i;
        const double start = out.eigenvalues[i];
        numerics::CompensatedSum nu, a_sq;
        while (i < out.eigenvalues.size() &&
               out.eigenvalues[i] - start <= options.cluster_rel_tol * std::abs(start)) {
            nu += out.eigenvalues[i];
            a_sq += out.projections[i] * out.projections[i];
            ++c.count;
            ++i;
        }
        c.nu = nu.value() / static_cast<double>(c.count);
        c.a_sq = a_sq.value();
        out.clusters.push_back(c);
    }
    out.spectral.volume = d.volume;
    for (const auto& c : out.clusters) {
        if (c.a_sq > options.spec_star_floor * d.volume) {
            out.spectral.pairs.push_back({c.nu, c.a_sq});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Files

ExplicitMask read_mask(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw InvalidInput("mask file: missing header");
    }
    std::istringstream hs(header);
    std::string kind;
    hs >> kind;
    ExplicitMask mask;
    int rows = 0;
    int cols = 0;
    if (kind == "flat_torus") {
        int nx = 0, ny = 0;
        double lx = 0, ly = 0;
        if (!(hs >> nx >> ny >> lx >> ly)) {
            throw InvalidInput("mask file: header must be 'flat_torus n_x n_y L_x L_y'");
        }
        mask.surface = ClosedSurface::flat_torus(lx, ly, nx, ny);
        rows = ny;
        cols = nx;
    } else if (kind == "round_sphere") {
        int nt = 0, np = 0;
        double r = 0;
        if (!(hs >> nt >> np >> r)) {
            throw InvalidInput("mask file: header must be 'round_sphere n_theta n_phi R'");
        }
        mask.surface = ClosedSurface::round_sphere(r, nt, np);
        rows = nt + 1;
        cols = np;
    } else {
        throw InvalidInput("mask file: unknown surface kind '" + kind + "'");
    }
    std::string extra;
    if (hs >> extra) {
        throw InvalidInput("mask file: trailing header fields");
    }

    std::vector<std::uint8_t> grid;
    grid.reserve(static_cast<std::size_t>(rows) * cols);
    char ch;
    while (in.get(ch)) {
        if (ch == '0' || ch == '1') {
            grid.push_back(ch == '1');
        } else if (!std::isspace(static_cast<unsigned char>(ch)) && ch != ',') {
            throw InvalidInput(std::string("mask file: unexpected character '") + ch + "'");
        }
    }
    if (grid.size() != static_cast<std::size_t>(rows) * cols) {
        throw InvalidInput("mask file: expected " + std::to_string(rows * cols) + " entries, found " +
                           std::to_string(grid.size()));
    }
    if (mask.surface.kind == SurfaceKind::flat_torus) {
        mask.interior = std::move(grid);
        return mask;
    }
    const SphereGrid g(mask.surface);
    mask.interior.assign(mask.surface.node_count(), 0);
    for (int j = 0; j <= g.n_theta; ++j) {
        for (int k = 0; k < g.n_phi; ++k) {
            const auto v = grid[static_cast<std::size_t>(j) * cols + k];
            if ((j == 0 || j == g.n_theta) && v != grid[static_cast<std::size_t>(j) * cols]) {
                throw InvalidInput("mask file: pole rows must be uniform");
            }
            mask.interior[g.node(j, k)] = v;
        }
    }
    return mask;
}

ExplicitMask read_mask_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open mask file '" + path + "'");
    }
    return read_mask(in);
}

void write_mask(std::ostream& out, const ExplicitMask& mask) {
    const ClosedSurface& s = mask.surface;
    out << std::setprecision(17);
    if (s.kind == SurfaceKind::flat_torus) {
        out << "flat_torus " << s.n1 << ' ' << s.n2 << ' ' << s.lx << ' ' << s.ly << '\n';
        for (int j = 0; j < s.n2; ++j) {
            for (int i = 0; i < s.n1; ++i) {
                out << (mask.interior[static_cast<std::size_t>(j) * s.n1 + i] ? '1' : '0');
            }
            out << '\n';
        }
        return;
    }
    const SphereGrid g(s);
    out << "round_sphere " << s.n1 << ' ' << s.n2 << ' ' << s.radius << '\n';
    for (int j = 0; j <= g.n_theta; ++j) {
        for (int k = 0; k < g.n_phi; ++k) {
            out << (mask.interior[g.node(j, k)] ? '1' : '0');
        }
        out << '\n';
    }
}

ExplicitMask domain_mask(const GridDomain& domain) {
    return {domain.surface, domain.interior_mask};
}

void write_field_csv(std::ostream& out, const GridDomain& domain, const GridField& field) {
    if (field.size() != domain.size()) {
        throw InvalidInput("field size does not match the domain");
    }
    const bool torus = domain.surface.kind == SurfaceKind::flat_torus;
    out << (torus ? "node,x,y,value\n" : "node,theta,phi,value\n");
    out << std::setprecision(17);
    for (std::size_t r = 0; r < domain.size(); ++r) {
        const auto c = domain.surface.coordinates(domain.interior_nodes[r]);
        out << domain.interior_nodes[r] << ',' << c[0] << ',' << c[1] << ',' << field[r] << '\n';
    }
}

} // namespace exitmoments
