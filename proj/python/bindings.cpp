#include "exitmoments/comparison.hpp"
#include "exitmoments/errors.hpp"
#include "exitmoments/grid_solver.hpp"
#include "exitmoments/io.hpp"
#include "exitmoments/iso_radius.hpp"
#include "exitmoments/model_space.hpp"
#include "exitmoments/radial_solver.hpp"
#include "exitmoments/rearrange.hpp"
#include "exitmoments/spectral.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace exitmoments;

namespace {

// Reports cross the boundary as plain dicts with the CLI's JSON layout.
py::object to_python(const io::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exit-time moment spectra: radial and grid solvers, spectral dictionary, comparison checks";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<ModelSpace>(m, "ModelSpace")
        .def_static("sphere", &ModelSpace::sphere, py::arg("radius"), py::arg("dimension"))
        .def_static("euclidean", &ModelSpace::euclidean, py::arg("dimension"))
        .def_static("hyperbolic", &ModelSpace::hyperbolic, py::arg("curvature"), py::arg("dimension"))
        .def_property_readonly("kind", [](const ModelSpace& s) { return to_string(s.kind); })
        .def_readonly("scale", &ModelSpace::scale)
        .def_readonly("dimension", &ModelSpace::dimension)
        .def("curvature", &ModelSpace::curvature)
        .def("__repr__", [](const ModelSpace& s) {
            return "ModelSpace(" + to_string(s.kind) + ", scale=" + std::to_string(s.scale) +
                   ", d=" + std::to_string(s.dimension) + ")";
        });

    py::class_<GeodesicBall>(m, "GeodesicBall")
        .def(py::init<ModelSpace, double>(), py::arg("space"), py::arg("radius"))
        .def_readonly("space", &GeodesicBall::space)
        .def_readonly("radius", &GeodesicBall::radius)
        .def("volume", &GeodesicBall::volume);

    m.def("geodesic_ball_volume", &geodesic_ball_volume, py::arg("space"), py::arg("r"));
    m.def("cap_radius_for_volume", &cap_radius_for_volume, py::arg("space"), py::arg("volume"));
    m.def(
        "comparison_radius",
        [](double curvature, int dimension, double diameter) {
            return comparison_radius({curvature, dimension, diameter});
        },
        py::arg("curvature"), py::arg("dimension"), py::arg("diameter"));
    m.def("isoperimetric_constant", &isoperimetric_constant, py::arg("z"), py::arg("dimension"));

    py::class_<MomentSequence>(m, "MomentSequence")
        .def(py::init([](double volume, std::vector<double> moments) {
                 MomentSequence s{volume, std::move(moments)};
                 s.validate();
                 return s;
             }),
             py::arg("volume"), py::arg("moments"))
        .def_readonly("volume", &MomentSequence::volume)
        .def_readonly("moments", &MomentSequence::moments)
        .def("scaled", &MomentSequence::scaled, py::arg("n"))
        .def("__len__", &MomentSequence::size)
        .def("__getitem__", &MomentSequence::operator[]);

    py::class_<SpectralData>(m, "SpectralData")
        .def(py::init([](double volume, const std::vector<std::pair<double, double>>& pairs) {
                 SpectralData s{volume, {}};
                 for (const auto& [nu, a_sq] : pairs) s.pairs.push_back({nu, a_sq});
                 s.validate();
                 return s;
             }),
             py::arg("volume"), py::arg("pairs"))
        .def_readonly("volume", &SpectralData::volume)
        .def_property_readonly("pairs",
                               [](const SpectralData& s) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& p : s.pairs) out.emplace_back(p.nu, p.a_sq);
                                   return out;
                               })
        .def("partition_sum", &SpectralData::partition_sum);

    m.def(
        "ball_moments",
        [](const GeodesicBall& ball, int n, std::size_t n_radii) {
            return moment_hierarchy_ball(ball, n, n_radii).moments;
        },
        py::arg("ball"), py::arg("n"), py::arg("n_radii") = kDefaultRadialNodes);
    m.def(
        "ball_profiles",
        [](const GeodesicBall& ball, int n, std::size_t n_radii) {
            const auto h = moment_hierarchy_ball(ball, n, n_radii);
            std::vector<std::vector<double>> values;
            for (const auto& p : h.profiles) values.push_back(p.values);
            return py::make_tuple(h.profiles.front().radii, values);
        },
        py::arg("ball"), py::arg("n"), py::arg("n_radii") = kDefaultRadialNodes,
        "(radii, [u_1, ..., u_n]) on a uniform radial grid");

    m.def(
        "moments_from_spectrum",
        [](const SpectralData& s, int n) {
            const auto t = moments_from_spectrum(s, n);
            return py::make_tuple(t.moments, t.tail_bound);
        },
        py::arg("spectrum"), py::arg("n"), "(MomentSequence, tail bounds)");
    m.def("heat_content", &heat_content, py::arg("spectrum"), py::arg("t"));
    m.def("volume_partition_defect", &volume_partition_defect, py::arg("spectrum"));
    m.def(
        "recover_spectrum",
        [](const MomentSequence& moments, int max_pairs, double noise) {
            return to_python(io::to_json(recover_spectrum(moments, max_pairs, {noise, 10.0})));
        },
        py::arg("moments"), py::arg("max_pairs"), py::arg("input_rel_noise") = 1e-15);
    m.def(
        "eigenvalue_bound",
        [](const MomentSequence& moments, const SpectralData& below, int n, int k, double noise) {
            return to_python(io::to_json(eigenvalue_bound(moments, below, n, k, noise)));
        },
        py::arg("moments"), py::arg("known_below"), py::arg("n"), py::arg("k"), py::arg("input_rel_noise") = 1e-15);
    m.def(
        "eigenvalue_bound_tail",
        [](const SpectralData& spectrum, int n, int k, double cutoff) {
            return to_python(io::to_json(eigenvalue_bound_tail(spectrum, n, k, cutoff)));
        },
        py::arg("spectrum"), py::arg("n"), py::arg("k"), py::arg("nu_cutoff"));

    py::class_<ClosedSurface>(m, "ClosedSurface")
        .def_static("flat_torus", &ClosedSurface::flat_torus, py::arg("lx"), py::arg("ly"), py::arg("nx"),
                    py::arg("ny"))
        .def_static("round_sphere", &ClosedSurface::round_sphere, py::arg("radius"), py::arg("n_theta"),
                    py::arg("n_phi"))
        .def("volume", &ClosedSurface::volume)
        .def("diameter", &ClosedSurface::diameter)
        .def("curvature", &ClosedSurface::curvature)
        .def("refined", &ClosedSurface::refined, py::arg("factor"));

    py::class_<MaskSpec>(m, "MaskSpec")
        .def_static("cap", &MaskSpec::cap, py::arg("c0"), py::arg("c1"), py::arg("radius"))
        .def_static("rectangle", &MaskSpec::rectangle, py::arg("a_lo"), py::arg("a_hi"), py::arg("b_lo"),
                    py::arg("b_hi"))
        .def_static("unite", &MaskSpec::unite, py::arg("parts"))
        .def_static("subtract", &MaskSpec::subtract, py::arg("base"), py::arg("removed"))
        .def_static("from_file", [](const std::string& path) { return MaskSpec::from_mask(read_mask_file(path)); })
        .def("describe", &MaskSpec::describe);

    py::class_<GridDomain>(m, "GridDomain")
        .def_readonly("volume", &GridDomain::volume)
        .def_readonly("components", &GridDomain::components)
        .def("size", &GridDomain::size)
        .def_readonly("weight", &GridDomain::weight)
        .def_property_readonly("coordinates", [](const GridDomain& d) {
            std::vector<std::array<double, 2>> out;
            for (auto node : d.interior_nodes) out.push_back(d.surface.coordinates(node));
            return out;
        });

    m.def("build_domain", &build_domain, py::arg("surface"), py::arg("mask"));
    m.def("apply_laplacian", &apply_laplacian, py::arg("domain"), py::arg("u"));
    m.def("weighted_inner", &weighted_inner, py::arg("domain"), py::arg("u"), py::arg("v"));
    m.def(
        "poisson_solve", [](const GridDomain& d, const GridField& rhs) { return poisson_solve(d, rhs); },
        py::arg("domain"), py::arg("rhs"));
    m.def(
        "grid_moments",
        [](const GridDomain& d, int n) {
            auto h = moment_hierarchy_grid(d, n);
            return py::make_tuple(h.moments, h.fields);
        },
        py::arg("domain"), py::arg("n"), "(MomentSequence, [u_1, ..., u_n])");
    m.def(
        "dirichlet_eigenpairs",
        [](const GridDomain& d, int count) {
            const auto e = dirichlet_eigenpairs(d, count);
            py::dict out;
            out["eigenvalues"] = e.eigenvalues;
            out["residuals"] = e.residuals;
            out["projections"] = e.projections;
            out["fields"] = e.fields;
            out["spectral"] = e.spectral;
            return out;
        },
        py::arg("domain"), py::arg("m"));

    const auto choice = [](const std::string& name) { return sphere_choice_from_string(name); };
    m.def("symmetrized_ball", &symmetrized_ball, py::arg("vol_domain"), py::arg("vol_manifold"), py::arg("sphere"));
    m.def(
        "moment_comparison_report",
        [choice](const ClosedSurface& s, const MaskSpec& mask, int n, const std::string& c, int refine) {
            ComparisonOptions options;
            options.refine = refine;
            return to_python(io::to_json(moment_comparison_report(s, mask, n, choice(c), options)));
        },
        py::arg("surface"), py::arg("mask"), py::arg("n"), py::arg("choice") = "bbg_R", py::arg("refine") = 2);
    m.def(
        "pde_comparison_check",
        [choice](const ClosedSurface& s, const MaskSpec& mask, const SourceFunction& f, const std::string& c) {
            return to_python(io::to_json(pde_comparison_check(s, mask, f, choice(c))));
        },
        py::arg("surface"), py::arg("mask"), py::arg("f"), py::arg("choice") = "bbg_R");
    m.def(
        "cheeger_bound_check",
        [](double c, double vol, double vol_m, const MomentSequence& moments, int k) {
            return to_python(io::to_json(cheeger_bound_check(c, vol, vol_m, moments, k)));
        },
        py::arg("cheeger"), py::arg("vol_domain"), py::arg("vol_manifold"), py::arg("moments"), py::arg("k"));
    m.def(
        "faber_krahn_check",
        [choice](const ClosedSurface& s, const MaskSpec& mask, const std::string& c) {
            return to_python(io::to_json(faber_krahn_check(s, mask, choice(c))));
        },
        py::arg("surface"), py::arg("mask"), py::arg("choice") = "bbg_R");

    m.def(
        "spherical_symmetrization",
        [](std::vector<double> values, std::vector<double> weights, double ambient, const GeodesicBall& target,
           std::size_t n_radii) {
            const auto sample = WeightedSample::make(std::move(values), std::move(weights), ambient);
            const auto f = spherical_symmetrization(sample, target, n_radii);
            return py::make_tuple(f.radii, f.values);
        },
        py::arg("values"), py::arg("weights"), py::arg("ambient_volume"), py::arg("target"),
        py::arg("n_radii") = kDefaultRadialNodes, "(radii, f_star)");
}
