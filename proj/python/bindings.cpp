#include "plp/core_model.hpp"
#include "plp/deconvolution.hpp"
#include "plp/errors.hpp"
#include "plp/experiments.hpp"
#include "plp/io.hpp"
#include "plp/pca.hpp"
#include "plp/phantom.hpp"
#include "plp/weights.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace plp;

namespace {

TimeGrid grid_from(const std::vector<double>& instants) { return TimeGrid::from_instants(instants); }

std::vector<double> to_list(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

InverseMatrix make_inverse(const Eigen::MatrixXd& a, const std::string& method, double fraction,
                           std::optional<Index> rank, double alpha, const std::string& constraint) {
    if (method == "exact") return exact_inverse(a);
    if (method == "tsvd") return tsvd_inverse(compute_svd(a), rank ? TsvdConfig::rank(*rank) : TsvdConfig::fraction(fraction));
    if (method == "tikhonov") {
        return tikhonov_inverse(a, {alpha, constraint == "difference" ? Constraint::first_difference : Constraint::identity});
    }
    throw InvalidArgument("method must be exact, tsvd or tikhonov");
}

}  // namespace

PYBIND11_MODULE(_plp, m) {
    m.doc() = "Perfusion deconvolution, PLP weights and FPC maps";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<SingularInput>(m, "SingularInput", PyExc_ArithmeticError);
    py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_ArithmeticError);
    py::register_exception<DegenerateData>(m, "DegenerateData", PyExc_ValueError);

    m.def("uniform_instants", [](Index n, double d) { return to_list(build_uniform_grid(n, d).instants()); },
          py::arg("n"), py::arg("d") = 1.0);

    m.def(
        "gamma_aif",
        [](double a, double b, const std::vector<double>& instants) {
            const AifCurve aif = gamma_aif({a, b}, grid_from(instants));
            return py::make_tuple(aif.values(), aif.value_at_zero());
        },
        py::arg("a"), py::arg("b"), py::arg("instants"), "Returns (values, value_at_zero).");

    m.def(
        "convolution_matrix",
        [](const Eigen::VectorXd& values, double k0, const std::vector<double>& instants) {
            const TimeGrid g = grid_from(instants);
            return build_convolution_matrix(AifCurve(g, values, k0), g).entries;
        },
        py::arg("aif"), py::arg("k0"), py::arg("instants"));

    m.def(
        "forward_convolve",
        [](const Eigen::VectorXd& values, double k0, const std::vector<double>& instants, const Eigen::VectorXd& r) {
            return forward_convolve(AifCurve(grid_from(instants), values, k0), r);
        },
        py::arg("aif"), py::arg("k0"), py::arg("instants"), py::arg("residue"));

    m.def(
        "svd",
        [](const Eigen::MatrixXd& a) {
            const SvdFactors f = compute_svd(a);
            return py::make_tuple(f.u, f.singular_values, f.v);
        },
        py::arg("matrix"), "Returns (U, singular values, V) with A = U diag(s) V.");

    m.def(
        "inverse",
        [](const Eigen::MatrixXd& a, const std::string& method, double fraction, std::optional<Index> rank,
           double alpha, const std::string& constraint) {
            const InverseMatrix b = make_inverse(a, method, fraction, rank, alpha, constraint);
            return py::make_tuple(b.entries, b.effective_rank);
        },
        py::arg("matrix"), py::arg("method") = "tsvd", py::arg("fraction") = 0.2, py::arg("rank") = py::none(),
        py::arg("alpha") = 0.0, py::arg("constraint") = "identity", "Returns (B, effective rank).");

    m.def(
        "deconvolution_weights",
        [](const Eigen::MatrixXd& b, const std::vector<double>& instants) {
            const VolumeFlowWeights w = deconvolution_weights(InverseMatrix{b}, grid_from(instants));
            return py::make_tuple(w.volume.weights, w.flow.weights);
        },
        py::arg("inverse"), py::arg("instants"), "Returns raw (volume, flow) weights.");

    m.def(
        "axel_weights",
        [](const std::vector<double>& instants) {
            const AxelWeights w = axel_weights(grid_from(instants));
            return py::make_tuple(w.volume.weights, w.mtt.weights);
        },
        py::arg("instants"));

    m.def(
        "patlak_weights",
        [](const Eigen::VectorXd& values, double k0, const std::vector<double>& instants) {
            const TimeGrid g = grid_from(instants);
            const PatlakWeights w = patlak_weights(AifCurve(g, values, k0), g);
            return py::make_tuple(w.relative_volume.weights, w.permeability.weights);
        },
        py::arg("aif"), py::arg("k0"), py::arg("instants"));

    m.def(
        "perfusion_params",
        [](const Eigen::VectorXd& r, const std::vector<double>& instants) {
            const PerfusionTriple p = perfusion_params(r, grid_from(instants));
            return py::make_tuple(p.blood_volume, p.blood_flow, p.mean_transit_time);
        },
        py::arg("residue"), py::arg("instants"), "Returns (Vb, Fb, Tmtt or None).");

    m.def("sign_changes", py::overload_cast<const Eigen::VectorXd&>(&sign_changes), py::arg("w"));
    m.def("centered_correlation", py::overload_cast<const Eigen::VectorXd&, const Eigen::VectorXd&>(&centered_correlation),
          py::arg("a"), py::arg("b"));
    m.def("tail_divergence", py::overload_cast<const Eigen::VectorXd&, double>(&tail_divergence), py::arg("w"),
          py::arg("tail_fraction") = 0.25);

    m.def(
        "fit_pca",
        [](const Eigen::MatrixXd& data, std::optional<std::vector<bool>> mask) {
            const PcaResult r = fit_pca(PixelSeriesMatrix(build_uniform_grid(data.cols(), 1.0), data, std::move(mask)));
            py::dict out;
            out["weights"] = r.component_weights;
            out["eigenvalues"] = r.eigenvalues;
            out["means"] = r.column_means;
            out["energy_ratio"] = r.energy_ratio;
            return out;
        },
        py::arg("data"), py::arg("mask") = py::none());

    m.def(
        "fpc_map",
        [](const Eigen::MatrixXd& data) {
            const PixelSeriesMatrix p(build_uniform_grid(data.cols(), 1.0), data);
            return fpc_map(p, fit_pca(p));
        },
        py::arg("data"));

    m.def(
        "condition_surface",
        [](const std::vector<double>& a, const std::vector<double>& b, Index n) { return condition_surface(a, b, n).values; },
        py::arg("a_values"), py::arg("b_values"), py::arg("n") = 60, "Cell values, a-major.");
    m.def(
        "cutoff_surface",
        [](const std::vector<double>& a, const std::vector<double>& b, Index n, double f) {
            return cutoff_surface(a, b, n, f).values;
        },
        py::arg("a_values"), py::arg("b_values"), py::arg("n") = 60, py::arg("fraction") = 0.2);

    m.def(
        "phantom",
        [](Index n, double d, double a, double b, const std::vector<std::tuple<Index, double, double>>& classes,
           double noise, std::uint64_t seed) {
            const TimeGrid g = build_uniform_grid(n, d);
            std::vector<TissueClass> tissues;
            for (const auto& [pixels, flow, mtt] : classes) tissues.push_back({pixels, ExponentialResidue{flow, mtt}});
            const Phantom ph = generate({g, gamma_aif({a, b}, g), tissues, noise, seed});
            std::vector<py::tuple> truth;
            for (const auto& t : ph.truth) truth.push_back(py::make_tuple(t.blood_volume, t.blood_flow, t.mean_transit_time));
            return py::make_tuple(ph.data.values(), truth);
        },
        py::arg("n") = 60, py::arg("d") = 1.0, py::arg("a") = 3.0, py::arg("b") = 1.0 / 1.5,
        py::arg("classes") = std::vector<std::tuple<Index, double, double>>{{60, 1.0, 4.0}, {40, 0.4, 8.0}},
        py::arg("noise") = 0.01, py::arg("seed") = 1, "Returns (data P x N, [(Vb, Fb, Tmtt), ...]).");

    m.def(
        "schedule",
        [](const std::string& method, const Eigen::MatrixXd& data, const std::vector<std::string>& strategies,
           double a, double b, double d) {
            const auto tag = parse_weight_method(method);
            if (!tag) throw InvalidArgument("unknown weight method '" + method + "'");
            const TimeGrid g = build_uniform_grid(data.cols(), d);
            std::vector<ScheduleStrategy> parsed;
            for (const auto& s : strategies) parsed.push_back(parse_strategy(s));
            const MethodSource source{g, gamma_aif({a, b}, g), PixelSeriesMatrix(g, data)};
            return io::consistency_report_json(consistency_experiment(*tag, source, parsed)).dump();
        },
        py::arg("method"), py::arg("data"), py::arg("strategies"), py::arg("a") = 3.0, py::arg("b") = 1.0 / 1.5,
        py::arg("d") = 1.0, "Consistency report as a JSON string.");
}
