#include "paramkl/error.hpp"
#include "paramkl/io.hpp"
#include "paramkl/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace paramkl;

namespace
{

FullTensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
  std::vector<Index> dims(a.shape(), a.shape() + a.ndim());
  return FullTensor(std::move(dims), std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> tensor_to_array(const FullTensor& t)
{
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  py::array_t<double> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_paramkl, m)
{
  m.doc() = "Spectral analysis and reduction of sampled parametric models";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<NotInRangeError>(m, "NotInRangeError", error.ptr());
  py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError", error.ptr());
  py::register_exception<CorrelationMismatchError>(m, "CorrelationMismatchError", error.ptr());
  auto format = py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<HashMismatchError>(m, "HashMismatchError", format.ptr());

  // core model
  py::class_<ParameterGrid>(m, "ParameterGrid")
      .def(py::init<MatrixXd, VectorXd>(), py::arg("points"), py::arg("weights"))
      .def_static("uniform", &ParameterGrid::with_uniform_weights, py::arg("points"))
      .def_static("midpoint", &ParameterGrid::midpoint, py::arg("points_per_dim"), py::arg("dim") = 1)
      .def_property_readonly("points", &ParameterGrid::points)
      .def_property_readonly("weights", &ParameterGrid::weights)
      .def("__len__", &ParameterGrid::size);

  py::class_<SnapshotSet>(m, "SnapshotSet")
      .def(py::init<MatrixXd, ParameterGrid, std::string, std::vector<std::string>>(), py::arg("values"),
          py::arg("grid"), py::arg("name") = "", py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("values", &SnapshotSet::values)
      .def_property_readonly("grid", &SnapshotSet::grid)
      .def_property_readonly("name", &SnapshotSet::name)
      .def_property_readonly("labels", &SnapshotSet::labels)
      .def_property_readonly("fingerprint", [](const SnapshotSet& s) { return fingerprint(s); });

  m.def("apply_map", &apply_map, py::arg("snapshots"), py::arg("u"));
  m.def("apply_adjoint", &apply_adjoint, py::arg("snapshots"), py::arg("phi"));
  m.def("correlation", [](const SnapshotSet& s) { return correlation(s).entries(); }, py::arg("snapshots"));
  m.def("kernel_gram", [](const SnapshotSet& s) { return kernel_gram(s).entries(); }, py::arg("snapshots"));
  m.def("rkhs_reproduce", &rkhs_reproduce, py::arg("snapshots"), py::arg("phi"), py::arg("i"));

  // spectral
  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("eigenvalues", &SpectralData::eigenvalues)
      .def_readonly("spatial_modes", &SpectralData::spatial_modes)
      .def_readonly("parameter_modes", &SpectralData::parameter_modes)
      .def_readonly("grid", &SpectralData::grid)
      .def_property_readonly("rank", &SpectralData::rank);

  py::class_<ReducedModel>(m, "ReducedModel")
      .def_readonly("spectral", &ReducedModel::spectral)
      .def_readonly("truncation_rank", &ReducedModel::truncation_rank)
      .def_readonly("tail_energy", &ReducedModel::tail_energy)
      .def_readonly("source_name", &ReducedModel::source_name)
      .def_readonly("source_hash", &ReducedModel::source_hash)
      .def_readonly("rank_clamped", &ReducedModel::rank_clamped)
      .def_property_readonly("error_estimate", &ReducedModel::error_estimate);

  m.def(
      "decompose",
      [](const SnapshotSet& s, const std::string& method, double rank_cutoff) {
        DecomposeOptions opt;
        opt.rank_cutoff = rank_cutoff;
        if (method == "correlation")
          opt.method = DecompositionMethod::correlation;
        else if (method != "snapshots")
          throw InvalidArgument("method must be 'snapshots' or 'correlation'");
        return decompose(s, opt);
      },
      py::arg("snapshots"), py::arg("method") = "snapshots", py::arg("rank_cutoff") = kRankCutoff);
  m.def(
      "check_invariants",
      [](const SpectralData& sd, const SnapshotSet& s) {
        const auto r = check_invariants(sd, s);
        return py::dict(py::arg("spatial_orthonormality") = r.spatial_orthonormality,
            py::arg("parameter_orthonormality") = r.parameter_orthonormality,
            py::arg("svd_consistency") = r.svd_consistency, py::arg("descending") = r.descending,
            py::arg("positive") = r.positive, py::arg("ok") = r.ok());
      },
      py::arg("spectral"), py::arg("snapshots"));
  m.def("full_model", &full_model, py::arg("spectral"), py::arg("snapshots"));
  m.def(
      "truncate",
      [](const ReducedModel& rm, std::optional<Index> rank, std::optional<double> tol) {
        return truncate(rm, TruncationRule{rank, tol});
      },
      py::arg("model"), py::arg("rank") = py::none(), py::arg("tol") = py::none());
  m.def("evaluate", &evaluate, py::arg("model"), py::arg("j"));
  m.def("evaluate_all", &evaluate_all, py::arg("model"));
  m.def("reconstruction_error", &reconstruction_error, py::arg("model"), py::arg("snapshots"));

  // factorization
  m.def("cholesky_factor", [](const MatrixXd& c) { return cholesky_factor(CorrelationMatrix(c)).matrix; }, py::arg("c"));
  m.def("square_root_factor", [](const MatrixXd& c) { return square_root_factor(CorrelationMatrix(c)).matrix; }, py::arg("c"));
  m.def(
      "unitary_equivalence",
      [](const MatrixXd& b1, const MatrixXd& b2) {
        return unitary_equivalence(Factor{b1, FactorKind::user, {}}, Factor{b2, FactorKind::user, {}}).matrix;
      },
      py::arg("b1"), py::arg("b2"));
  m.def(
      "cons_transport",
      [](const MatrixXd& b, const SpectralData& sd) { return cons_transport(Factor{b, FactorKind::user, {}}, sd); },
      py::arg("b"), py::arg("spectral"));

  // kernel space
  m.def(
      "nystrom_eigensolve",
      [](const std::string& kernel, const ParameterGrid& grid, Index count, double scale) {
        const auto r = nystrom_eigensolve(KernelFunction::builtin(kernel, scale), grid, count);
        return py::make_tuple(r.eigenvalues, r.eigenfunctions);
      },
      py::arg("kernel"), py::arg("grid"), py::arg("count"), py::arg("scale") = 1.0);
  m.def(
      "nystrom_eigensolve_gram",
      [](const MatrixXd& gram, const ParameterGrid& grid, Index count) {
        const auto r = nystrom_eigensolve(gram, grid, count);
        return py::make_tuple(r.eigenvalues, r.eigenfunctions);
      },
      py::arg("gram"), py::arg("grid"), py::arg("count"));
  m.def("mercer_reconstruct", &mercer_reconstruct, py::arg("eigenvalues"), py::arg("eigenfunctions"), py::arg("n"));
  m.def(
      "feature_kernel",
      [](const MatrixXd& g, const VectorXd& nu, const ParameterGrid& grid) {
        const auto f = feature_factorize(FeatureMapSamples(g, nu), grid);
        return py::make_tuple(f.kernel, f.eigenvalues, f.chi_modes);
      },
      py::arg("g"), py::arg("x_weights"), py::arg("grid"));

  // stationary
  m.def(
      "spectral_density",
      [](const std::string& kernel, double scale, double length, Index points) {
        const auto d = spectral_density(StationaryKernel1D::builtin(kernel, scale, length, points));
        VectorXd zeta(d.size());
        for (Index k = 0; k < d.size(); ++k) zeta(k) = d.frequency(k);
        return py::make_tuple(zeta, d.values);
      },
      py::arg("kernel"), py::arg("scale"), py::arg("length"), py::arg("points"));
  m.def(
      "synthesize",
      [](const VectorXd& density, double spacing, Index count, std::uint64_t seed) {
        return synthesize_realizations(SpectralDensity{density, spacing, 0.0}, count, seed);
      },
      py::arg("density"), py::arg("spacing"), py::arg("count"), py::arg("seed"));

  // tensor train
  py::class_<TTRepresentation>(m, "TensorTrain")
      .def_property_readonly("ranks", &TTRepresentation::ranks)
      .def_property_readonly("mode_dims", &TTRepresentation::mode_dims)
      .def_property_readonly("error_bound", [](const TTRepresentation& tt) { return tt_error_bound(tt.discarded); })
      .def("__getitem__", [](const TTRepresentation& tt, std::vector<Index> idx) { return tt_eval(tt, idx); })
      .def("full", [](const TTRepresentation& tt) { return tensor_to_array(tt_reconstruct(tt)); });
  m.def(
      "tt_decompose",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double tol, std::optional<Index> max_rank) {
        TTOptions opt;
        opt.tolerance = tol;
        opt.max_rank = max_rank;
        return tt_decompose(tensor_from_array(a), opt);
      },
      py::arg("tensor"), py::arg("tol") = 0.0, py::arg("max_rank") = py::none());

  // fields
  m.def("matrix_exp_sym", &matrix_exp_sym, py::arg("h"));
  m.def("matrix_log_spd", &matrix_log_spd, py::arg("a"));
  m.def("matrix_exp_skew", &matrix_exp_skew, py::arg("s"));
  py::class_<ReducedSPDField>(m, "ReducedSPDField")
      .def_readonly("centered", &ReducedSPDField::centered)
      .def_readonly("mean", &ReducedSPDField::mean)
      .def_readonly("model", &ReducedSPDField::model)
      .def("evaluate", &ReducedSPDField::evaluate, py::arg("j"));
  m.def(
      "spd_field_reduce",
      [](const std::vector<MatrixXd>& mats, const ParameterGrid& grid, Index rank, bool center) {
        return spd_field_reduce(SPDFieldSet(mats), grid, rank, center);
      },
      py::arg("matrices"), py::arg("grid"), py::arg("rank"), py::arg("center") = true);

  // persistence
  m.def("save_snapshots", [](const SnapshotSet& s, const std::filesystem::path& dir) { io::save_snapshots(s, dir); },
      py::arg("snapshots"), py::arg("dir"));
  m.def("load_snapshots", &io::load_snapshots, py::arg("dir"));
  m.def("save_model", &io::save_model, py::arg("model"), py::arg("dir"));
  m.def("load_model", &io::load_model, py::arg("dir"));
  m.def("spectrum_csv", [](const VectorXd& lambda) { return spectrum_csv(spectrum_report(lambda)); },
      py::arg("eigenvalues"));
}
