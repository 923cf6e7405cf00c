// Python bindings: dataset generation, training, inference, metrics,
// baselines, sweeps and the acceptance suite.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "rdae/acceptance.hpp"
#include "rdae/autoencoders.hpp"
#include "rdae/baselines.hpp"
#include "rdae/bench.hpp"
#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"
#include "rdae/metrics.hpp"

namespace py = pybind11;
using namespace rdae;
using Matrix = Eigen::MatrixXd;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "<python>");
}

py::dict row_to_dict(const ResultRow& r) {
  py::dict d;
  d["algorithm"] = std::string(to_string(r.algorithm));
  d["kind"] = std::string(to_string(r.kind));
  d["carrier_hz"] = r.carrier;
  d["wall"] = std::string(to_string(r.wall));
  d["snr_db"] = r.point.snr_db;
  d["scr_db"] = r.point.scr_db;
  d["mismatch_pct"] = r.point.mismatch_pct;
  d["nodes"] = r.point.nodes;
  d["seed"] = r.point.seed;
  d["ssim_bd"] = r.ssim_bd;
  d["ssim_ad"] = r.ssim_ad;
  d["nmse_bd"] = r.nmse_bd;
  d["nmse_ad"] = r.nmse_ad;
  d["train_s"] = r.train_seconds;
  d["test_ms"] = r.test_ms;
  d["diverged"] = r.diverged;
  return d;
}

TrainOptions train_options(const std::string& activation, double lambda, double mu,
                           const std::vector<double>& coupling, const std::vector<double>& sparsity,
                           int outer_iterations, double outer_tolerance, std::uint64_t seed,
                           std::optional<double> ridge) {
  TrainOptions o;
  o.activation.kind = parse_activation(activation);
  o.lambda = lambda;
  o.mu = mu;
  o.coupling = coupling;
  o.sparsity = sparsity;
  o.outer_iterations = outer_iterations;
  o.outer_tolerance = outer_tolerance;
  o.seed = seed;
  o.ridge = ridge;
  return o;
}

py::dict dataset_dict(const DatasetPair& d) {
  py::dict out;
  out["clean"] = d.clean.data;
  out["corrupt"] = d.corrupt.data;
  out["image_rows"] = d.clean.image_rows;
  std::vector<int> interval, realization;
  for (const ColumnMeta& m : d.clean.meta) {
    interval.push_back(m.interval);
    realization.push_back(m.realization);
  }
  out["interval"] = interval;
  out["realization"] = realization;
  out["kind"] = std::string(to_string(d.clean.kind));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Denoising autoencoders for through-wall and around-corner radar signatures";

  py::register_exception<InvalidConfig>(m, "InvalidConfig", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  // Datasets
  m.def(
      "generate_dataset",
      [](const std::string& kind, std::optional<std::string> wall, std::optional<double> snr_db,
         std::optional<double> scr_db, std::uint64_t seed, std::optional<int> realizations,
         std::optional<int> intervals, std::optional<int> noise_draws, std::optional<int> subjects,
         std::optional<int> orientations, std::optional<double> carrier) {
        DatasetSpec spec = DatasetSpec::defaults(parse_signature_kind(kind), carrier.value_or(2.4e9));
        if (wall) {
          const ChannelModel base = spec.channel;
          spec.channel = ChannelModel::for_wall(parse_wall_class(*wall), base.realizations, base.seed);
        }
        if (realizations) spec.channel.realizations = *realizations;
        if (snr_db) spec.snr_db = *snr_db;
        if (scr_db) spec.scr_db = *scr_db;
        if (intervals) spec.intervals = *intervals;
        if (noise_draws) spec.noise_draws = *noise_draws;
        if (subjects) spec.subjects = *subjects;
        if (orientations) spec.orientations = *orientations;
        spec.seed = seed;
        DatasetPair d;
        {
          py::gil_scoped_release release;
          d = generate_dataset(spec);
        }
        return dataset_dict(d);
      },
      py::arg("kind") = "spectrogram", py::arg("wall") = py::none(), py::arg("snr_db") = py::none(),
      py::arg("scr_db") = py::none(), py::arg("seed") = 1, py::arg("realizations") = py::none(),
      py::arg("intervals") = py::none(), py::arg("noise_draws") = py::none(),
      py::arg("subjects") = py::none(), py::arg("orientations") = py::none(),
      py::arg("carrier") = py::none(),
      "Generate a paired clean/corrupt stack with the desk-scale defaults for `kind`. Returns a dict "
      "with 'clean' and 'corrupt' (P x Q arrays), 'image_rows' and per-column metadata.");
  m.def(
      "load_dataset", [](const std::filesystem::path& manifest) { return dataset_dict(load_dataset(manifest)); },
      py::arg("manifest"));
  m.def(
      "mismatch_permutation", &mismatch_permutation, py::arg("count"), py::arg("fraction"), py::arg("seed"),
      "Output column i takes input column perm[i]; floor(fraction * count) columns move.");

  // Autoencoders
  py::class_<AutoencoderWeights>(m, "Autoencoder")
      .def_property_readonly("variant", [](const AutoencoderWeights& w) { return std::string(to_string(w.variant)); })
      .def_property_readonly("activation",
                             [](const AutoencoderWeights& w) { return std::string(to_string(w.activation.kind)); })
      .def_readonly("encoders", &AutoencoderWeights::encoders)
      .def_readonly("decoder", &AutoencoderWeights::decoder)
      .def_property_readonly("layer_sizes", &AutoencoderWeights::layer_sizes)
      .def_property_readonly("inference_macs", &AutoencoderWeights::inference_macs)
      .def("infer", [](const AutoencoderWeights& w, const Matrix& x) { return infer(w, x); }, py::arg("corrupt"))
      .def("save", [](const AutoencoderWeights& w, const std::filesystem::path& p) { save_weights(w, p); },
           py::arg("path"));
  m.def("load_weights", &load_weights, py::arg("path"));

  m.def(
      "train",
      [](const std::string& variant, const Matrix& clean, const Matrix& corrupt, Eigen::Index hidden,
         const std::vector<Eigen::Index>& sizes, const std::string& activation, double lambda, double mu,
         const std::vector<double>& coupling, const std::vector<double>& sparsity, int outer_iterations,
         double outer_tolerance, std::uint64_t seed, std::optional<double> ridge) {
        const TrainOptions o = train_options(activation, lambda, mu, coupling, sparsity, outer_iterations,
                                             outer_tolerance, seed, ridge);
        const Variant v = parse_variant(variant);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = v == Variant::Dae         ? train_dae(clean, corrupt, hidden, o)
              : v == Variant::SparseDae ? train_sparse_dae(clean, corrupt, hidden, o)
                                        : train_stacked_sdae(clean, corrupt, sizes, o);
        }
        return py::make_tuple(r.weights, r.trace.objective, r.trace.diverged);
      },
      py::arg("variant"), py::arg("clean"), py::arg("corrupt"), py::arg("hidden") = 100,
      py::arg("sizes") = std::vector<Eigen::Index>{256, 128, 64}, py::arg("activation") = "linear",
      py::arg("lambda_") = 1.0, py::arg("mu") = 0.1, py::arg("coupling") = std::vector<double>{1.0, 1.0, 1.0},
      py::arg("sparsity") = std::vector<double>{0.1, 0.1, 0.1}, py::arg("outer_iterations") = 50,
      py::arg("outer_tolerance") = 1e-4, py::arg("seed") = 1, py::arg("ridge") = py::none(),
      "Train 'DAE', 'SparseDAE' or 'StackedSDAE' on P x Q stacks. Returns (model, objective trace, diverged).");

  // Metrics
  m.def("ssim", [](const Matrix& a, const Matrix& b) { return ssim(a, b); }, py::arg("a"), py::arg("b"));
  m.def("nmse", &nmse, py::arg("a"), py::arg("ref"));
  m.def("mean_ssim", [](const Matrix& a, const Matrix& ref, Eigen::Index rows) { return mean_ssim(a, ref, rows); },
        py::arg("a"), py::arg("ref"), py::arg("image_rows"));
  m.def("mean_nmse", &mean_nmse, py::arg("a"), py::arg("ref"));

  // Baselines
  m.def(
      "svd_denoise",
      [](const Matrix& x, std::optional<Eigen::Index> rank, double energy) {
        SvdFilterConfig c;
        c.rank = rank;
        if (rank) c.energy_fraction.reset();
        else c.energy_fraction = energy;
        return svd_denoise(x, c);
      },
      py::arg("x"), py::arg("rank") = py::none(), py::arg("energy") = 0.95);
  m.def(
      "wavelet_denoise",
      [](const Matrix& x, int levels, double keep) {
        return wavelet_denoise(x, WaveletFilterConfig{levels, keep});
      },
      py::arg("image"), py::arg("levels") = 2, py::arg("keep") = 0.1);
  m.def("haar_forward", &haar_forward, py::arg("image"), py::arg("levels"));
  m.def("haar_inverse", &haar_inverse, py::arg("coefficients"), py::arg("levels"));

  // Sweeps
  m.def(
      "run_sweep",
      [](const std::string& config_text) {
        const ExperimentConfig cfg = config_from_text(config_text);
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(cfg);
        }
        py::list out;
        for (const ResultRow& r : rows) out.append(row_to_dict(r));
        return py::make_tuple(out, results_hash(rows));
      },
      py::arg("config_text"),
      "Run the sweep described by INI config text. Returns (rows as dicts, results hash).");
  m.def(
      "validate_config", [](const std::string& text) { config_from_text(text).validate(); },
      py::arg("config_text"));

  m.def(
      "run_acceptance",
      [](const std::vector<int>& only, std::uint64_t seed) {
        AcceptanceOptions opt;
        opt.only = only;
        opt.seed = seed;
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance(opt);
        }
        py::list out;
        for (const CriterionResult& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("only") = std::vector<int>{}, py::arg("seed") = 1);
}
