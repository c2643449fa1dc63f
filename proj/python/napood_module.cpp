#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "napood/analysis.hpp"
#include "napood/baselines.hpp"
#include "napood/cli.hpp"
#include "napood/combine.hpp"
#include "napood/errors.hpp"
#include "napood/manifest.hpp"
#include "napood/metrics.hpp"
#include "napood/scoring.hpp"
#include "napood/synth.hpp"
#include "napood/tensor_io.hpp"
#include "napood/tuning.hpp"

namespace py = pybind11;
using namespace napood;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

ActivationTensor to_activation(const DoubleArray& a) {
  if (a.ndim() == 4 && a.shape(0) == 1) {
    return ActivationTensor(to_vector(a), a.shape(1), a.shape(2), a.shape(3));
  }
  if (a.ndim() != 3) throw py::value_error("activation must have shape (C, H, W) or (1, C, H, W)");
  return ActivationTensor(to_vector(a), a.shape(0), a.shape(1), a.shape(2));
}

py::array_t<float> tensor_to_numpy(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  py::array_t<float> out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

Tensor numpy_to_tensor(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  std::vector<std::uint64_t> dims(a.shape(), a.shape() + a.ndim());
  return Tensor(std::move(dims), std::vector<float>(a.data(), a.data() + a.size()));
}

ClassifierHead make_head(const DoubleArray& weights, const DoubleArray& bias) {
  if (weights.ndim() != 2 || bias.ndim() != 1) throw py::value_error("weights must be 2-D and bias 1-D");
  return ClassifierHead(weights.shape(0), weights.shape(1), to_vector(weights), to_vector(bias));
}

std::vector<ScoredSample> to_samples(const py::dict& d) {
  std::vector<ScoredSample> out;
  for (const auto& [k, v] : d) out.push_back({k.cast<std::string>(), v.cast<double>()});
  return out;
}

}  // namespace

PYBIND11_MODULE(_napood, m) {
  m.doc() = "Neural-activation-prior OOD scoring";

  auto base = py::register_exception<Error>(m, "NapoodError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.def("read_tensor", [](const std::filesystem::path& p) { return tensor_to_numpy(read_tensor(p)); },
        py::arg("path"), "Read a NAPD file into a float32 array.");
  m.def("write_tensor", [](const std::filesystem::path& p, const py::array_t<float, py::array::c_style |
                                                                                      py::array::forcecast>& a) {
    write_tensor(p, numpy_to_tensor(a));
  }, py::arg("path"), py::arg("array"));

  m.def("nap_score", [](const DoubleArray& a, double epsilon) {
    return nap_score(to_activation(a), NapConfig{epsilon});
  }, py::arg("activation"), py::arg("epsilon") = 1.0);
  m.def("channel_max", [](const DoubleArray& a) {
    const auto t = to_activation(a);
    std::vector<double> out(t.channels());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = channel_max(t, j);
    return out;
  }, py::arg("activation"));
  m.def("channel_mean", [](const DoubleArray& a) {
    const auto t = to_activation(a);
    std::vector<double> out(t.channels());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = channel_mean(t, j);
    return out;
  }, py::arg("activation"));
  m.def("nap_former_score", [](const DoubleArray& att, bool exclude_self) {
    const auto v = to_vector(att);
    return nap_former_score(std::span<const double>(v), FormerOptions{exclude_self});
  }, py::arg("attention"), py::arg("exclude_self") = false);
  m.def("energy_score", [](const DoubleArray& z) { return energy_score(to_vector(z)); }, py::arg("logits"));
  m.def("msp_score", [](const DoubleArray& z) { return msp_score(to_vector(z)); }, py::arg("logits"));

  m.def("combine_geometric", [](double s_base, double s_nap, double w, double floor) {
    return combine_geometric(s_base, s_nap, CombineConfig{w, floor});
  }, py::arg("base"), py::arg("nap"), py::arg("w") = 0.5, py::arg("floor") = kDefaultCombineFloor);
  m.def("combine_multilayer", [](const DoubleArray& s) { return combine_multilayer(to_vector(s)); },
        py::arg("scores"));

  m.def("auroc", [](const DoubleArray& id, const DoubleArray& ood) {
    return auroc(to_vector(id), to_vector(ood));
  }, py::arg("id_scores"), py::arg("ood_scores"));
  m.def("fpr_at_tpr", [](const DoubleArray& id, const DoubleArray& ood, double tpr) {
    return fpr_at_tpr(to_vector(id), to_vector(ood), tpr);
  }, py::arg("id_scores"), py::arg("ood_scores"), py::arg("tpr") = kDefaultTprTarget);
  m.def("roc_curve", [](const DoubleArray& id, const DoubleArray& ood) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : roc_curve(to_vector(id), to_vector(ood))) out.emplace_back(p.fpr, p.tpr);
    return out;
  }, py::arg("id_scores"), py::arg("ood_scores"), "ROC points as (fpr, tpr) pairs.");

  m.def("tune_w", [](const py::dict& id_base, const py::dict& id_nap, const py::dict& pseudo_base,
                     const py::dict& pseudo_nap, std::size_t iters, std::size_t grid_points) {
    const TuneInput in{to_samples(id_base), to_samples(id_nap), to_samples(pseudo_base), to_samples(pseudo_nap)};
    TuneOptions opts;
    opts.iters = iters;
    opts.grid_points = grid_points;
    const auto r = tune_w(in, opts);
    return py::make_tuple(r.w, r.auroc);
  }, py::arg("id_base"), py::arg("id_nap"), py::arg("pseudo_base"), py::arg("pseudo_nap"),
     py::arg("iters") = 30, py::arg("grid_points") = 11,
     "Each argument maps sample_id -> score. Returns (w, auroc).");
  m.def("reference_weight", &reference_weight, py::arg("method"), py::arg("benchmark"));

  m.def("ash_score", [](const DoubleArray& feat, const DoubleArray& weights, const DoubleArray& bias,
                        double keep_percent, const std::string& variant) {
    const auto v = variant == "prune" ? AshVariant::Prune : AshVariant::Scale;
    return ash_score(to_vector(feat), make_head(weights, bias), keep_percent, v);
  }, py::arg("feature"), py::arg("weights"), py::arg("bias"), py::arg("keep_percent") = kDefaultAshKeepPercent,
     py::arg("variant") = "scale");
  m.def("react_score", [](const DoubleArray& feat, const DoubleArray& weights, const DoubleArray& bias,
                          double threshold) {
    CalibrationStats stats;
    stats.react_threshold = threshold;
    return react_score(to_vector(feat), make_head(weights, bias), stats);
  }, py::arg("feature"), py::arg("weights"), py::arg("bias"), py::arg("threshold"));

  m.def("synth", [](const std::filesystem::path& out_dir, std::size_t n_id, std::size_t n_ood,
                    std::uint64_t seed, std::size_t attention_tokens) {
    SynthConfig cfg;
    cfg.n_id = n_id;
    cfg.n_ood = n_ood;
    cfg.seed = seed;
    cfg.attention_tokens = attention_tokens;
    return generate(cfg, out_dir);
  }, py::arg("out_dir"), py::arg("n_id") = 500, py::arg("n_ood") = 500, py::arg("seed") = 42,
     py::arg("attention_tokens") = 0, "Write a synthetic fixture and return its manifest path.");

  m.def("load_manifest", [](const std::filesystem::path& p) {
    const auto ds = load_manifest(p);
    py::list out;
    for (const auto& r : ds.records) {
      py::dict d;
      d["sample_id"] = r.sample_id;
      d["label"] = std::string(to_string(r.label));
      py::dict acts;
      for (const auto& [tag, t] : r.activations) acts[py::str(tag)] = tensor_to_numpy(t);
      d["activations"] = acts;
      d["logits"] = r.logits;
      if (r.feature) d["feature"] = *r.feature;
      out.append(d);
    }
    return out;
  }, py::arg("path"), "Load every record of a manifest as a list of dicts.");

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "napood");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run the command-line tool in-process. Returns (exit_code, stdout, stderr).");
}
