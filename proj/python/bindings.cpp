#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bitemp/divergences.hpp"
#include "bitemp/experiments.hpp"
#include "bitemp/loss.hpp"
#include "bitemp/network.hpp"
#include "bitemp/normalization.hpp"
#include "bitemp/tempered_math.hpp"

namespace py = pybind11;
using bitemp::Vec;

namespace {

bitemp::LossConfig make_config(double t1, double t2, double smoothing) {
  bitemp::LossConfig cfg;
  cfg.temps = {t1, t2};
  cfg.label_smoothing = smoothing;
  return cfg;
}

bitemp::Matrix to_matrix(const std::vector<Vec>& rows, const char* name) {
  if (rows.empty()) throw std::invalid_argument(std::string(name) + " is empty");
  bitemp::Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) {
      throw std::invalid_argument(std::string(name) + " rows have unequal lengths");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i));
  }
  return m;
}

std::vector<Vec> to_rows(const bitemp::Matrix& m) {
  std::vector<Vec> rows(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) rows[i] = m.row_vec(i);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bi-tempered logistic loss: tempered math, divergences, losses, "
            "and the 2-D label-noise experiment driver.";

  // tempered_core
  m.def("log_t", [](double x, double t) { return bitemp::log_t(x, t); },
        py::arg("x"), py::arg("t"),
        "Tempered logarithm (x^(1-t) - 1)/(1-t); natural log at t = 1.");
  m.def("exp_t", [](double x, double t) { return bitemp::exp_t(x, t); },
        py::arg("x"), py::arg("t"),
        "Tempered exponential [1 + (1-t) x]_+^(1/(1-t)); exp at t = 1.");
  m.def("log_t_vec", [](const Vec& v, double t) { return bitemp::log_t_vec(v, t); },
        py::arg("v"), py::arg("t"));
  m.def("exp_t_vec", [](const Vec& v, double t) { return bitemp::exp_t_vec(v, t); },
        py::arg("v"), py::arg("t"));

  // normalization
  py::class_<bitemp::NormalizationResult>(m, "NormalizationResult")
      .def_readonly("lambda_", &bitemp::NormalizationResult::lambda)
      .def_readonly("iterations", &bitemp::NormalizationResult::iterations)
      .def_readonly("residual", &bitemp::NormalizationResult::residual)
      .def("__repr__", [](const bitemp::NormalizationResult& r) {
        return "NormalizationResult(lambda=" + bitemp::format_double(r.lambda) +
               ", iterations=" + std::to_string(r.iterations) +
               ", residual=" + bitemp::format_double(r.residual) + ")";
      });
  m.def("lambda_binary_search",
        [](const Vec& a, double t, double tol) {
          return bitemp::lambda_binary_search(a, t, tol);
        },
        py::arg("a"), py::arg("t"), py::arg("tol") = bitemp::kNormTol);
  m.def("lambda_fixed_point",
        [](const Vec& a, double t, int max_iters) {
          return bitemp::lambda_fixed_point(a, t, max_iters);
        },
        py::arg("a"), py::arg("t"), py::arg("max_iters") = 100);
  m.def("normalize_activations",
        [](const Vec& a, double t) { return bitemp::normalize_activations(a, t); },
        py::arg("a"), py::arg("t"));
  m.def("tempered_softmax",
        [](const Vec& a, double t) { return bitemp::tempered_softmax(a, t); },
        py::arg("a"), py::arg("t"),
        "Probabilities exp_t(a_i - lambda_t(a)); standard softmax at t = 1.");
  m.def("escort_distribution",
        [](const Vec& p, double t) { return bitemp::escort_distribution(p, t); },
        py::arg("p"), py::arg("t"));

  // divergences
  m.def("tempered_generator",
        [](const Vec& y, double t) { return bitemp::tempered_generator(y, t); },
        py::arg("y"), py::arg("t"));
  m.def("bregman_tempered",
        [](const Vec& y, const Vec& yhat, double t) {
          return bitemp::bregman_tempered(y, yhat, t);
        },
        py::arg("y"), py::arg("yhat"), py::arg("t"));
  m.def("bregman_special",
        [](const Vec& y, const Vec& yhat, const std::string& name) {
          return bitemp::bregman_special(y, yhat, bitemp::bregman_case_from_name(name));
        },
        py::arg("y"), py::arg("yhat"), py::arg("case"),
        "Closed-form rows: euclidean, t_half, kl, squared_xi_roots, "
        "itakura_saito, inverse.");
  m.def("bregman_alternate",
        [](const Vec& y, const Vec& yhat, double t) {
          return bitemp::bregman_alternate(y, yhat, t);
        },
        py::arg("y"), py::arg("yhat"), py::arg("t"));
  m.def("tsallis_divergence",
        [](const Vec& y, const Vec& yhat, double t) {
          return bitemp::tsallis_divergence(y, yhat, t);
        },
        py::arg("y"), py::arg("yhat"), py::arg("t"));

  // loss
  py::class_<bitemp::LossOutput>(m, "LossOutput")
      .def_readonly("value", &bitemp::LossOutput::value)
      .def_readonly("probabilities", &bitemp::LossOutput::probabilities)
      .def_readonly("gradient", &bitemp::LossOutput::gradient);
  m.def("bitempered_loss",
        [](const Vec& a, const Vec& y, double t1, double t2, double smoothing) {
          return bitemp::bitempered_loss(a, y, make_config(t1, t2, smoothing));
        },
        py::arg("activations"), py::arg("labels"), py::arg("t1"), py::arg("t2"),
        py::arg("label_smoothing") = 0.0,
        "Bi-tempered logistic loss with its tempered-softmax probabilities "
        "and analytic gradient.");
  m.def("bitempered_loss_batch",
        [](const std::vector<Vec>& a, const std::vector<Vec>& y, double t1, double t2,
           double smoothing) {
          const bitemp::BatchLossOutput out = bitemp::bitempered_loss_batch(
              to_matrix(a, "activations"), to_matrix(y, "labels"),
              make_config(t1, t2, smoothing));
          return py::make_tuple(out.mean_value, to_rows(out.gradients));
        },
        py::arg("activations"), py::arg("labels"), py::arg("t1"), py::arg("t2"),
        py::arg("label_smoothing") = 0.0,
        "Returns (mean loss, per-example gradient rows).");
  m.def("tsallis_loss",
        [](const Vec& a, const Vec& y, double t1, double t2) {
          return bitemp::tsallis_loss(a, y, bitemp::TemperaturePair{t1, t2});
        },
        py::arg("activations"), py::arg("one_hot_labels"), py::arg("t1"), py::arg("t2"),
        "Two-temperature Tsallis baseline -log_t1(yhat_c); not a proper loss.");

  py::class_<bitemp::PropernessArm>(m, "PropernessArm")
      .def_readonly("minimizer", &bitemp::PropernessArm::minimizer)
      .def_readonly("recovered", &bitemp::PropernessArm::recovered)
      .def_readonly("gap", &bitemp::PropernessArm::gap)
      .def_readonly("risk", &bitemp::PropernessArm::risk)
      .def_readonly("converged", &bitemp::PropernessArm::converged);
  py::class_<bitemp::PropernessReport>(m, "PropernessReport")
      .def_readonly("eta", &bitemp::PropernessReport::eta)
      .def_readonly("bitempered", &bitemp::PropernessReport::bitempered)
      .def_readonly("tsallis", &bitemp::PropernessReport::tsallis)
      .def_readonly("argmax_consistent", &bitemp::PropernessReport::argmax_consistent);
  m.def("properness_gap",
        [](const Vec& eta, double t1, double t2, int restarts) {
          return bitemp::properness_gap(eta, bitemp::TemperaturePair{t1, t2}, restarts);
        },
        py::arg("eta"), py::arg("t1"), py::arg("t2"), py::arg("restarts") = 5,
        "Minimizes the conditional risk and reports how well each loss "
        "recovers eta.");
}
