#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afdmsense/afdm.hpp"
#include "afdmsense/baseline.hpp"
#include "afdmsense/config.hpp"
#include "afdmsense/estimator.hpp"
#include "afdmsense/harness.hpp"
#include "afdmsense/special.hpp"

namespace py = pybind11;

namespace {

afdmsense::AfdmConfig transform_config(Eigen::Index n, double c1, double c2) {
  afdmsense::AfdmConfig cfg;
  cfg.n_sub = static_cast<int>(n);
  cfg.c1 = c1;
  cfg.c2 = c2;
  return cfg;
}

py::dict record_to_dict(const afdmsense::TrialRecord& r) {
  py::dict d;
  d["scenario_id"] = r.scenario_id;
  d["trial_index"] = r.trial_index;
  d["d0_true"] = r.d0_true;
  d["d0_hat"] = r.d0_hat;
  d["d0_hat_baseline"] = r.d0_hat_baseline;
  d["nu1_true"] = r.nu1_true;
  d["nu1_hat"] = r.nu1_hat;
  d["vlos_true"] = r.vlos_true;
  d["vlos_hat"] = r.vlos_hat;
  d["converged"] = r.converged;
  d["em_iters"] = r.em_iters;
  d["ec_iters_total"] = r.ec_iters_total;
  d["fixed_point_residual"] = r.fixed_point_residual;
  d["clamp_count"] = r.clamp_count;
  return d;
}

const afdmsense::GridPoint& grid_at(const std::vector<afdmsense::GridPoint>& g,
                                    int scenario_id) {
  if (scenario_id < 0 || scenario_id >= static_cast<int>(g.size()))
    throw std::out_of_range("scenario_id out of range");
  return g[static_cast<std::size_t>(scenario_id)];
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "AFDM delay-Doppler sensing core";

  m.def(
      "daft",
      [](const afdmsense::CVec& s, double c1, double c2) {
        return afdmsense::daft(s, transform_config(s.size(), c1, c2));
      },
      py::arg("s"), py::arg("c1"), py::arg("c2") = 0.0,
      "Forward affine transform A_af s.");
  m.def(
      "idaft",
      [](const afdmsense::CVec& x, double c1, double c2) {
        return afdmsense::idaft(x, transform_config(x.size(), c1, c2));
      },
      py::arg("x"), py::arg("c1"), py::arg("c2") = 0.0,
      "Inverse affine transform A_af^H x.");
  m.def(
      "daft_matrix",
      [](int n_sub, double c1, double c2) {
        return afdmsense::build_daft_matrix(transform_config(n_sub, c1, c2));
      },
      py::arg("n_sub"), py::arg("c1"), py::arg("c2") = 0.0);

  m.def("log_gamma", &afdmsense::log_gamma, py::arg("x"));
  m.def("hyp1f1", &afdmsense::hyp1f1, py::arg("a"), py::arg("b"),
        py::arg("z"));
  m.def("log_hyp1f1", &afdmsense::log_hyp1f1, py::arg("a"), py::arg("b"),
        py::arg("z"));
  m.def("hyp1f1_ratio", &afdmsense::hyp1f1_ratio, py::arg("a1"), py::arg("b1"),
        py::arg("a2"), py::arg("b2"), py::arg("z"));

  m.def(
      "tilted_nakagami_moments",
      [](double shape_m, double omega, afdmsense::cplx eta, double lambda) {
        afdmsense::cplx mean;
        double second;
        afdmsense::s_site_moments(shape_m, omega, eta, lambda, mean, second);
        return py::make_tuple(mean, second);
      },
      py::arg("shape_m"), py::arg("omega"), py::arg("eta"), py::arg("lambda_"),
      "Posterior mean and second moment of a tilted Nakagami-m gain.");

  m.def("tilted_nakagami_variance", &afdmsense::s_site_variance,
        py::arg("shape_m"), py::arg("omega"), py::arg("eta"),
        py::arg("lambda_"),
        "Cancellation-free variance of a tilted Nakagami-m gain.");

  m.def(
      "rss_nakagami_range",
      [](double total_power, double noise_var, double shape_m, double n1,
         double g0) {
        afdmsense::RssMeasurement meas;
        meas.total_power = total_power;
        meas.noise_var = noise_var;
        const auto est = afdmsense::rss_nakagami_range(meas, shape_m, n1, g0);
        return py::make_tuple(est.d0, est.degenerate);
      },
      py::arg("total_power"), py::arg("noise_var"), py::arg("shape_m"),
      py::arg("n1"), py::arg("g0"));

  m.def(
      "run_trial",
      [](const std::string& config_path, int scenario_id, int trial_index) {
        const auto cfg = afdmsense::load_config(config_path);
        const auto grid = afdmsense::expand_grid(cfg);
        return record_to_dict(
            afdmsense::run_trial(grid_at(grid, scenario_id), trial_index));
      },
      py::arg("config_path"), py::arg("scenario_id") = 0,
      py::arg("trial_index") = 0);

  m.def(
      "rcrb",
      [](const std::string& config_path, int scenario_id) {
        const auto cfg = afdmsense::load_config(config_path);
        const auto grid = afdmsense::expand_grid(cfg);
        const auto [rc_d0, rc_nu] =
            afdmsense::rcrb_overlay(grid_at(grid, scenario_id));
        return py::make_tuple(rc_d0, rc_nu);
      },
      py::arg("config_path"), py::arg("scenario_id") = 0);

  m.def(
      "grid_size",
      [](const std::string& config_path) {
        return afdmsense::expand_grid(afdmsense::load_config(config_path))
            .size();
      },
      py::arg("config_path"));
}
