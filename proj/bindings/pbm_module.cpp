#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbm/inference.hpp"
#include "pbm/model.hpp"
#include "pbm/sampler.hpp"
#include "pbm/study.hpp"

namespace py = pybind11;

namespace {

pbm::Scenario scenario_from_name(const std::string& name) {
  if (name == "free") return pbm::Scenario::unconstrained();
  if (name == "eqvar") return pbm::Scenario::equal_variance();
  if (name == "propvar") return pbm::Scenario::proportional(1.0);
  throw std::invalid_argument("scenario must be one of free|eqvar|propvar");
}

std::vector<std::pair<double, double>> to_tuples(const std::vector<pbm::ObservationPair>& pairs) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.emplace_back(p.s, p.r);
  return out;
}

pbm::Sample to_sample(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<pbm::ObservationPair> obs;
  obs.reserve(pairs.size());
  for (const auto& [s, r] : pairs) obs.push_back({s, r});
  return pbm::Sample(std::move(obs));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Densities, samplers and maximum-likelihood fits for boundary-crossing"
            " times of a Wiener process perturbed by an intervention";

  py::register_exception<pbm::Error>(m, "PbmError", PyExc_RuntimeError);

  py::class_<pbm::WienerPhase>(m, "WienerPhase")
      .def(py::init<double, double>(), py::arg("mu"), py::arg("sigma2"))
      .def_readonly("mu", &pbm::WienerPhase::mu)
      .def_readonly("sigma2", &pbm::WienerPhase::sigma2);

  py::class_<pbm::Model>(m, "Model")
      .def(py::init<double, pbm::WienerPhase, pbm::WienerPhase>(), py::arg("boundary"),
           py::arg("phase1"), py::arg("phase2"))
      .def(py::init([](double b, double mu1, double sigma1_sq, double mu2, double sigma2_sq) {
             return pbm::Model(b, pbm::WienerPhase(mu1, sigma1_sq),
                               pbm::WienerPhase(mu2, sigma2_sq));
           }),
           py::arg("boundary"), py::arg("mu1"), py::arg("sigma1_sq"), py::arg("mu2"),
           py::arg("sigma2_sq"))
      .def_readonly("boundary", &pbm::Model::boundary)
      .def_readonly("phase1", &pbm::Model::phase1)
      .def_readonly("phase2", &pbm::Model::phase2);

  m.def("proportional_model", &pbm::make_proportional_model, py::arg("mu1"), py::arg("mu2"),
        py::arg("k"), py::arg("boundary"));

  // Densities and moments.
  m.def("survival_fpt", &pbm::survival_fpt, py::arg("s"), py::arg("phase"), py::arg("b"));
  m.def("pdf_s", &pbm::pdf_s, py::arg("s"), py::arg("phase1"), py::arg("b"));
  m.def("pdf_x0", &pbm::pdf_x0, py::arg("x"), py::arg("phase1"), py::arg("b"));
  m.def("pdf_x0_absorbed", &pbm::pdf_x0_absorbed, py::arg("x"), py::arg("s"), py::arg("phase1"),
        py::arg("b"));
  m.def("pdf_r", &pbm::pdf_r, py::arg("r"), py::arg("model"));
  m.def("pdf_joint_sr", &pbm::pdf_joint_sr, py::arg("s"), py::arg("r"), py::arg("model"));
  m.def("log_pdf_joint_sr", &pbm::log_pdf_joint_sr, py::arg("s"), py::arg("r"), py::arg("model"));
  m.def(
      "moments_s",
      [](const pbm::WienerPhase& ph, double b) {
        const auto mo = pbm::moments_s(ph, b);
        return py::dict(py::arg("mean") = mo.mean, py::arg("variance") = mo.variance,
                        py::arg("cv") = mo.cv);
      },
      py::arg("phase1"), py::arg("b"));
  m.def(
      "moments_x0",
      [](const pbm::WienerPhase& ph, double b) {
        const auto mo = pbm::moments_x0(ph, b);
        return py::dict(py::arg("mean") = mo.mean, py::arg("variance") = mo.variance);
      },
      py::arg("phase1"), py::arg("b"));
  m.def(
      "special_case_summaries",
      [](double mu1, double mu2, double k, double b) {
        const auto s = pbm::special_case_summaries(mu1, mu2, k, b);
        return py::dict(py::arg("mean_s") = s.mean_s, py::arg("var_s") = s.var_s,
                        py::arg("cv_s") = s.cv_s, py::arg("mean_r") = s.mean_r,
                        py::arg("var_r") = s.var_r, py::arg("cv_r") = s.cv_r,
                        py::arg("cov_sr") = s.cov_sr, py::arg("corr_sr") = s.corr_sr);
      },
      py::arg("mu1"), py::arg("mu2"), py::arg("k"), py::arg("b"));

  // Sampling.
  m.def(
      "sample_pairs",
      [](const pbm::Model& model, int n, uint64_t seed, uint64_t stream) {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        pbm::RngStream rng(seed, stream);
        const pbm::PairSampler sampler(model);
        std::vector<pbm::ObservationPair> pairs(n);
        for (auto& p : pairs) p = sampler.sample(rng);
        return to_tuples(pairs);
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 1, py::arg("stream") = 0,
      "Draw n (s, r) pairs; deterministic in (seed, stream).");
  m.def(
      "oracle_sample_pairs",
      [](const pbm::Model& model, int n, uint64_t seed, uint64_t stream, double dt, int horizon) {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        pbm::RngStream rng(seed, stream);
        const pbm::OracleConfig cfg{dt, horizon};
        std::vector<pbm::ObservationPair> pairs(n);
        for (auto& p : pairs) p = pbm::oracle_sample_pair(model, cfg, rng);
        return to_tuples(pairs);
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 1, py::arg("stream") = 0,
      py::arg("dt") = 1e-3, py::arg("horizon") = 64,
      "Draw n (s, r) pairs from the discretized-path oracle.");

  // Inference.
  py::class_<pbm::FitResult>(m, "FitResult")
      .def_property_readonly("param_names",
                             [](const pbm::FitResult& f) { return pbm::param_names(f.space); })
      .def_readonly("estimate", &pbm::FitResult::estimate)
      .def_readonly("loglik", &pbm::FitResult::loglik)
      .def_readonly("se", &pbm::FitResult::se)
      .def_readonly("ci95", &pbm::FitResult::ci95)
      .def_readonly("converged", &pbm::FitResult::converged)
      .def_readonly("restarts_used", &pbm::FitResult::restarts_used);

  py::class_<pbm::LrtResult>(m, "LrtResult")
      .def_readonly("statistic", &pbm::LrtResult::statistic)
      .def_readonly("reject", &pbm::LrtResult::reject)
      .def_readonly("null_fit", &pbm::LrtResult::null_fit)
      .def_readonly("full_fit", &pbm::LrtResult::full_fit)
      .def_property_readonly("threshold",
                             [](const pbm::LrtResult&) { return pbm::LrtResult::kThreshold; });

  m.def(
      "fit",
      [](const std::vector<std::pair<double, double>>& pairs, double b,
         const std::string& scenario) { return pbm::fit(to_sample(pairs), scenario_from_name(scenario), b); },
      py::arg("pairs"), py::arg("b"), py::arg("scenario") = "free");
  m.def(
      "fit_s_only",
      [](const std::vector<std::pair<double, double>>& pairs, double b) {
        return pbm::fit_s_only(to_sample(pairs), b);
      },
      py::arg("pairs"), py::arg("b"));
  m.def(
      "loglik",
      [](const std::vector<std::pair<double, double>>& pairs, const std::vector<double>& phi,
         double b, const std::string& scenario) {
        return pbm::loglik(to_sample(pairs), phi, pbm::space_of(scenario_from_name(scenario)), b);
      },
      py::arg("pairs"), py::arg("phi"), py::arg("b"), py::arg("scenario") = "free");
  m.def(
      "lrt_equal_drift",
      [](const std::vector<std::pair<double, double>>& pairs, double b) {
        return pbm::lrt_equal_drift(to_sample(pairs), b);
      },
      py::arg("pairs"), py::arg("b"));

  // Study harness.
  py::class_<pbm::ParamStat>(m, "ParamStat")
      .def_readonly("name", &pbm::ParamStat::name)
      .def_readonly("truth", &pbm::ParamStat::truth)
      .def_readonly("avg", &pbm::ParamStat::avg)
      .def_readonly("emp_se", &pbm::ParamStat::emp_se)
      .def_readonly("asym_se", &pbm::ParamStat::asym_se)
      .def_readonly("cp", &pbm::ParamStat::cp);

  py::class_<pbm::StudySummary>(m, "StudySummary")
      .def_readonly("params", &pbm::StudySummary::params)
      .def_readonly("s_only_params", &pbm::StudySummary::s_only_params)
      .def_property_readonly("lrt_rejection_percent",
                             [](const pbm::StudySummary& s) -> py::object {
                               if (s.lrt_rejection_percent) return py::float_(*s.lrt_rejection_percent);
                               return py::none();
                             })
      .def_readonly("failed_replications", &pbm::StudySummary::failed_replications)
      .def_readonly("reps", &pbm::StudySummary::reps)
      .def_readonly("n", &pbm::StudySummary::n);

  m.def(
      "run_study",
      [](const pbm::Model& model, const std::string& scenario, int n, int reps, uint64_t seed,
         bool lrt, bool s_only, unsigned threads) {
        pbm::StudyConfig cfg(model, scenario_from_name(scenario));
        cfg.n = n;
        cfg.reps = reps;
        cfg.seed = seed;
        cfg.compute_lrt = lrt;
        cfg.compute_s_only = s_only;
        cfg.threads = threads;
        return pbm::run_study(cfg);
      },
      py::arg("model"), py::arg("scenario") = "free", py::arg("n") = 100, py::arg("reps") = 100,
      py::arg("seed") = 1, py::arg("lrt") = false, py::arg("s_only") = false,
      py::arg("threads") = 0);
  m.def(
      "run_sweep",
      [](const pbm::Model& model, const std::string& scenario, const std::string& axis,
         const std::vector<double>& values, int n, int reps, uint64_t seed, bool lrt, bool s_only,
         unsigned threads) {
        pbm::StudyConfig cfg(model, scenario_from_name(scenario));
        cfg.n = n;
        cfg.reps = reps;
        cfg.seed = seed;
        cfg.compute_lrt = lrt;
        cfg.compute_s_only = s_only;
        cfg.threads = threads;
        return pbm::run_sweep(cfg, pbm::sweep_axis_from_string(axis), values);
      },
      py::arg("model"), py::arg("scenario"), py::arg("axis"), py::arg("values"),
      py::arg("n") = 100, py::arg("reps") = 100, py::arg("seed") = 1, py::arg("lrt") = false,
      py::arg("s_only") = false, py::arg("threads") = 0);
}
