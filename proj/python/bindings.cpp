#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "magree/dataset.hpp"
#include "magree/errors.hpp"
#include "magree/distance.hpp"
#include "magree/estimation.hpp"
#include "magree/grading.hpp"
#include "magree/raucpc.hpp"
#include "magree/report.hpp"
#include "magree/simulation.hpp"

namespace py = pybind11;

namespace {

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

magree::DistanceSet as_distances(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() == 1) return magree::DistanceSet(as_vector(a), 1);
  if (a.ndim() != 2) throw py::value_error("distances must be 1-D or 2-D (subjects x collections)");
  return magree::DistanceSet(as_vector(a), static_cast<std::size_t>(a.shape(1)));
}

py::array_t<double> to_array(const magree::DistanceSet& d) {
  py::array_t<double> out({d.num_subjects(), d.per_subject()});
  std::copy(d.pooled().begin(), d.pooled().end(), out.mutable_data());
  return out;
}

magree::AgreementQuestion question(const std::string& index, std::optional<double> delta0,
                                   std::optional<double> pi0, std::optional<double> tau0,
                                   std::optional<double> delta_max, double confidence) {
  magree::AgreementQuestion q;
  q.index = magree::parse_index(index);
  q.delta0 = delta0;
  q.pi0 = pi0;
  q.tau0 = tau0;
  q.delta_max = delta_max;
  q.confidence = confidence;
  return q;
}

magree::MeasurementDataset from_values(const std::vector<std::vector<std::vector<double>>>& values,
                                       std::vector<std::string> raters) {
  if (values.empty()) throw py::value_error("no subjects");
  if (raters.empty()) {
    for (std::size_t j = 0; j < values.front().size(); ++j) raters.push_back("R" + std::to_string(j + 1));
  }
  std::vector<magree::SubjectRecord> subjects;
  for (std::size_t i = 0; i < values.size(); ++i) subjects.push_back({std::to_string(i + 1), values[i]});
  return magree::MeasurementDataset(std::move(raters), std::move(subjects));
}

}  // namespace

PYBIND11_MODULE(_magree, m) {
  m.doc() = "Overall agreement indices (OCP, OTDI, RAUOCPC) for multiple raters";

  py::register_exception<magree::Error>(m, "MagreeError", PyExc_ValueError);

  py::class_<magree::MeasurementDataset>(m, "Dataset")
      .def_property_readonly("num_subjects", &magree::MeasurementDataset::num_subjects)
      .def_property_readonly("raters", &magree::MeasurementDataset::raters)
      .def_property_readonly("replicates", &magree::MeasurementDataset::replicate_counts)
      .def("to_json", [](const magree::MeasurementDataset& ds) { return magree::dump_json(ds); });

  m.def("load_csv", [](const std::filesystem::path& path) { return magree::load_csv(path); },
        py::arg("path"));
  m.def("parse_csv", [](const std::string& text) {
        std::istringstream in(text);
        return magree::parse_csv(in);
      },
      py::arg("text"));
  m.def("dataset_from_values", &from_values, py::arg("values"), py::arg("raters") = std::vector<std::string>{},
        "values[i][j] = replicate measurements of rater j on subject i");

  m.def("mpd", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
        return magree::mpd(as_vector(v));
      });
  m.def("rmspd", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
        return magree::rmspd(as_vector(v));
      });
  m.def("distances", [](const magree::MeasurementDataset& ds, const std::string& scope) {
        return to_array(magree::scoped_distance(ds, scope).distances);
      },
      py::arg("dataset"), py::arg("scope") = "overall",
      "N x M matrix of maximum pairwise differences for 'overall', 'pair:a,b' or 'intra:r'");

  m.def("raucpc_ec", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& d,
                        double delta_max) { return magree::raucpc_ec(as_vector(d), delta_max); },
        py::arg("distances"), py::arg("delta_max"));
  m.def("cp_curve", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& d,
                       double delta_max, std::size_t steps) {
        const auto grid = magree::uniform_grid(delta_max, steps);
        std::vector<std::pair<double, double>> out;
        for (const auto& p : magree::empirical_cp_curve(as_vector(d), grid)) out.emplace_back(p.d, p.cp);
        return out;
      },
      py::arg("distances"), py::arg("delta_max"), py::arg("steps") = 200);

  m.def("estimate_json",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& d, const std::string& index,
           std::optional<double> delta0, std::optional<double> pi0, std::optional<double> tau0,
           std::optional<double> delta_max, double confidence) {
          return magree::estimate_json(
              magree::analyze(as_distances(d), question(index, delta0, pi0, tau0, delta_max, confidence)));
        },
        py::arg("distances"), py::arg("index"), py::arg("delta0") = py::none(), py::arg("pi0") = py::none(),
        py::arg("tau0") = py::none(), py::arg("delta_max") = py::none(), py::arg("confidence") = 0.95);

  m.def("analyze_json",
        [](const magree::MeasurementDataset& ds, const std::vector<std::string>& indices,
           const std::string& scope, std::optional<double> delta0, std::optional<double> pi0,
           std::optional<double> tau0, std::optional<double> delta_max, double confidence) {
          magree::AnalysisRequest req;
          req.indices.clear();
          for (const auto& i : indices) req.indices.push_back(magree::parse_index(i));
          req.scopes = magree::ScopeSelection::parse(scope);
          req.thresholds = question("ocp", delta0, pi0, tau0, delta_max, confidence);
          return magree::report_json(magree::run_analysis(ds, req));
        },
        py::arg("dataset"), py::arg("indices"), py::arg("scope"), py::arg("delta0"), py::arg("pi0"),
        py::arg("tau0"), py::arg("delta_max"), py::arg("confidence"));

  m.def("simulate_json",
        [](const std::string& preset, std::size_t replicates, const std::string& index, std::size_t n,
           std::size_t replications, std::uint64_t seed, std::optional<double> delta0,
           std::optional<double> pi0, std::optional<double> delta_max, std::size_t oracle_n,
           std::size_t threads) {
          const auto cfg = magree::find_preset(preset, replicates);
          magree::MonteCarloOptions opts;
          opts.oracle_n = oracle_n;
          opts.threads = threads;
          const bool normal = cfg.family == magree::Family::Normal;
          const auto q = question(index, delta0.value_or(normal ? 4.0 : 3.5), pi0.value_or(0.8), std::nullopt,
                                  delta_max.value_or(normal ? 5.0 : 4.0), 0.95);
          magree::MonteCarloReport report;
          {
            py::gil_scoped_release release;
            report = magree::run_monte_carlo(cfg, q, n, replications, seed, opts);
          }
          return magree::monte_carlo_json(cfg.name, report);
        },
        py::arg("preset"), py::arg("replicates"), py::arg("index"), py::arg("n"), py::arg("replications"),
        py::arg("seed"), py::arg("delta0"), py::arg("pi0"), py::arg("delta_max"), py::arg("oracle_n"),
        py::arg("threads"));
  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& cfg : magree::builtin_presets()) names.push_back(cfg.name);
    return names;
  });

  m.def("bhsp_tau", [](const std::string& grade) {
        const auto& p = magree::bhsp();
        return magree::satisfactory_tau(p, p.grade(grade));
      },
      py::arg("grade"));
  m.def("classify_curve", [](const std::vector<std::pair<double, double>>& points) {
        magree::CurvePoints curve;
        for (const auto& [d, cp] : points) curve.push_back({d, cp});
        return magree::classify(curve);
      },
      py::arg("points"), "BHSP grade of a CP curve given as (d, cp) pairs");
}
