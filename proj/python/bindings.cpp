#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shootout/classify.hpp"
#include "shootout/gen.hpp"
#include "shootout/harness.hpp"
#include "shootout/induct.hpp"
#include "shootout/inference.hpp"
#include "shootout/linear.hpp"
#include "shootout/parcel.hpp"
#include "shootout/ruledsl.hpp"
#include "shootout/scoring.hpp"

namespace py = pybind11;
using namespace shootout;

namespace {

ProbTriple triple_from_tuple(double p0, double p1, double p2) {
    return make_prob_triple(p0, p1, p2);
}

py::tuple triple_to_tuple(const ProbTriple& t) { return py::make_tuple(t.p0, t.p1, t.p2); }

}  // namespace

PYBIND11_MODULE(_shootout, m) {
    m.doc() = "severe-storm forecast intercomparison harness";

    py::register_exception<Error>(m, "HarnessError");
    py::register_exception<SyntaxError>(m, "RuleSyntaxError");

    py::enum_<Category>(m, "Category")
        .value("NONSIGNIFICANT", Category::Nonsignificant)
        .value("SIGNIFICANT", Category::Significant)
        .value("SEVERE", Category::Severe);

    py::enum_<Zone>(m, "Zone")
        .value("Z1", Zone::Z1)
        .value("Z2", Zone::Z2)
        .value("Z3", Zone::Z3)
        .value("Z4", Zone::Z4)
        .value("OVERALL", Zone::Overall);

    py::class_<ProbTriple>(m, "ProbTriple")
        .def(py::init(&triple_from_tuple), py::arg("p0"), py::arg("p1"), py::arg("p2"))
        .def_readonly("p0", &ProbTriple::p0)
        .def_readonly("p1", &ProbTriple::p1)
        .def_readonly("p2", &ProbTriple::p2)
        .def("p_event", &ProbTriple::p_event)
        .def("as_tuple", &triple_to_tuple)
        .def("__repr__", [](const ProbTriple& t) {
            return "ProbTriple(" + format_double(t.p0) + ", " + format_double(t.p1) + ", " +
                   format_double(t.p2) + ")";
        });

    m.def(
        "classify_report",
        [](const std::string& date, Zone zone, int time_utc, const std::string& kind,
           double magnitude) {
            return category_code(
                classify_report({date, zone, time_utc, parse_report_kind(kind), magnitude, "py"}));
        },
        py::arg("date"), py::arg("zone"), py::arg("time_utc"), py::arg("kind"),
        py::arg("magnitude"));

    py::class_<RuleSet>(m, "RuleSet")
        .def_property_readonly("size", [](const RuleSet& rs) { return rs.rules.size(); })
        .def("render", [](const RuleSet& rs) { return render_rules(rs); });

    m.def("parse_rules", [](const std::string& text) { return parse_rules(text); },
          py::arg("text"));

    m.def(
        "backward_chain",
        [](const RuleSet& rules, const FeatureMap& features, const ProbTriple& prior) {
            auto [triple, trace] = backward_chain(rules, features, confidence_from_rules(rules),
                                                  prior);
            return py::make_tuple(triple, explain(trace));
        },
        py::arg("rules"), py::arg("features"), py::arg("prior"));

    m.def(
        "staged_pipeline",
        [](const RuleSet& rules, const FeatureMap& features, double required_fraction,
           const ProbTriple& base_severe, const ProbTriple& base_nonsevere) {
            PipelineSpec spec =
                make_pipeline_spec(rules, required_fraction, base_severe, base_nonsevere);
            return staged_pipeline(spec, features).triple;
        },
        py::arg("rules"), py::arg("features"), py::arg("required_fraction"),
        py::arg("base_severe"), py::arg("base_nonsevere"));

    m.def("brier_binary", &brier_binary, py::arg("series"));
    m.def("brier_multi", &brier_multi, py::arg("series"), py::arg("merge12") = false);
    m.def("skill_score", &skill_score, py::arg("bs"), py::arg("bs_ref"));

    m.def(
        "integrate_updraft",
        [](const std::vector<double>& heights, const std::vector<double>& buoyancy, double drag_k,
           double dz) {
            UpdraftResult r = integrate_updraft({heights, buoyancy}, drag_k, dz);
            return py::make_tuple(r.w_max, r.w);
        },
        py::arg("heights"), py::arg("buoyancy"), py::arg("drag_k"), py::arg("dz"));

    m.def("entropy", &entropy, py::arg("counts"));

    m.def(
        "generate_season",
        [](const std::string& out_dir, int days, unsigned long long seed) {
            GenOptions opt;
            opt.out_dir = out_dir;
            opt.days = days;
            opt.seed = seed;
            generate_season(opt);
        },
        py::arg("out_dir"), py::arg("days"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::string& config_path) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            run_experiment(cfg);
            return cfg.out_dir;
        },
        py::arg("config_path"));
}
