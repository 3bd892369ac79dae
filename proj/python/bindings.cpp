// Python bindings for the core operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "einst/consensus.hpp"
#include "einst/dataset_store.hpp"
#include "einst/error.hpp"
#include "einst/evaluator.hpp"
#include "einst/instance_synthesis.hpp"
#include "einst/instruction_synthesis.hpp"
#include "einst/metric.hpp"
#include "einst/pipeline.hpp"

namespace py = pybind11;
using namespace einst;

namespace {

py::dict instance_to_dict(const InstanceResult& result) {
  py::dict d;
  if (const auto* reason = std::get_if<RejectionReason>(&result)) {
    d["ok"] = false;
    d["reason"] = std::string(to_string(*reason));
    return d;
  }
  const auto& p = std::get<ParsedInstance>(result);
  d["ok"] = true;
  d["instruction"] = p.instruction;
  d["input"] = p.input;
  d["output"] = p.output;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ensemble-Instruct core";

  static py::exception<Error> error(m, "EinstError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.category())) + ": " + e.what()).c_str());
    }
  });

  m.def("tokenize", [](std::string_view text) {
    const auto t = tokenize(text);
    return std::vector<std::string>(t.tokens().begin(), t.tokens().end());
  });
  m.def("lcs_length", [](std::vector<std::string> a, std::vector<std::string> b) {
    return lcs_length(TokenSeq(std::move(a)), TokenSeq(std::move(b)));
  });
  m.def(
      "rouge_l",
      [](std::string_view candidate, std::string_view reference) {
        const auto s = rouge_l(candidate, reference);
        return py::dict(py::arg("precision") = s.precision, py::arg("recall") = s.recall,
                        py::arg("f1") = s.f1);
      },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "is_novel",
      [](std::string_view candidate, const std::vector<std::string>& existing) {
        return is_novel(candidate, existing);
      },
      py::arg("candidate"), py::arg("existing"));

  m.def(
      "parse_instance",
      [](std::string_view raw, const std::string& type, std::string_view instruction,
         bool truncated) {
        return instance_to_dict(parse_instance(raw, parse_task_type(type), instruction, truncated));
      },
      py::arg("raw"), py::arg("task_type"), py::arg("instruction") = "",
      py::arg("truncated") = false);

  m.def(
      "ensemble_select",
      [](const std::array<std::string, 3>& outputs, double threshold) {
        const auto d = ensemble_select(CandidateOutputs{outputs, {"o1", "o2", "o3"}}, threshold);
        py::dict out;
        out["selected"] = d.selected;
        out["selected_index"] = d.selected_index;
        out["pair_scores"] = d.pair_scores;
        out["min_score"] = d.min_score;
        return out;
      },
      py::arg("outputs"), py::arg("threshold") = kDefaultConsensusThreshold);

  m.def(
      "compute_stats",
      [](std::size_t instructions, std::size_t valid, std::size_t ensembled) {
        const auto s = compute_stats(instructions, valid, ensembled);
        auto d = py::dict();
        d["instructions"] = s.instructions;
        d["valid_instances"] = s.valid_instances;
        d["ensembled"] = s.ensembled;
        d["percent_ensembled"] = s.percent_ensembled;
        d["cell"] = s.ensembled_cell();
        return d;
      },
      py::arg("instructions"), py::arg("valid_instances"), py::arg("ensembled"));

  m.def(
      "score_record",
      [](const std::string& prediction, std::vector<std::string> references) {
        return score_record(EvalRecord{"", "", prediction, std::move(references)});
      },
      py::arg("prediction"), py::arg("references"));
  m.def(
      "evaluate",
      [](const std::filesystem::path& predictions, const std::filesystem::path& references) {
        return evaluate(predictions, references).to_json().dump();
      },
      py::arg("predictions"), py::arg("references"),
      "Returns the report as a JSON string.");

  m.def(
      "build",
      [](const std::filesystem::path& config) {
        py::gil_scoped_release release;
        Pipeline p(load_config(config));
        return p.build().dump();
      },
      py::arg("config"), "Runs every stage; returns the stats document as a JSON string.");
}
