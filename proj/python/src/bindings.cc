#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "clozeqa/augment.h"
#include "clozeqa/cli.h"
#include "clozeqa/dataset.h"
#include "clozeqa/error.h"
#include "clozeqa/eval.h"
#include "clozeqa/gazetteer.h"
#include "clozeqa/matcher.h"

namespace py = pybind11;
using namespace clozeqa;

namespace {

NormalizationOptions norm(bool case_fold, bool collapse_whitespace, std::size_t min_surface_chars) {
  NormalizationOptions o;
  o.case_fold = case_fold;
  o.collapse_internal_whitespace = collapse_whitespace;
  o.min_surface_chars = min_surface_chars;
  return o;
}

py::dict stats_dict(const GazetteerStats& s) {
  py::dict d;
  d["data_lines"] = s.data_lines;
  d["comment_lines"] = s.comment_lines;
  d["retained"] = s.retained;
  d["rejected_malformed"] = s.rejected_malformed;
  d["rejected_short"] = s.rejected_short;
  d["deduplicated"] = s.deduplicated;
  return d;
}

py::object span_tuple(const std::optional<text::ByteRange>& r) {
  if (!r) return py::none();
  return py::make_tuple(r->start, r->end);
}

}  // namespace

PYBIND11_MODULE(_clozeqa, m) {
  m.doc() = "Entity-aware cloze augmentation for few-shot QA";
  m.attr("__version__") = CLOZEQA_VERSION;

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def("normalize_surface",
        [](std::string_view s, bool case_fold, bool collapse_whitespace) {
          return normalize_surface(s, norm(case_fold, collapse_whitespace, 2));
        },
        py::arg("surface"), py::arg("case_fold") = false, py::arg("collapse_whitespace") = true);

  py::class_<Gazetteer>(m, "Gazetteer")
      .def_static(
          "from_records",
          [](const std::vector<std::pair<std::string, std::string>>& rows, bool case_fold,
             bool collapse_whitespace, std::size_t min_surface_chars) {
            std::vector<EntityRecord> records;
            records.reserve(rows.size());
            for (const auto& [id, surface] : rows) records.push_back({id, surface});
            return Gazetteer::from_records(records,
                                           norm(case_fold, collapse_whitespace, min_surface_chars));
          },
          py::arg("records"), py::arg("case_fold") = false,
          py::arg("collapse_whitespace") = true, py::arg("min_surface_chars") = 2)
      .def_static(
          "load",
          [](const std::filesystem::path& path, bool case_fold, bool collapse_whitespace,
             std::size_t min_surface_chars) {
            return load_gazetteer(path, norm(case_fold, collapse_whitespace, min_surface_chars));
          },
          py::arg("path"), py::arg("case_fold") = false, py::arg("collapse_whitespace") = true,
          py::arg("min_surface_chars") = 2)
      .def_property_readonly("records",
                             [](const Gazetteer& g) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& r : g.records()) out.emplace_back(r.entity_id, r.surface);
                               return out;
                             })
      .def_property_readonly("surfaces", &Gazetteer::surfaces)
      .def_property_readonly("stats", [](const Gazetteer& g) { return stats_dict(g.stats()); })
      .def("entity_ids",
           [](const Gazetteer& g, std::string_view surface) {
             std::vector<std::string> out;
             for (auto id : g.entity_ids(surface)) out.emplace_back(id);
             return out;
           })
      .def("fingerprint", &Gazetteer::fingerprint)
      .def("__len__", &Gazetteer::surface_count);

  py::class_<EntitySpan>(m, "EntitySpan")
      .def_readonly("surface", &EntitySpan::surface)
      .def_readonly("entity_id", &EntitySpan::entity_id)
      .def_readonly("start", &EntitySpan::start)
      .def_readonly("end", &EntitySpan::end)
      .def("__repr__", [](const EntitySpan& s) {
        return "EntitySpan('" + s.surface + "', " + std::to_string(s.start) + ", " +
               std::to_string(s.end) + ")";
      });

  py::class_<MatchAutomaton>(m, "Automaton")
      .def(py::init(&MatchAutomaton::build), py::arg("gazetteer"))
      .def_property_readonly("pattern_count", &MatchAutomaton::pattern_count)
      .def(
          "find_all",
          [](const MatchAutomaton& a, std::string_view text) {
            std::vector<std::tuple<std::size_t, std::size_t, std::string, std::string>> out;
            for (const auto& r : a.find_all(text)) {
              out.emplace_back(r.start, r.end, std::string(r.surface), std::string(r.entity_id));
            }
            return out;
          },
          py::arg("text"), "All (start, end, surface, entity_id) matches, byte offsets.")
      .def(
          "spans",
          [](const MatchAutomaton& a, std::string_view text) {
            return resolve_spans(a.find_all(text), text);
          },
          py::arg("text"), "Boundary-filtered, non-overlapping leftmost-longest spans.");

  py::class_<QAExample>(m, "QAExample")
      .def(py::init([](std::string qid, std::string question, std::string context,
                       std::vector<std::string> answers) {
             QAExample e;
             e.qid = std::move(qid);
             e.question = std::move(question);
             e.context = std::move(context);
             e.gold_answers = std::move(answers);
             return e;
           }),
           py::arg("qid"), py::arg("question"), py::arg("context"), py::arg("answers"))
      .def_readonly("qid", &QAExample::qid)
      .def_readonly("question", &QAExample::question)
      .def_readonly("context", &QAExample::context)
      .def_readonly("answers", &QAExample::gold_answers);

  m.def("load_mrqa", [](const std::filesystem::path& p) { return load_mrqa(p).examples; },
        py::arg("path"));
  m.def(
      "sample_few_shot",
      [](const std::vector<QAExample>& examples, std::size_t k, std::uint64_t seed) {
        return sample_few_shot(examples, k, seed).selected_qids;
      },
      py::arg("examples"), py::arg("k"), py::arg("seed"));

  py::class_<PromptPair>(m, "PromptPair")
      .def_readonly("id", &PromptPair::id)
      .def_property_readonly("kind", [](const PromptPair& p) { return std::string(to_string(p.kind)); })
      .def_property_readonly("template",
                             [](const PromptPair& p) { return std::string(to_string(p.template_kind)); })
      .def_readonly("source_qid", &PromptPair::source_qid)
      .def_readonly("input", &PromptPair::input_text)
      .def_readonly("target", &PromptPair::target_text)
      .def_readonly("question", &PromptPair::question)
      .def_readonly("answer", &PromptPair::answer)
      .def_readonly("context", &PromptPair::context)
      .def_property_readonly("span", [](const PromptPair& p) { return span_tuple(p.span); })
      .def_readonly("entity_id", &PromptPair::entity_id)
      .def("to_json", [](const PromptPair& p) { return to_json(p).dump(); });

  py::class_<AugmentedSet>(m, "AugmentedSet")
      .def_readonly("ori_pairs", &AugmentedSet::ori_pairs)
      .def_readonly("aug_pairs", &AugmentedSet::aug_pairs)
      .def("to_jsonl",
           [](const AugmentedSet& s) {
             std::ostringstream out;
             write_jsonl(s, out);
             return out.str();
           })
      .def("stats_json", [](const AugmentedSet& s) { return stats_json(s).dump(); });

  m.def("render_qa_prompt",
        [](const QAExample& e, const std::string& mask_token) { return render_qa_prompt(e, mask_token); },
        py::arg("example"), py::arg("mask_token") = std::string(kDefaultMaskToken));

  m.def(
      "augment",
      [](const std::vector<QAExample>& examples, const MatchAutomaton& automaton,
         const std::string& template_kind, std::uint64_t seed, std::string mask_token,
         std::string separator, const std::string& target_context, bool exclude_answer_overlap,
         bool mask_all_occurrences, std::optional<std::size_t> random_count, std::size_t threads) {
        AugmentOptions o;
        o.template_kind = parse_template_kind(template_kind);
        o.seed = seed;
        o.prompt.mask_token = std::move(mask_token);
        o.prompt.separator = std::move(separator);
        if (target_context == "original") {
          o.prompt.target_context = TargetContext::kOriginal;
        } else if (target_context != "masked") {
          throw py::value_error("target_context must be 'masked' or 'original'");
        }
        o.exclude_answer_overlap = exclude_answer_overlap;
        o.mask_all_occurrences = mask_all_occurrences;
        o.random_count = random_count;
        o.threads = threads;
        py::gil_scoped_release release;
        return augment_dataset(examples, automaton, o);
      },
      py::arg("examples"), py::arg("automaton"), py::arg("template") = "gotta",
      py::arg("seed") = 0, py::arg("mask_token") = std::string(kDefaultMaskToken),
      py::arg("separator") = " ", py::arg("target_context") = "masked",
      py::arg("exclude_answer_overlap") = false, py::arg("mask_all_occurrences") = false,
      py::arg("random_count") = py::none(), py::arg("threads") = 1);

  m.def("normalize_answer", &normalize_answer, py::arg("text"));
  m.def("token_f1", &token_f1, py::arg("prediction"), py::arg("gold"));
  m.def(
      "score_example",
      [](std::string_view pred, const std::vector<std::string>& golds) {
        return score_example(pred, golds);
      },
      py::arg("prediction"), py::arg("golds"));
  m.def(
      "aggregate",
      [](const std::vector<double>& runs) {
        const EvalReport r = aggregate(std::span<const double>(runs));
        return py::make_tuple(r.mean_f1, r.std_f1);
      },
      py::arg("run_means"), "(mean, population std) of per-run mean F1.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a clozeqa subcommand; returns (exit_code, stdout, stderr).");
}
