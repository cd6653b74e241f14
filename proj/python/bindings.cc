#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "trackscope/census.h"
#include "trackscope/classify.h"
#include "trackscope/error.h"
#include "trackscope/fixture_corpus.h"
#include "trackscope/har.h"
#include "trackscope/leakage.h"
#include "trackscope/ownership.h"
#include "trackscope/pipeline.h"
#include "trackscope/public_suffix.h"
#include "trackscope/run_config.h"
#include "trackscope/store.h"
#include "trackscope/uri.h"

namespace py = pybind11;
using namespace trackscope;

namespace {

std::string_view LookupStatusName(LookupStatus status) {
  switch (status) {
    case LookupStatus::kMatched: return "matched";
    case LookupStatus::kHeuristic: return "heuristic";
    case LookupStatus::kIpLiteral: return "ip_literal";
    case LookupStatus::kPublicSuffix: return "public_suffix";
  }
  return "";
}

Stage StageFromName(const std::string& name) {
  for (Stage stage : {Stage::kPageList, Stage::kScan, Stage::kAnalyze, Stage::kReport,
                      Stage::kLeakage}) {
    if (StageName(stage) == name) return stage;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown stage " + name);
}

ConfigResolver MakeResolver(const std::string& data_dir,
                            const std::map<std::string, std::string>& settings) {
  ConfigResolver resolver(data_dir);
  for (const auto& [key, value] : settings) resolver.ApplyFlag(key, value);
  return resolver;
}

}  // namespace

PYBIND11_MODULE(_trackscope, m) {
  m.doc() = "Third-party tracking census: classification, attribution and reporting";

  static py::exception<Error> error_type(m, "TrackscopeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr pointer) {
    try {
      if (pointer) std::rethrow_exception(pointer);
    } catch (const Error& e) {
      py::object instance = py::handle(error_type.ptr())(e.what());
      instance.attr("code") = std::string(ErrorCodeName(e.code()));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<PublicSuffixRuleset>(m, "Ruleset")
      .def_static("load", &PublicSuffixRuleset::LoadFile, py::arg("path"))
      .def_static("parse", &PublicSuffixRuleset::Parse, py::arg("text"),
                  py::arg("snapshot_id"))
      .def_property_readonly("snapshot_id", &PublicSuffixRuleset::snapshot_id)
      .def("__len__", &PublicSuffixRuleset::size)
      .def(
          "lookup",
          [](const PublicSuffixRuleset& ruleset, const std::string& host) {
            DomainLookup lookup = ruleset.Lookup(host);
            py::dict out;
            out["status"] = std::string(LookupStatusName(lookup.status));
            out["domain"] = lookup.domain ? py::cast(lookup.domain->value) : py::none();
            out["public_suffix"] = lookup.public_suffix;
            return out;
          },
          py::arg("host"))
      .def(
          "registrable_domain",
          [](const PublicSuffixRuleset& ruleset, const std::string& host) {
            return DomainOrSelf(host, ruleset).value;
          },
          py::arg("host"), "Registrable domain; public-suffix hosts stand for themselves.");

  m.def(
      "classify_party",
      [](const PublicSuffixRuleset& ruleset, const std::string& page_host,
         const std::string& request_host) {
        return std::string(PartyClassName(ClassifyParty(
            DomainOrSelf(page_host, ruleset), DomainOrSelf(request_host, ruleset))));
      },
      py::arg("ruleset"), py::arg("page_host"), py::arg("request_host"));

  m.def(
      "strip_arguments",
      [](const std::string& uri) { return StripArguments(ParseUri(uri)); }, py::arg("uri"));
  m.def("normalize_page_uri", &NormalizePageUri, py::arg("uri"));
  m.def(
      "categorize_tld", [](const std::string& host) { return CategorizeTld(host).Name(); },
      py::arg("host"));
  m.def(
      "extension_class",
      [](const std::string& uri) {
        ExtensionClass ext = ExtractExtension(ParseUri(uri));
        return py::make_tuple(std::string(ExtensionKindName(ext.kind)), ext.extension);
      },
      py::arg("uri"), "(class name, lowercase extension) of a request URI.");

  py::class_<OwnershipDb>(m, "OwnershipDb")
      .def_static("load", &OwnershipDb::LoadFile, py::arg("path"))
      .def_static("parse", &OwnershipDb::Parse, py::arg("text"))
      .def_property_readonly("version", &OwnershipDb::version)
      .def("__len__", &OwnershipDb::domain_count)
      .def(
          "resolve",
          [](const OwnershipDb& db, const std::string& domain) {
            return ResolveOwner(RegistrableDomain{domain}, db);
          },
          py::arg("domain"));

  py::class_<Lexicon>(m, "Lexicon")
      .def_static("load", &Lexicon::LoadFile, py::arg("path"))
      .def_static("parse", &Lexicon::Parse, py::arg("text"))
      .def_property_readonly("source_id", &Lexicon::source_id)
      .def("__len__", [](const Lexicon& lexicon) { return lexicon.terms().size(); })
      .def("__contains__", &Lexicon::Contains);

  m.def("normalize_text", &NormalizeText, py::arg("text"));
  m.def(
      "detect_sensitive",
      [](const std::string& uri, const Lexicon& lexicon, bool include_host) {
        LeakageVerdict verdict =
            DetectSensitive(ParseUri(uri), lexicon, TextOptions{include_host});
        py::list terms;
        for (const TermMatch& match : verdict.matches) terms.append(match.term);
        py::dict out;
        out["sensitive"] = verdict.sensitive;
        out["terms"] = terms;
        out["normalized_text"] = verdict.normalized_text;
        return out;
      },
      py::arg("uri"), py::arg("lexicon"), py::arg("include_host") = false);
  m.def("sample_indices", &SampleIndices, py::arg("population"), py::arg("n"),
        py::arg("seed"));

  m.def(
      "summarize_hars",
      [](const std::vector<std::string>& har_paths, const PublicSuffixRuleset& ruleset,
         const OwnershipDb& db, uint32_t top_n) {
        CensusConfig config{top_n, ruleset.snapshot_id(), db.version()};
        std::vector<CensusRecord> records;
        {
          py::gil_scoped_release release;
          for (const std::string& path : har_paths) {
            for (const PageLoadResult& page : IngestHarFile(path))
              records.push_back(BuildCensusRecord(page, ruleset, DefaultTaxonomy()));
          }
        }
        ReportBundle bundle{Summarize(records, db, config),
                            Provenance{std::string(kRecordSchemaVersion),
                                       ruleset.snapshot_id(), db.version(), ""},
                            std::nullopt};
        return SummaryToJson(bundle);
      },
      py::arg("har_paths"), py::arg("ruleset"), py::arg("ownership_db"),
      py::arg("top_n") = 100, "Census summary of HAR files as a JSON document.");

  m.def(
      "write_fixture_corpus",
      [](const std::string& directory, size_t pages_per_file) {
        FixtureLayout layout;
        {
          py::gil_scoped_release release;
          layout = WriteFixtureCorpus(GenerateFixtureCorpus(), directory, pages_per_file);
        }
        py::dict out;
        out["har_dir"] = layout.har_dir;
        out["ownership_db"] = layout.ownership_db;
        out["page_list"] = layout.page_list;
        return out;
      },
      py::arg("directory"), py::arg("pages_per_file") = 100);

  m.def(
      "describe_config",
      [](const std::string& data_dir, const std::map<std::string, std::string>& settings) {
        ConfigResolver resolver = MakeResolver(data_dir, settings);
        resolver.Resolve();
        return resolver.Describe();
      },
      py::arg("data_dir"), py::arg("settings") = std::map<std::string, std::string>{});

  m.def(
      "run_pipeline",
      [](const std::vector<std::string>& stage_names, const std::string& data_dir,
         const std::map<std::string, std::string>& settings) {
        std::vector<Stage> stages;
        for (const std::string& name : stage_names) stages.push_back(StageFromName(name));
        ConfigResolver resolver = MakeResolver(data_dir, settings);
        RunConfig config = resolver.Resolve();
        std::ostringstream log;
        PipelineOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = RunPipeline(config, stages, resolver.Digest(), log);
        }
        py::dict out;
        out["exit_code"] = outcome.exit_code;
        out["failure"] = outcome.failure;
        out["message"] = outcome.message;
        out["run_dir"] = outcome.run_dir;
        out["artifacts"] = outcome.artifacts;
        out["log"] = log.str();
        return out;
      },
      py::arg("stages"), py::arg("data_dir"),
      py::arg("settings") = std::map<std::string, std::string>{});
}
