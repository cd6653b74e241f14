#include "trackscope/store.h"

#include <algorithm>
#include <filesystem>
#include <tuple>

#include "json.hpp"
#include "trackscope/digest.h"
#include "trackscope/error.h"

namespace trackscope {

namespace {

using nlohmann::json;

json ProvenanceToJson(const Provenance& p) {
  return json{{"schema_version", p.schema_version},
              {"ruleset", p.ruleset_id},
              {"ownership_db", p.ownership_version},
              {"lexicon", p.lexicon_id}};
}

const json& Require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kSerializationError, std::string("missing field ") + key);
  }
  return *it;
}

std::string CsvField(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string CsvRow(std::initializer_list<std::string_view> fields) {
  std::string row;
  bool first = true;
  for (std::string_view field : fields) {
    if (!first) row.push_back(',');
    row += CsvField(field);
    first = false;
  }
  row.push_back('\n');
  return row;
}

std::string CsvPreamble(const Provenance& p, size_t top_n) {
  return "# schema_version=" + std::string(kSummarySchemaVersion) + "\n" +
         "# ruleset=" + p.ruleset_id + "\n" +
         "# ownership_db=" + p.ownership_version + "\n" +
         "# lexicon=" + p.lexicon_id + "\n" +
         "# top_n=" + std::to_string(top_n) + "\n";
}

json PrevalenceToJson(const CategoryPrevalence& row) {
  return json{{"loaded_pages", row.loaded_pages},
              {"third_party_request_pages", row.third_party_request_pages},
              {"third_party_javascript_pages", row.third_party_javascript_pages},
              {"third_party_cookie_pages", row.third_party_cookie_pages},
              {"pct_third_party_requests", row.third_party_requests.ToFixed2()},
              {"pct_third_party_javascript", row.third_party_javascript.ToFixed2()},
              {"pct_third_party_cookies", row.third_party_cookies.ToFixed2()}};
}

json OwnerToJson(const OwnerShare& share) {
  return json{{"id", share.id},
              {"display_name", share.display_name},
              {"revenue_model", share.revenue_model},
              {"pages", share.pages},
              {"percent", share.percent.ToFixed2()}};
}

json LeakageToJson(const LeakageSampleReport& r) {
  return json{{"population_size", r.population_size},
              {"sample_size", r.sample_size},
              {"seed", r.seed},
              {"clamped", r.clamped},
              {"sampler", r.sampler},
              {"lexicon", r.lexicon_id},
              {"sensitive_count", r.sensitive_count},
              {"https_count", r.https_count},
              {"sensitive_share", r.sensitive_share.ToFixed2()},
              {"https_share", r.https_share.ToFixed2()}};
}

}  // namespace

std::string SerializeRecord(const CensusRecord& record) {
  json domains = json::array();
  for (const RegistrableDomain& domain : record.third_party_domains)
    domains.push_back(domain.value);
  json elements = json::array();
  for (const ElementRecord& element : record.elements) {
    elements.push_back(
        json{{"uri", element.stripped_uri},
             {"class", std::string(ExtensionKindName(element.extension_class.kind))},
             {"ext", element.extension_class.extension},
             {"domain", element.request_domain.value}});
  }
  json out{{"page_uri", record.page_uri},
           {"requested_uri", record.requested_uri},
           {"tld", record.tld_category.Name()},
           {"third_party_request", record.flags.has_third_party_request},
           {"third_party_javascript", record.flags.has_third_party_javascript},
           {"third_party_cookie", record.flags.has_third_party_cookie},
           {"third_party_domains", std::move(domains)},
           {"elements", std::move(elements)},
           {"https", record.https},
           {"status", record.load_status.ToString()},
           {"malformed_requests", record.malformed_requests}};
  return out.dump();
}

CensusRecord DeserializeRecord(std::string_view line) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error(ErrorCode::kSerializationError, "not a JSON object");
  try {
    CensusRecord record;
    record.page_uri = Require(obj, "page_uri").get<std::string>();
    record.requested_uri = Require(obj, "requested_uri").get<std::string>();
    record.tld_category =
        TldCategory::FromName(Require(obj, "tld").get<std::string>());
    record.flags.has_third_party_request =
        Require(obj, "third_party_request").get<bool>();
    record.flags.has_third_party_javascript =
        Require(obj, "third_party_javascript").get<bool>();
    record.flags.has_third_party_cookie =
        Require(obj, "third_party_cookie").get<bool>();
    for (const json& domain : Require(obj, "third_party_domains"))
      record.third_party_domains.insert({domain.get<std::string>()});
    for (const json& element : Require(obj, "elements")) {
      auto kind = ExtensionKindFromName(Require(element, "class").get<std::string>());
      if (!kind) throw Error(ErrorCode::kSerializationError, "bad element class");
      record.elements.push_back(
          {Require(element, "uri").get<std::string>(),
           {*kind, Require(element, "ext").get<std::string>()},
           {Require(element, "domain").get<std::string>()}});
    }
    record.https = Require(obj, "https").get<bool>();
    auto status = LoadStatus::FromString(Require(obj, "status").get<std::string>());
    if (!status) throw Error(ErrorCode::kSerializationError, "bad status");
    record.load_status = *status;
    record.malformed_requests = Require(obj, "malformed_requests").get<size_t>();
    return record;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSerializationError, e.what());
  }
}

std::string SerializeRecords(std::vector<CensusRecord> records,
                             const Provenance& provenance) {
  std::vector<std::tuple<std::string_view, std::string_view, std::string>> lines;
  lines.reserve(records.size());
  for (const CensusRecord& record : records)
    lines.emplace_back(record.page_uri, record.requested_uri, SerializeRecord(record));
  std::sort(lines.begin(), lines.end());
  std::string out = ProvenanceToJson(provenance).dump() + "\n";
  for (const auto& line : lines) out += std::get<2>(line) + "\n";
  return out;
}

size_t WriteRecords(const std::vector<CensusRecord>& records,
                    const Provenance& provenance, const std::string& path) {
  WriteStringToFile(path, SerializeRecords(records, provenance));
  return records.size();
}

RecordLog ParseRecords(std::string_view text, ReadOptions options) {
  RecordLog log;
  size_t pos = 0;
  size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    if (!header_seen) {
      json header = json::parse(line, nullptr, false);
      if (header.is_discarded() || !header.is_object() ||
          !header.contains("schema_version")) {
        throw Error(ErrorCode::kSchemaVersionMismatch, "record log has no header");
      }
      log.provenance.schema_version = header.value("schema_version", "");
      if (log.provenance.schema_version != kRecordSchemaVersion) {
        throw Error(ErrorCode::kSchemaVersionMismatch,
                    "expected " + std::string(kRecordSchemaVersion) + ", found " +
                        log.provenance.schema_version);
      }
      log.provenance.ruleset_id = header.value("ruleset", "");
      log.provenance.ownership_version = header.value("ownership_db", "");
      log.provenance.lexicon_id = header.value("lexicon", "");
      header_seen = true;
      continue;
    }
    try {
      log.records.push_back(DeserializeRecord(line));
    } catch (const Error& e) {
      if (!options.tolerant) {
        throw Error(ErrorCode::kCorruptLine,
                    "line " + std::to_string(line_no) + ": " + e.what());
      }
      ++log.corrupt_lines;
    }
  }
  if (!header_seen) {
    throw Error(ErrorCode::kSchemaVersionMismatch, "record log has no header");
  }
  return log;
}

std::string LeakageReportToJson(const LeakageSampleReport& report) {
  return LeakageToJson(report).dump(2) + "\n";
}

RecordLog ReadRecords(const std::string& path, ReadOptions options) {
  return ParseRecords(ReadFileToString(path), options);
}

std::string SummaryToJson(const ReportBundle& bundle) {
  const CensusSummary& s = bundle.summary;
  json categories = json::object();
  for (const auto& [category, row] : s.per_category)
    categories[category.Name()] = PrevalenceToJson(row);

  json histogram = json::object();
  for (const auto& [kind, percent] : s.extension_histogram)
    histogram[std::string(ExtensionKindName(kind))] = percent;

  json top = json::array();
  for (const ElementPrevalence& element : s.top_elements) {
    top.push_back(
        json{{"element", element.stripped_uri},
             {"class", std::string(ExtensionKindName(element.extension_class.kind))},
             {"pages", element.pages},
             {"percent", element.percent.ToFixed2()}});
  }
  json owners = json::array();
  for (const OwnerShare& share : s.owner_ranking.owners)
    owners.push_back(OwnerToJson(share));

  json failures = json::array();
  for (const FailureRow& row : s.failures)
    failures.push_back(json{{"page_uri", row.page_uri}, {"status", row.status}});

  json doc{{"schema_version", std::string(kSummarySchemaVersion)},
           {"provenance", ProvenanceToJson(bundle.provenance)},
           {"top_n", s.config.top_n},
           {"pages_total", s.pages_total},
           {"pages_loaded", s.pages_loaded},
           {"pages_timeout", s.pages_timeout},
           {"pages_error", s.pages_error},
           {"malformed_requests", s.malformed_requests},
           {"prevalence",
            json{{"all", PrevalenceToJson(s.all)}, {"by_tld", std::move(categories)}}},
           {"extension_histogram", std::move(histogram)},
           {"top_elements", std::move(top)},
           {"owner_ranking",
            json{{"owners", std::move(owners)},
                 {"unattributed", OwnerToJson(s.owner_ranking.unattributed)}}},
           {"https_pages", s.https_pages},
           {"https_share", s.https_share.ToFixed2()},
           {"load_failures", std::move(failures)}};
  if (bundle.leakage) doc["leakage"] = LeakageToJson(*bundle.leakage);
  return doc.dump(2) + "\n";
}

std::vector<std::pair<std::string, std::string>> SummaryToCsvTables(
    const ReportBundle& bundle) {
  const CensusSummary& s = bundle.summary;
  const std::string preamble = CsvPreamble(bundle.provenance, s.config.top_n);
  std::vector<std::pair<std::string, std::string>> tables;

  std::string overview = preamble + CsvRow({"metric", "value"});
  overview += CsvRow({"pages_total", std::to_string(s.pages_total)});
  overview += CsvRow({"pages_loaded", std::to_string(s.pages_loaded)});
  overview += CsvRow({"pages_timeout", std::to_string(s.pages_timeout)});
  overview += CsvRow({"pages_error", std::to_string(s.pages_error)});
  overview += CsvRow({"malformed_requests", std::to_string(s.malformed_requests)});
  overview += CsvRow({"https_share", s.https_share.ToFixed2()});
  tables.emplace_back("overview.csv", std::move(overview));

  std::string prevalence =
      preamble + CsvRow({"category", "loaded_pages", "third_party_requests",
                         "third_party_javascript", "third_party_cookies"});
  auto add_row = [&](const std::string& name, const CategoryPrevalence& row) {
    prevalence += CsvRow({name, std::to_string(row.loaded_pages),
                          row.third_party_requests.ToInteger(),
                          row.third_party_javascript.ToInteger(),
                          row.third_party_cookies.ToInteger()});
  };
  add_row("all", s.all);
  for (const auto& [category, row] : s.per_category) add_row(category.Name(), row);
  tables.emplace_back("prevalence_by_tld.csv", std::move(prevalence));

  std::string histogram = preamble + CsvRow({"type", "percent"});
  for (const auto& [kind, percent] : s.extension_histogram)
    histogram += CsvRow({ExtensionKindName(kind), std::to_string(percent)});
  tables.emplace_back("extension_histogram.csv", std::move(histogram));

  std::string owners = preamble + CsvRow({"owner", "percent_pages"});
  for (const OwnerShare& share : s.owner_ranking.owners)
    owners += CsvRow({share.id, share.percent.ToInteger()});
  if (s.owner_ranking.loaded_pages > 0) {
    owners += CsvRow({s.owner_ranking.unattributed.id,
                      s.owner_ranking.unattributed.percent.ToInteger()});
  }
  tables.emplace_back("owner_ranking.csv", std::move(owners));

  std::string top = preamble + CsvRow({"rank", "element", "type", "pages", "percent"});
  for (size_t i = 0; i < s.top_elements.size(); ++i) {
    const ElementPrevalence& e = s.top_elements[i];
    top += CsvRow({std::to_string(i + 1), e.stripped_uri,
                   ExtensionKindName(e.extension_class.kind), std::to_string(e.pages),
                   e.percent.ToInteger()});
  }
  tables.emplace_back("top_elements.csv", std::move(top));

  std::string failures = preamble + CsvRow({"page_uri", "status"});
  for (const FailureRow& row : s.failures)
    failures += CsvRow({row.page_uri, row.status});
  tables.emplace_back("load_failures.csv", std::move(failures));

  if (bundle.leakage) {
    const LeakageSampleReport& r = *bundle.leakage;
    std::string leakage =
        preamble + CsvRow({"population_size", "sample_size", "seed", "sampler",
                           "sensitive_share", "https_share"});
    leakage += CsvRow({std::to_string(r.population_size),
                       std::to_string(r.sample_size), std::to_string(r.seed),
                       r.sampler, r.sensitive_share.ToFixed2(),
                       r.https_share.ToFixed2()});
    tables.emplace_back("leakage.csv", std::move(leakage));
  }
  return tables;
}

void ExportSummary(const ReportBundle& bundle, SummaryFormat format,
                   const std::string& destination) {
  if (format == SummaryFormat::kJson) {
    WriteStringToFile(destination, SummaryToJson(bundle));
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(destination, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + destination);
  for (const auto& [name, contents] : SummaryToCsvTables(bundle))
    WriteStringToFile((std::filesystem::path(destination) / name).string(), contents);
}

}  // namespace trackscope
