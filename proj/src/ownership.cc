#include "trackscope/ownership.h"

#include <algorithm>

#include "trackscope/digest.h"
#include "trackscope/error.h"
#include "trackscope/uri.h"

namespace trackscope {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void Schema(size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kSchemaError,
              "ownership db line " + std::to_string(line_no) + ": " + what);
}

bool IsIdChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '_' || c == '.';
}

}  // namespace

RevenueModel RevenueModel::FromLabel(std::string_view text) {
  if (text == "Advertising") return {Kind::kAdvertising, {}};
  if (text == "Data Broker") return {Kind::kDataBroker, {}};
  if (text == "Retail & Hosting") return {Kind::kRetailAndHosting, {}};
  if (text == "Software & Services") return {Kind::kSoftwareAndServices, {}};
  return {Kind::kOther, std::string(text)};
}

std::string RevenueModel::Label() const {
  switch (kind) {
    case Kind::kAdvertising: return "Advertising";
    case Kind::kDataBroker: return "Data Broker";
    case Kind::kRetailAndHosting: return "Retail & Hosting";
    case Kind::kSoftwareAndServices: return "Software & Services";
    case Kind::kOther: return label;
  }
  return label;
}

OwnershipDb OwnershipDb::Parse(std::string_view text) {
  OwnershipDb db;
  std::vector<OwnerRecord> records;
  std::vector<size_t> record_lines;
  bool version_seen = false;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = Trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') Schema(line_no, "unterminated section");
      std::string_view inner = Trim(line.substr(1, line.size() - 2));
      if (inner.substr(0, 6) != "owner ") Schema(line_no, "expected [owner <id>]");
      std::string id(Trim(inner.substr(6)));
      if (id.empty() || !std::all_of(id.begin(), id.end(), IsIdChar))
        Schema(line_no, "invalid owner id '" + id + "'");
      if (id == kUnattributed) Schema(line_no, "owner id is reserved");
      records.push_back(OwnerRecord{id, {}, {}, {}});
      record_lines.push_back(line_no);
      continue;
    }

    size_t colon = line.find(':');
    if (colon == std::string_view::npos) Schema(line_no, "expected key: value");
    std::string_view key = Trim(line.substr(0, colon));
    std::string_view value = Trim(line.substr(colon + 1));

    if (records.empty()) {
      if (key == "version") {
        db.version_ = std::string(value);
        version_seen = true;
      } else if (key == "built_at") {
        db.built_at_ = std::string(value);
      } else {
        Schema(line_no, "unknown header key '" + std::string(key) + "'");
      }
      continue;
    }

    OwnerRecord& record = records.back();
    if (key == "display_name") {
      record.display_name = std::string(value);
    } else if (key == "revenue_model") {
      record.revenue_model = RevenueModel::FromLabel(value);
    } else if (key == "domains") {
      while (!value.empty()) {
        size_t comma = value.find(',');
        std::string domain = CanonicalHost(Trim(value.substr(0, comma)));
        value = comma == std::string_view::npos ? std::string_view()
                                                : value.substr(comma + 1);
        if (domain.empty()) continue;
        if (!record.domains.insert(domain).second)
          Schema(line_no, "domain " + domain + " listed twice for " + record.id);
      }
    } else {
      Schema(line_no, "unknown owner key '" + std::string(key) + "'");
    }
  }

  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].display_name.empty())
      Schema(record_lines[i], "owner " + records[i].id + " has no display_name");
    if (records[i].domains.empty())
      Schema(record_lines[i], "owner " + records[i].id + " has no domains");
  }
  std::sort(records.begin(), records.end(),
            [](const OwnerRecord& a, const OwnerRecord& b) { return a.id < b.id; });
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].id == records[i - 1].id)
      throw Error(ErrorCode::kSchemaError, "duplicate owner id " + records[i].id);
  }
  for (size_t i = 0; i < records.size(); ++i) {
    for (const std::string& domain : records[i].domains) {
      auto [it, inserted] = db.by_domain_.emplace(domain, i);
      if (!inserted) {
        throw Error(ErrorCode::kDuplicateDomain,
                    domain + " claimed by " + records[it->second].id + " and " +
                        records[i].id);
      }
    }
  }
  db.records_ = std::move(records);
  if (!version_seen) db.version_ = "sha256:" + Sha256Hex(text);
  return db;
}

OwnershipDb OwnershipDb::LoadFile(const std::string& path) {
  return Parse(ReadFileToString(path));
}

const OwnerRecord* OwnershipDb::Find(const RegistrableDomain& domain) const {
  auto it = by_domain_.find(CanonicalHost(domain.value));
  return it == by_domain_.end() ? nullptr : &records_[it->second];
}

const OwnerRecord* OwnershipDb::FindById(std::string_view id) const {
  auto it = std::lower_bound(
      records_.begin(), records_.end(), id,
      [](const OwnerRecord& r, std::string_view key) { return r.id < key; });
  return it != records_.end() && it->id == id ? &*it : nullptr;
}

std::string ResolveOwner(const RegistrableDomain& domain, const OwnershipDb& db) {
  const OwnerRecord* owner = db.Find(domain);
  return owner ? owner->id : std::string(kUnattributed);
}

void OwnerTally::AddPage(const std::set<RegistrableDomain>& third_party_domains,
                         const OwnershipDb& db) {
  ++loaded_pages_;
  std::set<std::string> owners;
  bool unattributed = false;
  for (const RegistrableDomain& domain : third_party_domains) {
    if (const OwnerRecord* owner = db.Find(domain)) {
      owners.insert(owner->id);
    } else {
      unattributed = true;
    }
  }
  for (const std::string& id : owners) ++counts_[id];
  if (unattributed) ++unattributed_;
}

void OwnerTally::Merge(const OwnerTally& other) {
  for (const auto& [id, count] : other.counts_) counts_[id] += count;
  unattributed_ += other.unattributed_;
  loaded_pages_ += other.loaded_pages_;
}

OwnerRanking OwnerTally::Rank(const OwnershipDb& db) const {
  OwnerRanking ranking;
  ranking.loaded_pages = loaded_pages_;
  ranking.unattributed.id = std::string(kUnattributed);
  ranking.unattributed.display_name = "Unattributed";
  if (loaded_pages_ == 0) return ranking;
  for (const auto& [id, count] : counts_) {
    const OwnerRecord* owner = db.FindById(id);
    ranking.owners.push_back(
        OwnerShare{id, owner ? owner->display_name : id,
                   owner ? owner->revenue_model.Label() : std::string(),
                   count, Percent::Of(count, loaded_pages_)});
  }
  std::stable_sort(ranking.owners.begin(), ranking.owners.end(),
                   [](const OwnerShare& a, const OwnerShare& b) {
                     if (a.pages != b.pages) return a.pages > b.pages;
                     return a.id < b.id;
                   });
  ranking.unattributed.pages = unattributed_;
  ranking.unattributed.percent = Percent::Of(unattributed_, loaded_pages_);
  return ranking;
}

OwnerRanking RankOwnerPrevalence(
    const std::vector<std::set<RegistrableDomain>>& loaded_pages,
    const OwnershipDb& db) {
  OwnerTally tally;
  for (const auto& domains : loaded_pages) tally.AddPage(domains, db);
  return tally.Rank(db);
}

}  // namespace trackscope
