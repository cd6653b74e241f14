#ifndef TRACKSCOPE_OWNERSHIP_H_
#define TRACKSCOPE_OWNERSHIP_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trackscope/percent.h"
#include "trackscope/public_suffix.h"

namespace trackscope {

struct RevenueModel {
  enum class Kind {
    kAdvertising,
    kDataBroker,
    kRetailAndHosting,
    kSoftwareAndServices,
    kOther,
  };
  Kind kind = Kind::kOther;
  std::string label;  // only for kOther

  // "Advertising", "Data Broker", "Retail & Hosting", "Software & Services";
  // anything else is kOther carrying the text.
  static RevenueModel FromLabel(std::string_view text);
  std::string Label() const;

  bool operator==(const RevenueModel&) const = default;
};

struct OwnerRecord {
  std::string id;
  std::string display_name;
  RevenueModel revenue_model;
  std::set<std::string> domains;  // registrable domains, lowercase
};

inline constexpr std::string_view kUnattributed = "unattributed";

// Immutable registrable-domain -> owner mapping.
//
// File format (UTF-8, '#' starts a comment line):
//
//   version: 2026.10
//   built_at: 2026-10-01T00:00:00Z
//
//   [owner google]
//   display_name: Google
//   revenue_model: Advertising
//   domains: google-analytics.com, doubleclick.net
//   domains: 2mdn.net
//
// `domains:` lines accumulate. Without a version line the version is the
// file digest.
class OwnershipDb {
 public:
  // Throws Error(kDuplicateDomain) when a domain is claimed twice and
  // Error(kSchemaError) for anything malformed.
  static OwnershipDb Parse(std::string_view text);
  static OwnershipDb LoadFile(const std::string& path);

  // Exact, case-insensitive match on the registrable domain; nullptr on miss.
  const OwnerRecord* Find(const RegistrableDomain& domain) const;
  const OwnerRecord* FindById(std::string_view id) const;

  const std::vector<OwnerRecord>& records() const { return records_; }
  const std::string& version() const { return version_; }
  const std::string& built_at() const { return built_at_; }
  size_t domain_count() const { return by_domain_.size(); }

 private:
  std::vector<OwnerRecord> records_;  // sorted by id
  std::unordered_map<std::string, size_t> by_domain_;
  std::string version_;
  std::string built_at_;
};

// Owner id, or kUnattributed on a miss.
std::string ResolveOwner(const RegistrableDomain& domain, const OwnershipDb& db);

struct OwnerShare {
  std::string id;
  std::string display_name;
  std::string revenue_model;
  uint64_t pages = 0;
  Percent percent;

  bool operator==(const OwnerShare&) const = default;
};

struct OwnerRanking {
  // Descending by page count, ties by id ascending.
  std::vector<OwnerShare> owners;
  // Pages with at least one third-party domain no owner claims.
  OwnerShare unattributed;
  uint64_t loaded_pages = 0;

  bool operator==(const OwnerRanking&) const = default;
};

// Mergeable page counts per owner. Each page contributes at most one count
// to each owner regardless of how many of its requests resolve there.
class OwnerTally {
 public:
  void AddPage(const std::set<RegistrableDomain>& third_party_domains,
               const OwnershipDb& db);
  void Merge(const OwnerTally& other);

  OwnerRanking Rank(const OwnershipDb& db) const;

  uint64_t loaded_pages() const { return loaded_pages_; }
  const std::map<std::string, uint64_t>& counts() const { return counts_; }
  uint64_t unattributed_pages() const { return unattributed_; }

  bool operator==(const OwnerTally&) const = default;

 private:
  std::map<std::string, uint64_t> counts_;
  uint64_t unattributed_ = 0;
  uint64_t loaded_pages_ = 0;
};

// One entry per loaded page: the set of third-party registrable domains it
// contacted. Empty input gives an empty ranking.
OwnerRanking RankOwnerPrevalence(
    const std::vector<std::set<RegistrableDomain>>& loaded_pages,
    const OwnershipDb& db);

}  // namespace trackscope

#endif  // TRACKSCOPE_OWNERSHIP_H_
