#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "benchtopo/dates.hpp"

namespace benchtopo {

/// Sentinel bucket for records whose affiliations could not be resolved.
inline constexpr const char* kUnknownEntity = "Unknown/unlisted";

enum class LicenseClass { Permissive, Community, Closed, Unspecified };
enum class WeightsAccess { Open, Gated, Unspecified };

inline std::string_view to_string(LicenseClass c) {
  switch (c) {
    case LicenseClass::Permissive: return "permissive";
    case LicenseClass::Community: return "community";
    case LicenseClass::Closed: return "closed";
    default: return "unspecified";
  }
}

inline std::string_view to_string(WeightsAccess w) {
  switch (w) {
    case WeightsAccess::Open: return "open";
    case WeightsAccess::Gated: return "gated";
    default: return "unspecified";
  }
}

inline LicenseClass license_class_from(std::string_view s) {
  if (s == "permissive") return LicenseClass::Permissive;
  if (s == "community") return LicenseClass::Community;
  if (s == "closed") return LicenseClass::Closed;
  if (s == "unspecified") return LicenseClass::Unspecified;
  throw std::invalid_argument("unknown license_class: '" + std::string(s) + "'");
}

inline WeightsAccess weights_access_from(std::string_view s) {
  if (s == "open") return WeightsAccess::Open;
  if (s == "gated") return WeightsAccess::Gated;
  if (s == "unspecified") return WeightsAccess::Unspecified;
  throw std::invalid_argument("unknown weights_access: '" + std::string(s) + "'");
}

struct ModelRecord {
  std::string id;
  std::string name;
  Date release_date{};
  LicenseClass license_class = LicenseClass::Unspecified;
  WeightsAccess weights_access = WeightsAccess::Unspecified;
  std::vector<std::string> modalities;  // sorted, deduplicated
  std::optional<std::uint64_t> parameter_count;
  bool documented = false;
  std::string manufacturer;
  std::string country = "Unknown";
};

/// One (author, institution, country) affiliation triple, pre-resolved
/// upstream; labels are treated as opaque strings.
struct Affiliation {
  std::string author;
  std::string institution;
  std::string country;
};

struct BenchmarkRecord {
  std::string id;
  std::string name;
  Date release_date{};
  std::uint64_t citations = 0;
  std::uint64_t stars = 0;
  std::optional<std::uint64_t> forks;
  std::optional<std::uint64_t> watchers;
  std::optional<std::uint64_t> open_issues;
  std::optional<std::uint64_t> sample_size;
  std::string category;
  std::vector<std::string> authors;        // in listed order
  std::vector<Affiliation> affiliations;   // sorted by (author, institution, country)
};

}  // namespace benchtopo
