#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "benchtopo/csv.hpp"
#include "benchtopo/dates.hpp"
#include "benchtopo/records.hpp"

namespace benchtopo {

enum class SnapshotFormat { Csv, JsonLines };

/// Audit trail for a loaded snapshot file.
struct SnapshotManifest {
  std::string source_label;
  Date snapshot_date{};
  std::size_t record_count = 0;
  std::string checksum;          // FNV-1a 64 of the file bytes, hex
  std::size_t date_completions = 0;  // year / year-month dates completed to day precision
};

class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& path, std::size_t row, const std::string& column,
              const std::string& message)
      : std::runtime_error(path + ": row " + std::to_string(row) +
                           (column.empty() ? "" : ", column '" + column + "'") + ": " + message),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const std::vector<std::string> kModelColumns = {
    "id",        "name",         "release_date", "license_class", "weights_access",
    "modalities", "parameter_count", "documented", "manufacturer",  "country"};
inline const std::vector<std::string> kBenchmarkColumns = {
    "id",    "name",     "release_date", "citations",   "stars",  "forks",
    "watchers", "open_issues", "sample_size", "category", "authors"};
inline const std::vector<std::string> kAffiliationColumns = {"benchmark_id", "author",
                                                             "institution", "country"};

inline void expect_header(const std::string& path, const std::vector<std::string>& got,
                          const std::vector<std::string>& want) {
  if (got != want) {
    std::string w;
    for (const auto& c : want) w += (w.empty() ? "" : ",") + c;
    throw IngestError(path, 1, "", "schema mismatch: expected header '" + w + "'");
  }
}

inline std::uint64_t parse_count(const std::string& path, std::size_t row,
                                 const std::string& column, const std::string& value) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw IngestError(path, row, column, "expected a nonnegative integer, got '" + value + "'");
  return out;
}

inline std::optional<std::uint64_t> parse_optional_count(const std::string& path, std::size_t row,
                                                         const std::string& column,
                                                         const std::string& value,
                                                         bool require_positive = false) {
  if (value.empty()) return std::nullopt;
  std::uint64_t v = parse_count(path, row, column, value);
  if (require_positive && v == 0)
    throw IngestError(path, row, column, "expected a positive integer, got '0'");
  return v;
}

inline bool parse_bool(const std::string& path, std::size_t row, const std::string& column,
                       const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw IngestError(path, row, column, "expected 'true' or 'false', got '" + value + "'");
}

inline Date parse_record_date(const std::string& path, std::size_t row, const std::string& value,
                              Date snapshot_date, std::size_t& completions) {
  bool completed = false;
  Date d{};
  try {
    d = parse_date(value, &completed);
  } catch (const std::invalid_argument& e) {
    throw IngestError(path, row, "release_date", e.what());
  }
  if (completed) ++completions;
  static const Date floor{std::chrono::year{2015}, std::chrono::month{1}, std::chrono::day{1}};
  if (std::chrono::sys_days{d} < std::chrono::sys_days{floor} ||
      std::chrono::sys_days{d} > std::chrono::sys_days{snapshot_date})
    throw IngestError(path, row, "release_date",
                      "date " + format_date(d) + " outside [2015-01-01, " +
                          format_date(snapshot_date) + "]");
  return d;
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ';'))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) out += (out.empty() ? "" : ";") + i;
  return out;
}

}  // namespace detail

/// Load the model snapshot. Every row parses or the load fails with a
/// row-numbered diagnostic; duplicate ids and out-of-range dates are
/// rejected. `snapshot_date` bounds release dates and lands in the
/// manifest.
inline std::pair<std::vector<ModelRecord>, SnapshotManifest> load_models(
    const std::string& path, SnapshotFormat format, Date snapshot_date) {
  const std::string content = detail::read_file(path);
  SnapshotManifest manifest;
  manifest.source_label = path;
  manifest.snapshot_date = snapshot_date;
  manifest.checksum = fnv1a_hex(content);

  std::vector<ModelRecord> records;
  std::set<std::string> ids;
  auto finish_record = [&](ModelRecord&& m, std::size_t row) {
    if (m.id.empty()) throw IngestError(path, row, "id", "empty id");
    if (!ids.insert(m.id).second) throw IngestError(path, row, "id", "duplicate id '" + m.id + "'");
    std::sort(m.modalities.begin(), m.modalities.end());
    m.modalities.erase(std::unique(m.modalities.begin(), m.modalities.end()),
                       m.modalities.end());
    if (m.country.empty()) m.country = "Unknown";
    records.push_back(std::move(m));
  };

  if (format == SnapshotFormat::Csv) {
    std::istringstream in(content);
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw IngestError(path, 1, "", "missing header row");
    detail::expect_header(path, fields, detail::kModelColumns);
    while (reader.next(fields)) {
      const std::size_t row = reader.row();
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != detail::kModelColumns.size())
        throw IngestError(path, row, "",
                          "expected " + std::to_string(detail::kModelColumns.size()) +
                              " fields, got " + std::to_string(fields.size()));
      ModelRecord m;
      m.id = fields[0];
      m.name = fields[1];
      m.release_date =
          detail::parse_record_date(path, row, fields[2], snapshot_date, manifest.date_completions);
      try {
        m.license_class = license_class_from(fields[3]);
      } catch (const std::invalid_argument& e) {
        throw IngestError(path, row, "license_class", e.what());
      }
      try {
        m.weights_access = weights_access_from(fields[4]);
      } catch (const std::invalid_argument& e) {
        throw IngestError(path, row, "weights_access", e.what());
      }
      m.modalities = detail::split_list(fields[5]);
      m.parameter_count =
          detail::parse_optional_count(path, row, "parameter_count", fields[6], true);
      m.documented = detail::parse_bool(path, row, "documented", fields[7]);
      m.manufacturer = fields[8];
      m.country = fields[9];
      finish_record(std::move(m), row);
    }
  } else {
    std::istringstream in(content);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw IngestError(path, row, "", std::string("invalid JSON: ") + e.what());
      }
      try {
        ModelRecord m;
        m.id = j.at("id").get<std::string>();
        m.name = j.at("name").get<std::string>();
        m.release_date = detail::parse_record_date(path, row, j.at("release_date").get<std::string>(), snapshot_date,
                                                   manifest.date_completions);
        m.license_class = license_class_from(j.value("license_class", "unspecified"));
        m.weights_access = weights_access_from(j.value("weights_access", "unspecified"));
        for (const auto& mod : j.value("modalities", nlohmann::json::array()))
          m.modalities.push_back(mod.get<std::string>());
        if (j.contains("parameter_count") && !j["parameter_count"].is_null()) {
          auto v = j["parameter_count"].get<std::int64_t>();
          if (v <= 0) throw std::invalid_argument("parameter_count must be positive");
          m.parameter_count = static_cast<std::uint64_t>(v);
        }
        m.documented = j.value("documented", false);
        m.manufacturer = j.value("manufacturer", "");
        m.country = j.value("country", "Unknown");
        finish_record(std::move(m), row);
      } catch (const IngestError&) {
        throw;
      } catch (const std::exception& e) {
        throw IngestError(path, row, "", e.what());
      }
    }
  }
  manifest.record_count = records.size();
  return {std::move(records), manifest};
}

/// Load the benchmark snapshot plus its affiliation sidecar (CSV) or
/// embedded affiliations (JSON lines). Affiliation triples referencing
/// authors not on the record's roster are rejected; records without any
/// affiliation load fine and bucket to "Unknown/unlisted" downstream.
inline std::pair<std::vector<BenchmarkRecord>, SnapshotManifest> load_benchmarks(
    const std::string& path, SnapshotFormat format, Date snapshot_date,
    const std::string& affiliations_path = "") {
  const std::string content = detail::read_file(path);
  SnapshotManifest manifest;
  manifest.source_label = path;
  manifest.snapshot_date = snapshot_date;
  manifest.checksum = fnv1a_hex(content);

  std::vector<BenchmarkRecord> records;
  std::map<std::string, std::size_t> index;
  auto finish_record = [&](BenchmarkRecord&& b, std::size_t row) {
    if (b.id.empty()) throw IngestError(path, row, "id", "empty id");
    if (index.count(b.id)) throw IngestError(path, row, "id", "duplicate id '" + b.id + "'");
    for (const auto& a : b.authors)
      if (a.empty()) throw IngestError(path, row, "authors", "empty author name");
    index.emplace(b.id, records.size());
    records.push_back(std::move(b));
  };

  if (format == SnapshotFormat::Csv) {
    std::istringstream in(content);
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw IngestError(path, 1, "", "missing header row");
    detail::expect_header(path, fields, detail::kBenchmarkColumns);
    while (reader.next(fields)) {
      const std::size_t row = reader.row();
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != detail::kBenchmarkColumns.size())
        throw IngestError(path, row, "",
                          "expected " + std::to_string(detail::kBenchmarkColumns.size()) +
                              " fields, got " + std::to_string(fields.size()));
      BenchmarkRecord b;
      b.id = fields[0];
      b.name = fields[1];
      b.release_date =
          detail::parse_record_date(path, row, fields[2], snapshot_date, manifest.date_completions);
      b.citations = detail::parse_count(path, row, "citations", fields[3]);
      b.stars = detail::parse_count(path, row, "stars", fields[4]);
      b.forks = detail::parse_optional_count(path, row, "forks", fields[5]);
      b.watchers = detail::parse_optional_count(path, row, "watchers", fields[6]);
      b.open_issues = detail::parse_optional_count(path, row, "open_issues", fields[7]);
      b.sample_size = detail::parse_optional_count(path, row, "sample_size", fields[8], true);
      b.category = fields[9];
      b.authors = detail::split_list(fields[10]);
      finish_record(std::move(b), row);
    }
    if (!affiliations_path.empty()) {
      const std::string aff_content = detail::read_file(affiliations_path);
      std::istringstream ain(aff_content);
      csv::Reader areader(ain);
      if (!areader.next(fields)) throw IngestError(affiliations_path, 1, "", "missing header row");
      detail::expect_header(affiliations_path, fields, detail::kAffiliationColumns);
      while (areader.next(fields)) {
        const std::size_t row = areader.row();
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 4)
          throw IngestError(affiliations_path, row, "",
                            "expected 4 fields, got " + std::to_string(fields.size()));
        auto it = index.find(fields[0]);
        if (it == index.end())
          throw IngestError(affiliations_path, row, "benchmark_id",
                            "unknown benchmark id '" + fields[0] + "'");
        BenchmarkRecord& rec = records[it->second];
        if (std::find(rec.authors.begin(), rec.authors.end(), fields[1]) == rec.authors.end())
          throw IngestError(affiliations_path, row, "author",
                            "author '" + fields[1] + "' not listed on benchmark '" + fields[0] +
                                "'");
        if (fields[2].empty())
          throw IngestError(affiliations_path, row, "institution", "empty institution");
        rec.affiliations.push_back(
            {fields[1], fields[2], fields[3].empty() ? "Unknown" : fields[3]});
      }
    }
  } else {
    std::istringstream in(content);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw IngestError(path, row, "", std::string("invalid JSON: ") + e.what());
      }
      try {
        BenchmarkRecord b;
        b.id = j.at("id").get<std::string>();
        b.name = j.at("name").get<std::string>();
        b.release_date = detail::parse_record_date(path, row, j.at("release_date").get<std::string>(), snapshot_date,
                                                   manifest.date_completions);
        b.citations = j.at("citations").get<std::uint64_t>();
        b.stars = j.at("stars").get<std::uint64_t>();
        if (j.contains("forks") && !j["forks"].is_null())
          b.forks = j["forks"].get<std::uint64_t>();
        if (j.contains("watchers") && !j["watchers"].is_null())
          b.watchers = j["watchers"].get<std::uint64_t>();
        if (j.contains("open_issues") && !j["open_issues"].is_null())
          b.open_issues = j["open_issues"].get<std::uint64_t>();
        if (j.contains("sample_size") && !j["sample_size"].is_null()) {
          auto v = j["sample_size"].get<std::int64_t>();
          if (v <= 0) throw std::invalid_argument("sample_size must be positive");
          b.sample_size = static_cast<std::uint64_t>(v);
        }
        b.category = j.value("category", "");
        for (const auto& a : j.value("authors", nlohmann::json::array()))
          b.authors.push_back(a.get<std::string>());
        for (const auto& aff : j.value("affiliations", nlohmann::json::array())) {
          Affiliation a;
          a.author = aff.at("author").get<std::string>();
          a.institution = aff.at("institution").get<std::string>();
          a.country = aff.value("country", "Unknown");
          if (a.country.empty()) a.country = "Unknown";
          if (std::find(b.authors.begin(), b.authors.end(), a.author) == b.authors.end())
            throw std::invalid_argument("affiliation author '" + a.author + "' not listed");
          if (a.institution.empty()) throw std::invalid_argument("empty institution");
          b.affiliations.push_back(std::move(a));
        }
        finish_record(std::move(b), row);
      } catch (const IngestError&) {
        throw;
      } catch (const std::exception& e) {
        throw IngestError(path, row, "", e.what());
      }
    }
  }

  // Canonical affiliation order; exact duplicate triples collapse.
  for (auto& rec : records) {
    std::sort(rec.affiliations.begin(), rec.affiliations.end(), [](const auto& a, const auto& b) {
      return std::tie(a.author, a.institution, a.country) <
             std::tie(b.author, b.institution, b.country);
    });
    rec.affiliations.erase(std::unique(rec.affiliations.begin(), rec.affiliations.end(),
                                       [](const auto& a, const auto& b) {
                                         return a.author == b.author &&
                                                a.institution == b.institution &&
                                                a.country == b.country;
                                       }),
                           rec.affiliations.end());
  }
  manifest.record_count = records.size();
  return {std::move(records), manifest};
}

inline void write_models_csv(std::span<const ModelRecord> records, std::ostream& os) {
  csv::write_row(os, detail::kModelColumns);
  for (const auto& m : records) {
    csv::write_row(os, {m.id, m.name, format_date(m.release_date),
                        std::string(to_string(m.license_class)),
                        std::string(to_string(m.weights_access)),
                        detail::join_list(m.modalities),
                        m.parameter_count ? std::to_string(*m.parameter_count) : "",
                        m.documented ? "true" : "false", m.manufacturer, m.country});
  }
}

inline void write_benchmarks_csv(std::span<const BenchmarkRecord> records, std::ostream& os) {
  csv::write_row(os, detail::kBenchmarkColumns);
  for (const auto& b : records) {
    auto opt = [](const std::optional<std::uint64_t>& v) {
      return v ? std::to_string(*v) : std::string();
    };
    csv::write_row(os, {b.id, b.name, format_date(b.release_date), std::to_string(b.citations),
                        std::to_string(b.stars), opt(b.forks), opt(b.watchers),
                        opt(b.open_issues), opt(b.sample_size), b.category,
                        detail::join_list(b.authors)});
  }
}

inline void write_affiliations_csv(std::span<const BenchmarkRecord> records, std::ostream& os) {
  csv::write_row(os, detail::kAffiliationColumns);
  for (const auto& b : records)
    for (const auto& a : b.affiliations)
      csv::write_row(os, {b.id, a.author, a.institution, a.country});
}

/// Alias table mapping variant labels to canonical labels. Chains resolve
/// transitively; cycles are rejected at load.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::map<std::string, std::string> aliases) : map_(std::move(aliases)) {
    for (const auto& [variant, _] : map_) resolve(variant);  // cycle check
  }

  static AliasTable load_csv(const std::string& path) {
    const std::string content = detail::read_file(path);
    std::istringstream in(content);
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw IngestError(path, 1, "", "missing header row");
    detail::expect_header(path, fields, {"variant", "canonical"});
    std::map<std::string, std::string> m;
    while (reader.next(fields)) {
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != 2)
        throw IngestError(path, reader.row(), "",
                          "expected 2 fields, got " + std::to_string(fields.size()));
      m[fields[0]] = fields[1];
    }
    return AliasTable(std::move(m));
  }

  std::string resolve(const std::string& label) const {
    std::string cur = label;
    std::set<std::string> seen;
    while (true) {
      auto it = map_.find(cur);
      if (it == map_.end()) return cur;
      if (!seen.insert(cur).second)
        throw std::invalid_argument("alias cycle involving '" + label + "'");
      cur = it->second;
    }
  }

  bool empty() const { return map_.empty(); }

 private:
  std::map<std::string, std::string> map_;
};

/// Rewrite institution and country labels on benchmark affiliations.
/// Record counts never change.
inline void dedupe_entities(std::vector<BenchmarkRecord>& records, const AliasTable& aliases) {
  if (aliases.empty()) return;
  for (auto& rec : records)
    for (auto& aff : rec.affiliations) {
      aff.institution = aliases.resolve(aff.institution);
      aff.country = aliases.resolve(aff.country);
    }
}

/// Rewrite manufacturer and country labels on model records.
inline void dedupe_entities(std::vector<ModelRecord>& records, const AliasTable& aliases) {
  if (aliases.empty()) return;
  for (auto& rec : records) {
    rec.manufacturer = aliases.resolve(rec.manufacturer);
    rec.country = aliases.resolve(rec.country);
  }
}

}  // namespace benchtopo
