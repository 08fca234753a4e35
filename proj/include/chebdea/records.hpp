#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chebdea/dea.hpp"

namespace chebdea {

enum class Field : std::size_t {
  Expenditures2016,
  Expenditures2017,
  Employees2017,
  Collection2016,
  Collection2017,
  Registrations2017,
  Circulation2017,
  EventAttendance2017,
  Population,
  Density,
  TownDistance,
};

inline constexpr std::size_t kFieldCount = 11;

// CSV column names, bit-exact, in Field order. The file also needs `id` and `name`.
inline constexpr std::array<std::string_view, kFieldCount> kFieldColumns = {
    "expenditures_2016", "expenditures_2017",    "employees_2017",
    "collection_2016",   "collection_2017",      "registrations_2017",
    "circulation_2017",  "event_attendance_2017", "population",
    "density",           "town_distance",
};

inline constexpr std::string_view kIdColumn = "id";
inline constexpr std::string_view kNameColumn = "name";

std::string_view column_name(Field field);

// One library-year row. Any numeric field may be missing.
struct LibraryRecord {
  std::string id;
  std::string name;
  std::array<std::optional<double>, kFieldCount> values{};

  std::optional<double> get(Field f) const { return values[static_cast<std::size_t>(f)]; }
  void set(Field f, std::optional<double> v) { values[static_cast<std::size_t>(f)] = v; }
};

struct LoadResult {
  std::vector<LibraryRecord> records;
  std::vector<std::string> warnings;
};

// Throws InputError if the file cannot be opened or a required column is absent.
// Unparseable, negative, or non-finite cells become missing with a warning.
LoadResult load_records(const std::filesystem::path& path);
LoadResult parse_records(std::istream& in);

// Writes records in the input schema (missing values as empty cells).
void write_records(std::ostream& out, const std::vector<LibraryRecord>& records);

struct DroppedRecord {
  std::string id;
  std::string reason;
};

// Environmental covariates aligned with panel rows.
struct Environment {
  std::vector<double> population;
  std::vector<double> density;
  std::vector<double> distance;
};

struct PreparedData {
  Panel panel;
  std::vector<std::string> names;
  Environment environment;
  std::vector<DroppedRecord> dropped;
};

// Inputs: two-year expenditures, employees, prior-year collection.
// Outputs: registrations, circulation, event attendance, positive collection growth.
// Records with any missing field are dropped and logged. Throws InputError when nothing remains.
PreparedData preprocess(const std::vector<LibraryRecord>& records);

inline constexpr std::array<std::string_view, 3> kInputNames = {"total_expenditures", "employees",
                                                                 "collection"};
inline constexpr std::array<std::string_view, 4> kOutputNames = {
    "registrations", "circulation", "event_attendance", "collection_additions"};

}  // namespace chebdea
