#include "chebdea/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "chebdea/csv.hpp"
#include "chebdea/error.hpp"

namespace chebdea {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (result.ec != std::errc() || result.ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string_view column_name(Field field) { return kFieldColumns[static_cast<std::size_t>(field)]; }

LoadResult parse_records(std::istream& in) {
  const auto rows = csv::read(in);
  if (rows.empty()) throw InputError("input CSV is empty; expected a header row");

  std::map<std::string, std::size_t, std::less<>> header;
  for (std::size_t c = 0; c < rows[0].size(); ++c) header.emplace(std::string(trim(rows[0][c])), c);

  const auto require = [&](std::string_view name) {
    const auto it = header.find(name);
    if (it == header.end()) throw InputError("input CSV is missing column '" + std::string(name) + "'");
    return it->second;
  };
  const std::size_t id_col = require(kIdColumn);
  const std::size_t name_col = require(kNameColumn);
  std::array<std::size_t, kFieldCount> field_col{};
  for (std::size_t f = 0; f < kFieldCount; ++f) field_col[f] = require(kFieldColumns[f]);

  LoadResult result;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto cell = [&](std::size_t c) -> std::string_view {
      return c < row.size() ? std::string_view(row[c]) : std::string_view();
    };
    LibraryRecord rec;
    rec.id = std::string(trim(cell(id_col)));
    rec.name = std::string(cell(name_col));
    if (rec.id.empty()) rec.id = "row" + std::to_string(r + 1);
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      const auto text = trim(cell(field_col[f]));
      if (text.empty()) continue;
      const auto value = parse_number(text);
      if (!value || !std::isfinite(*value) || *value < 0.0) {
        result.warnings.push_back("line " + std::to_string(r + 1) + ", record '" + rec.id +
                                  "': invalid value '" + std::string(text) + "' in column " +
                                  std::string(kFieldColumns[f]) + " treated as missing");
        continue;
      }
      rec.values[f] = value;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

LoadResult load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path.string() + "'");
  return parse_records(in);
}

void write_records(std::ostream& out, const std::vector<LibraryRecord>& records) {
  csv::Row header{std::string(kIdColumn), std::string(kNameColumn)};
  for (auto name : kFieldColumns) header.emplace_back(name);
  csv::write_row(out, header);
  for (const auto& rec : records) {
    csv::Row row{rec.id, rec.name};
    for (const auto& v : rec.values) row.push_back(v ? csv::format_double(*v) : std::string());
    csv::write_row(out, row);
  }
}

PreparedData preprocess(const std::vector<LibraryRecord>& records) {
  if (records.empty()) throw InputError("no records to preprocess");

  std::vector<std::string> ids;
  std::vector<std::string> names;
  std::vector<std::array<double, kFieldCount>> kept;
  std::vector<DroppedRecord> dropped;

  for (const auto& rec : records) {
    std::string missing;
    std::array<double, kFieldCount> v{};
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      if (rec.values[f]) {
        v[f] = *rec.values[f];
      } else {
        if (!missing.empty()) missing += ", ";
        missing += kFieldColumns[f];
      }
    }
    if (!missing.empty()) {
      dropped.push_back({rec.id, "missing: " + missing});
      continue;
    }
    ids.push_back(rec.id);
    names.push_back(rec.name);
    kept.push_back(v);
  }
  if (kept.empty()) {
    throw InputError("no usable records: all " + std::to_string(records.size()) +
                     " records have missing fields");
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  RowMatrix x(n, 3);
  RowMatrix y(n, 4);
  Environment env;
  const auto at = [](const std::array<double, kFieldCount>& v, Field f) {
    return v[static_cast<std::size_t>(f)];
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = kept[static_cast<std::size_t>(i)];
    x(i, 0) = at(v, Field::Expenditures2016) + at(v, Field::Expenditures2017);
    x(i, 1) = at(v, Field::Employees2017);
    x(i, 2) = at(v, Field::Collection2016);
    y(i, 0) = at(v, Field::Registrations2017);
    y(i, 1) = at(v, Field::Circulation2017);
    y(i, 2) = at(v, Field::EventAttendance2017);
    y(i, 3) = std::max(0.0, at(v, Field::Collection2017) - at(v, Field::Collection2016));
    env.population.push_back(at(v, Field::Population));
    env.density.push_back(at(v, Field::Density));
    env.distance.push_back(at(v, Field::TownDistance));
  }

  return PreparedData{Panel(std::move(ids), std::move(x), std::move(y)), std::move(names),
                      std::move(env), std::move(dropped)};
}

}  // namespace chebdea
