#include "bot/cities_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

namespace bot {

namespace {

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw InputError("unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

CityLoad load_cities_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("cities CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const std::vector<std::string> header = split_csv_record(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t k = 0; k < header.size(); ++k) column.emplace(lower(header[k]), k);
  static const char* const required[] = {"city", "country", "lat", "lng", "population"};
  std::string missing;
  for (const char* name : required) {
    if (!column.count(name)) missing += std::string(missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) {
    std::string found;
    for (const auto& h : header) found += (found.empty() ? "" : ", ") + h;
    throw InputError("cities CSV is missing required columns: " + missing + " (found: " + found + ")");
  }
  const std::size_t c_city = column["city"];
  const std::size_t c_country = column["country"];
  const std::size_t c_lat = column["lat"];
  const std::size_t c_lng = column["lng"];
  const std::size_t c_pop = column["population"];
  const std::size_t width = std::max({c_city, c_country, c_lat, c_lng, c_pop}) + 1;

  CityLoad out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ++out.report.rows;
    std::vector<std::string> f;
    try {
      f = split_csv_record(line);
    } catch (const InputError&) {
      ++out.report.dropped_other;
      continue;
    }
    if (f.size() < width || f[c_country].empty()) {
      ++out.report.dropped_other;
      continue;
    }
    const auto pop = parse_number(f[c_pop]);
    if (!pop || !(*pop > 0.0)) {
      ++out.report.dropped_population;
      continue;
    }
    const auto lat = parse_number(f[c_lat]);
    const auto lng = parse_number(f[c_lng]);
    if (!lat || !lng || *lat < -90.0 || *lat > 90.0 || *lng < -180.0 || *lng > 180.0) {
      ++out.report.dropped_coordinates;
      continue;
    }
    GeoCity city;
    city.name = f[c_city];
    city.country = f[c_country];
    city.lat = *lat;
    city.lon = *lng == -180.0 ? 180.0 : *lng;
    city.population = *pop;
    out.cities.push_back(std::move(city));
  }
  out.report.loaded = out.cities.size();
  out.report.dropped = out.report.dropped_population + out.report.dropped_coordinates + out.report.dropped_other;
  return out;
}

CityLoad load_cities_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open cities file " + path.string());
  return load_cities_csv(in);
}

}  // namespace bot
