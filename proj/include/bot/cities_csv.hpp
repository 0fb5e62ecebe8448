#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bot/pipeline.hpp"

namespace bot {

struct CityLoadReport {
  std::size_t rows = 0;
  std::size_t loaded = 0;
  std::size_t dropped = 0;
  std::size_t dropped_population = 0;
  std::size_t dropped_coordinates = 0;
  std::size_t dropped_other = 0;
};

struct CityLoad {
  std::vector<GeoCity> cities;
  CityLoadReport report;
};

// Splits one CSV record (comma separated, double-quoted fields with "" as an
// escaped quote). Throws InputError on an unterminated quote.
std::vector<std::string> split_csv_record(const std::string& line);

// Header-bearing CSV with at least the columns city, country, lat, lng,
// population (any order, extra columns ignored). Rows with a missing or
// invalid population or coordinates are dropped and counted.
CityLoad load_cities_csv(std::istream& in);
CityLoad load_cities_csv(const std::filesystem::path& path);

}  // namespace bot
