#pragma once

#include <span>
#include <string>
#include <vector>

#include "bot/network_json.hpp"

namespace bot {

struct LeveledTree {
  const FlowTree* tree = nullptr;
  std::string level;
};

struct SvgStyle {
  double width = 800.0;
  double margin = 20.0;
  // Stroke width is proportional to area^alpha, scaled so the widest edge
  // gets max_stroke pixels.
  double alpha = 0.5;
  double max_stroke = 6.0;
  double min_stroke = 0.3;
  // Treat coordinates as unit-sphere embeddings and draw lon/lat.
  bool geographic = false;
};

// Edges as line segments, sources as large red dots, targets as small blue
// dots, branch nodes undrawn. Throws StructuralError on an invalid tree.
std::string render_svg(std::span<const LeveledTree> trees, const SvgStyle& style);

// One LineString feature per edge with properties {"area", "level"}.
// Geographic edges follow the great circle in pieces of at most
// max_segment_km; other trees are written in their own coordinates.
ordered_json render_geojson(std::span<const LeveledTree> trees, bool geographic, double max_segment_km = 100.0);

}  // namespace bot
