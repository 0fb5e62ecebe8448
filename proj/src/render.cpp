#include "bot/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bot/geo.hpp"

namespace bot {

namespace {

void require_valid(std::span<const LeveledTree> trees) {
  for (const LeveledTree& lt : trees) {
    const ValidationReport report = validate_tree(*lt.tree);
    if (!report.ok()) throw StructuralError("cannot render invalid tree: " + report.summary());
  }
}

struct Xy {
  double x;
  double y;
};

Xy planar(const Point& p, bool geographic) {
  if (geographic) {
    const LatLon ll = geo_project(p);
    return {ll.lon, -ll.lat};
  }
  return {p[0], -p[1]};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(std::span<const LeveledTree> trees, const SvgStyle& style) {
  require_valid(trees);
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  double max_weight = 0.0;
  for (const LeveledTree& lt : trees) {
    for (const FlowNode& node : lt.tree->nodes()) {
      const Xy q = planar(node.pos, style.geographic);
      x0 = std::min(x0, q.x);
      x1 = std::max(x1, q.x);
      y0 = std::min(y0, q.y);
      y1 = std::max(y1, q.y);
      if (node.parent != kNoParent) max_weight = std::max(max_weight, std::pow(node.area, style.alpha));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  const double span_x = std::max(x1 - x0, 1e-12);
  const double span_y = std::max(y1 - y0, 1e-12);
  const double inner = style.width - 2.0 * style.margin;
  const double scale = inner / std::max(span_x, span_y);
  const double width = style.width;
  const double height = span_y * scale + 2.0 * style.margin;
  auto sx = [&](double x) { return style.margin + (x - x0) * scale; };
  auto sy = [&](double y) { return style.margin + (y - y0) * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g stroke=\"#333333\" stroke-linecap=\"round\">\n";
  for (const LeveledTree& lt : trees) {
    const auto& nodes = lt.tree->nodes();
    for (const FlowNode& node : nodes) {
      if (node.parent == kNoParent) continue;
      const Xy a = planar(nodes[node.parent].pos, style.geographic);
      Xy b = planar(node.pos, style.geographic);
      // Antimeridian crossing: draw the short way, off the canvas edge.
      if (b.x - a.x > 180.0) b.x -= 360.0;
      if (b.x - a.x < -180.0) b.x += 360.0;
      const double w = max_weight > 0.0 ? style.max_stroke * std::pow(node.area, style.alpha) / max_weight : 1.0;
      out << "<line x1=\"" << fmt(sx(a.x)) << "\" y1=\"" << fmt(sy(a.y)) << "\" x2=\"" << fmt(sx(b.x)) << "\" y2=\""
          << fmt(sy(b.y)) << "\" stroke-width=\"" << fmt(std::max(style.min_stroke, w)) << "\"/>\n";
    }
  }
  out << "</g>\n";
  for (const LeveledTree& lt : trees) {
    for (const FlowNode& node : lt.tree->nodes()) {
      if (node.kind == NodeKind::branch) continue;
      const Xy q = planar(node.pos, style.geographic);
      const bool source = node.kind == NodeKind::source;
      out << "<circle cx=\"" << fmt(sx(q.x)) << "\" cy=\"" << fmt(sy(q.y)) << "\" r=\"" << (source ? "4" : "1.5")
          << "\" fill=\"" << (source ? "red" : "blue") << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

ordered_json render_geojson(std::span<const LeveledTree> trees, bool geographic, double max_segment_km) {
  require_valid(trees);
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  ordered_json features = ordered_json::array();
  for (const LeveledTree& lt : trees) {
    const auto& nodes = lt.tree->nodes();
    for (const FlowNode& node : nodes) {
      if (node.parent == kNoParent) continue;
      ordered_json coords = ordered_json::array();
      if (geographic) {
        // Longitudes are unwrapped so an edge crossing the antimeridian stays
        // one continuous line (values may step just past +-180).
        double prev = 0.0;
        bool first = true;
        for (const LatLon& ll : great_circle_path(nodes[node.parent].pos, node.pos, max_segment_km)) {
          double lon = ll.lon;
          if (!first) {
            while (lon - prev > 180.0) lon -= 360.0;
            while (lon - prev < -180.0) lon += 360.0;
          }
          coords.push_back({lon, ll.lat});
          prev = lon;
          first = false;
        }
      } else {
        for (const Point* p : {&nodes[node.parent].pos, &node.pos}) {
          ordered_json c = ordered_json::array();
          for (double v : p->coords()) c.push_back(v);
          coords.push_back(std::move(c));
        }
      }
      ordered_json feature;
      feature["type"] = "Feature";
      feature["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
      feature["properties"] = {{"area", node.area}, {"level", lt.level}};
      features.push_back(std::move(feature));
    }
  }
  doc["features"] = std::move(features);
  return doc;
}

}  // namespace bot
