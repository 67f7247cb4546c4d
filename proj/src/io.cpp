#include "hyperhaar/io.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperhaar/dyadic.hpp"
#include "hyperhaar/rational.hpp"

namespace hyperhaar {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string grid_to_json(const ExactGrid& f) {
  ordered_json j;
  j["resolution"] = std::vector<int32_t>(f.resolution().begin(),
                                         f.resolution().end());
  j["mode"] = "exact";
  std::vector<std::string> values;
  values.reserve(static_cast<size_t>(f.size()));
  for (const Rational& v : f.values()) values.push_back(v.str());
  j["values"] = std::move(values);
  return j.dump();
}

ExactGrid grid_from_json(std::string_view text) {
  const ordered_json j = ordered_json::parse(text);
  if (!j.is_object() || !j.contains("resolution") || !j.contains("mode") ||
      !j.contains("values")) {
    throw std::invalid_argument(
        "grid_from_json: need resolution, mode and values");
  }
  if (j["mode"] != "exact") {
    throw std::invalid_argument("grid_from_json: unsupported mode");
  }
  ShapeVector m;
  for (const auto& e : j["resolution"]) m.push_back(e.get<int32_t>());
  std::vector<Rational> values;
  for (const auto& e : j["values"]) {
    values.push_back(Rational::parse(e.get<std::string>()));
  }
  return ExactGrid::from_values(std::move(m), std::move(values));
}

void write_spectrum_csv(std::ostream& out, const HaarSpectrum<Rational>& spec) {
  out << "mean," << spec.mean.str() << '\n';
  for (const auto& [R, coeff] : spec.coeffs) {
    out << format_rectangle(R) << ',' << coeff.str() << '\n';
  }
}

std::string graph_to_json(const ColoredGraph& g) {
  ordered_json j;
  j["vertices"] = g.vertices;
  ordered_json edges = ordered_json::object();
  for (const auto& [color, set] : g.edges) {
    ordered_json list = ordered_json::array();
    for (const auto& [v, w] : set) {
      list.push_back(ordered_json::array({v, w}));
    }
    edges[std::to_string(color)] = std::move(list);
  }
  j["edges"] = std::move(edges);
  return j.dump();
}

ColoredGraph graph_from_json(std::string_view text) {
  const ordered_json j = ordered_json::parse(text);
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges")) {
    throw std::invalid_argument("graph_from_json: need vertices and edges");
  }
  ColoredGraph g;
  for (const auto& v : j["vertices"]) g.vertices.push_back(v.get<int32_t>());
  for (const auto& [key, list] : j["edges"].items()) {
    const int32_t color = static_cast<int32_t>(std::stol(key));
    for (const auto& pair : list) {
      if (!pair.is_array() || pair.size() != 2) {
        throw std::invalid_argument("graph_from_json: edge must be [v, w]");
      }
      g.add_edge(color, pair[0].get<int32_t>(), pair[1].get<int32_t>());
    }
  }
  return g;
}

void write_beck_csv(std::ostream& out, const BeckGainReport& report) {
  out << "d,n,p,norm,slope\n";
  const auto write_series = [&](const BeckGainSeries& series) {
    for (const BeckGainPoint& pt : series.points) {
      out << report.d << ',' << pt.n << ',' << pt.p << ','
          << format_double(pt.norm) << ',' << format_double(series.l2_slope)
          << '\n';
    }
  };
  write_series(report.measured);
  write_series(report.naive);
  write_series(report.pinned);
}

}  // namespace hyperhaar
