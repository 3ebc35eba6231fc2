#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emfrisk/clustering.hpp"
#include "emfrisk/measurement.hpp"
#include "emfrisk/ranges.hpp"
#include "emfrisk/risk_map.hpp"

namespace emfrisk {

using Json = nlohmann::ordered_json;

/// Effective settings echoed into every output document.
struct ConfigEcho {
  std::size_t k = 5;
  std::size_t restarts = 50;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;
  double limit = kDefaultLimit;
};

inline Json to_json(const ConfigEcho& c) {
  return Json{{"k", c.k},
              {"restarts", c.restarts},
              {"max_iterations", c.max_iterations},
              {"seed", c.seed},
              {"limit", c.limit}};
}

inline std::string point_id(const MeasurementPoint& p) {
  return p.device_id + ":" + std::to_string(p.grid_index);
}

/// {k, seed, objective, centroids[], clusters: [{members[], min, max}]}.
/// Members are "device:grid_index" ids; clusters follow centroid order.
inline Json clustering_to_json(const Clustering& clustering, const FeatureDataset& dataset,
                               std::span<const MeasurementPoint> points, std::uint64_t seed) {
  Json clusters = Json::array();
  for (std::size_t c = 0; c < clustering.k(); ++c) {
    Json members = Json::array();
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (clustering.assignments[i] != c) continue;
      const auto& f = dataset.features[i];
      members.push_back(point_id(points[f.point_index]));
      lo = first ? f.value : std::min(lo, f.value);
      hi = first ? f.value : std::max(hi, f.value);
      first = false;
    }
    clusters.push_back(Json{{"members", std::move(members)}, {"min", lo}, {"max", hi}});
  }
  return Json{{"k", clustering.k()},
              {"seed", seed},
              {"objective", clustering.objective},
              {"iterations_used", clustering.iterations_used},
              {"converged", clustering.converged},
              {"centroids", clustering.centroids},
              {"clusters", std::move(clusters)}};
}

inline Json to_json(const EmissionRange& r) {
  Json j{{"rank", r.rank}, {"min", r.raw_min}, {"max", r.raw_max}};
  if (r.extended()) {
    j["ext_min"] = r.ext_min->value();
    j["ext_max"] = r.ext_max ? Json(r.ext_max->value()) : Json(nullptr);
    j["open_top"] = r.open_top;
    j["display"] = display_interval(r);
  }
  return j;
}

inline Json to_json(const std::optional<ClassInterval>& iv) {
  if (!iv) return nullptr;
  if (iv->open()) return Json{{"gt", iv->open_threshold().value()}};
  return Json::array({iv->lo.value(), iv->hi->value()});
}

/// {limit, canonical, classes: [{id, label, dangerous, top, bottom}], notes}
/// where each side is [lo, hi], {"gt": x} or null.
inline Json to_json(const ClassScheme& scheme) {
  Json classes = Json::array();
  for (const auto& c : scheme.classes) {
    classes.push_back(Json{{"id", c.id},
                           {"label", c.label},
                           {"dangerous", c.dangerous},
                           {"top", to_json(c.top)},
                           {"bottom", to_json(c.bottom)}});
  }
  return Json{{"limit", scheme.limit},
              {"canonical", scheme.canonical},
              {"classes", std::move(classes)},
              {"notes", scheme.notes}};
}

inline Json to_json(std::span<const DangerMap> maps, const ClassScheme& scheme) {
  Json out = Json::array();
  for (const auto& m : maps) {
    Json sides = Json::array();
    for (const auto& sm : m.sides) {
      Json cells = Json::array();
      for (const auto& c : sm.cells) {
        cells.push_back(Json{{"grid_index", c.grid_index},
                             {"row", c.row()},
                             {"column", c.column()},
                             {"value", c.value},
                             {"class_id", c.class_id},
                             {"class_label", scheme.at(c.class_id).label},
                             {"above_limit", c.above_limit}});
      }
      sides.push_back(Json{{"side", to_string(sm.side)}, {"cells", std::move(cells)}});
    }
    out.push_back(Json{{"device_id", m.device_id}, {"sides", std::move(sides)}});
  }
  return out;
}

}  // namespace emfrisk
