#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "emfrisk/decimal.hpp"
#include "emfrisk/error.hpp"

namespace emfrisk {

/// Number of measuring points per device surface (3x3 grid).
inline constexpr int kGridPoints = 9;

enum class Side { top, bottom };

inline constexpr std::array<Side, 2> kSides{Side::top, Side::bottom};

constexpr std::string_view to_string(Side side) noexcept {
  return side == Side::top ? "top" : "bottom";
}

namespace detail {

inline std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string_view trim(std::string_view text) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline std::optional<Side> parse_side(std::string_view token) {
  const std::string lower = detail::lowercase(detail::trim(token));
  if (lower == "top") return Side::top;
  if (lower == "bottom") return Side::bottom;
  return std::nullopt;
}

/// Root-mean-square flux density of three orthogonal components. The
/// magnitudes are ordered before summation so the result does not depend on
/// argument order.
inline double rms(double bx, double by, double bz) {
  std::array<double, 3> m{std::fabs(bx), std::fabs(by), std::fabs(bz)};
  std::sort(m.begin(), m.end());
  return std::hypot(m[2], m[1], m[0]);
}

struct FluxComponents {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  friend bool operator==(const FluxComponents&, const FluxComponents&) = default;
};

/// One reading in uT: either per-axis components or a pre-computed RMS value.
class FluxReading {
 public:
  static FluxReading from_components(double bx, double by, double bz) {
    for (double v : {bx, by, bz}) require_magnitude(v);
    return FluxReading(FluxComponents{bx, by, bz});
  }

  static FluxReading from_rms(double value) {
    require_magnitude(value);
    return FluxReading(value);
  }

  bool has_components() const noexcept { return std::holds_alternative<FluxComponents>(value_); }

  std::optional<FluxComponents> components() const {
    if (const auto* c = std::get_if<FluxComponents>(&value_)) return *c;
    return std::nullopt;
  }

  double rms() const {
    if (const auto* c = std::get_if<FluxComponents>(&value_)) return emfrisk::rms(c->bx, c->by, c->bz);
    return std::get<double>(value_);
  }

  friend bool operator==(const FluxReading&, const FluxReading&) = default;

 private:
  explicit FluxReading(FluxComponents c) : value_(c) {}
  explicit FluxReading(double direct) : value_(direct) {}

  static void require_magnitude(double v) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "flux value is not finite");
    if (v < 0.0) throw Error(Errc::negative_flux, "flux value " + format_uT(v) + " is negative");
  }

  std::variant<FluxComponents, double> value_;
};

inline double rms(const FluxReading& reading) { return reading.rms(); }

struct MeasurementPoint {
  std::string device_id;
  Side side = Side::top;
  int grid_index = 1;
  FluxReading reading = FluxReading::from_rms(0.0);
  /// Source line (1-based) the point was parsed from; 0 when built in code.
  std::size_t row = 0;

  double value() const { return reading.rms(); }
};

struct Feature {
  std::size_t point_index = 0;  ///< index into the point list the dataset was built from
  double value = 0.0;
};

/// All features of one side, ordered by (device_id, grid_index).
struct FeatureDataset {
  Side side = Side::top;
  std::vector<Feature> features;
  std::size_t device_count = 0;

  std::size_t size() const noexcept { return features.size(); }
  bool empty() const noexcept { return features.empty(); }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(f.value);
    return out;
  }
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace detail {

inline const std::array<std::string_view, 5> kRmsHeader{"device_id", "side", "grid_index", "unit",
                                                         "value"};
inline const std::array<std::string_view, 7> kComponentHeader{
    "device_id", "side", "grid_index", "unit", "bx", "by", "bz"};

template <std::size_t N>
bool header_matches(const std::vector<std::string_view>& cells,
                    const std::array<std::string_view, N>& expected) {
  if (cells.size() != N) return false;
  for (std::size_t i = 0; i < N; ++i)
    if (lowercase(cells[i]) != expected[i]) return false;
  return true;
}

/// Number of decimal places to shift a value written in `unit` to reach uT.
inline std::optional<int> unit_shift(std::string_view unit) {
  if (unit == "uT" || unit == "\xC2\xB5T" || unit == "\xCE\xBCT") return 0;  // uT, µT, μT
  if (unit == "mG") return 1;                                                 // 1 mG = 0.1 uT
  return std::nullopt;
}

inline double parse_flux(std::string_view cell, int shift, std::size_t row, std::string_view column) {
  const auto v = parse_decimal(cell, shift);
  if (!v) {
    throw Error(Errc::malformed_row,
                "column '" + std::string(column) + "' is not a number: '" + std::string(cell) + "'",
                row);
  }
  if (*v < 0.0 || (!cell.empty() && cell.front() == '-' && *v != 0.0)) {
    throw Error(Errc::negative_flux, "column '" + std::string(column) + "' is negative", row);
  }
  return *v == 0.0 ? 0.0 : *v;  // drop the sign of -0
}

}  // namespace detail

/// Parses measurement CSV text. The header selects nothing beyond validation:
/// each data row is read by its own column count (5 = RMS value, 7 = bx,by,bz),
/// so both forms may be mixed within one file.
inline std::vector<MeasurementPoint> parse_measurements(std::string_view text) {
  std::vector<MeasurementPoint> points;
  std::set<std::tuple<std::string, Side, int>> seen;

  bool have_header = false;
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (row == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);  // BOM
    if (detail::trim(line).empty()) {
      if (eol == text.size()) break;
      continue;
    }

    const auto cells = detail::split(line, ',');
    if (!have_header) {
      if (!detail::header_matches(cells, detail::kRmsHeader) &&
          !detail::header_matches(cells, detail::kComponentHeader)) {
        throw Error(Errc::malformed_row,
                    "expected header 'device_id,side,grid_index,unit,value' or "
                    "'device_id,side,grid_index,unit,bx,by,bz'",
                    row);
      }
      have_header = true;
      continue;
    }

    if (cells.size() != 5 && cells.size() != 7) {
      throw Error(Errc::malformed_row,
                  "expected 5 or 7 columns, found " + std::to_string(cells.size()), row);
    }

    MeasurementPoint p;
    p.row = row;
    p.device_id = std::string(cells[0]);
    if (p.device_id.empty()) throw Error(Errc::malformed_row, "empty device_id", row);

    const auto side = parse_side(cells[1]);
    if (!side) throw Error(Errc::malformed_row, "invalid side '" + std::string(cells[1]) + "'", row);
    p.side = *side;

    int index = 0;
    const auto [ptr, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), index);
    if (ec != std::errc{} || ptr != cells[2].data() + cells[2].size() || index < 1 ||
        index > kGridPoints) {
      throw Error(Errc::malformed_row, "grid_index must be an integer in 1..9, found '" +
                                           std::string(cells[2]) + "'",
                  row);
    }
    p.grid_index = index;

    const auto shift = detail::unit_shift(cells[3]);
    if (!shift) throw Error(Errc::unknown_unit, "unit '" + std::string(cells[3]) + "'", row);

    if (cells.size() == 5) {
      p.reading = FluxReading::from_rms(detail::parse_flux(cells[4], *shift, row, "value"));
    } else {
      const double bx = detail::parse_flux(cells[4], *shift, row, "bx");
      const double by = detail::parse_flux(cells[5], *shift, row, "by");
      const double bz = detail::parse_flux(cells[6], *shift, row, "bz");
      p.reading = FluxReading::from_components(bx, by, bz);
    }

    if (!seen.emplace(p.device_id, p.side, p.grid_index).second) {
      throw Error(Errc::duplicate_point,
                  p.device_id + " " + std::string(to_string(p.side)) + " point " +
                      std::to_string(p.grid_index) + " appears more than once",
                  row);
    }
    points.push_back(std::move(p));
  }

  if (points.empty()) throw Error(Errc::empty_input, "no measurement rows");
  return points;
}

/// Rejects repeated (device, side, grid_index) keys, e.g. after concatenating files.
inline void check_unique(std::span<const MeasurementPoint> points) {
  std::set<std::tuple<std::string, Side, int>> seen;
  for (const auto& p : points) {
    if (!seen.emplace(p.device_id, p.side, p.grid_index).second) {
      throw Error(Errc::duplicate_point,
                  p.device_id + " " + std::string(to_string(p.side)) + " point " +
                      std::to_string(p.grid_index) + " appears more than once",
                  p.row == 0 ? std::nullopt : std::optional<std::size_t>(p.row));
    }
  }
}

// ---------------------------------------------------------------------------
// Grid completeness and dataset assembly
// ---------------------------------------------------------------------------

struct SideCoverage {
  std::size_t points = 0;
  bool complete() const noexcept { return points == kGridPoints; }
  bool present() const noexcept { return points > 0; }
};

struct DeviceCoverage {
  std::string device_id;
  SideCoverage top;
  SideCoverage bottom;

  const SideCoverage& operator[](Side s) const { return s == Side::top ? top : bottom; }
  SideCoverage& operator[](Side s) { return s == Side::top ? top : bottom; }
};

/// Per-device point counts, devices in lexical order.
inline std::vector<DeviceCoverage> grid_coverage(std::span<const MeasurementPoint> points) {
  std::map<std::string, DeviceCoverage> by_device;
  for (const auto& p : points) {
    auto& cov = by_device[p.device_id];
    cov.device_id = p.device_id;
    ++cov[p.side].points;
  }
  std::vector<DeviceCoverage> out;
  out.reserve(by_device.size());
  for (auto& [_, cov] : by_device) out.push_back(std::move(cov));
  return out;
}

/// Throws IncompleteGrid for the first device side that is present but not full.
inline void check_grids(std::span<const MeasurementPoint> points) {
  for (const auto& cov : grid_coverage(points)) {
    for (Side s : kSides) {
      const auto& sc = cov[s];
      if (sc.present() && !sc.complete()) {
        throw Error(Errc::incomplete_grid, "device " + cov.device_id + " side " +
                                               std::string(to_string(s)) + " has " +
                                               std::to_string(sc.points) + " of 9 points");
      }
    }
  }
}

/// Splits points into the top and bottom feature datasets. Feature order is
/// (device_id lexical, grid_index ascending); `point_index` refers back into
/// `points`.
inline std::pair<FeatureDataset, FeatureDataset> build_datasets(
    std::span<const MeasurementPoint> points) {
  if (points.empty()) throw Error(Errc::empty_input, "no measurement points");
  check_unique(points);
  check_grids(points);

  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(points[a].device_id, points[a].grid_index) <
           std::tie(points[b].device_id, points[b].grid_index);
  });

  FeatureDataset top{Side::top, {}, 0};
  FeatureDataset bottom{Side::bottom, {}, 0};
  std::set<std::string> top_devices;
  std::set<std::string> bottom_devices;
  for (std::size_t i : order) {
    const auto& p = points[i];
    auto& ds = p.side == Side::top ? top : bottom;
    ds.features.push_back({i, p.value()});
    (p.side == Side::top ? top_devices : bottom_devices).insert(p.device_id);
  }
  top.device_count = top_devices.size();
  bottom.device_count = bottom_devices.size();
  return {std::move(top), std::move(bottom)};
}

}  // namespace emfrisk
