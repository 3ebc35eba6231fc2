#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "emfrisk/decimal.hpp"
#include "emfrisk/error.hpp"
#include "emfrisk/measurement.hpp"
#include "emfrisk/ranges.hpp"

namespace emfrisk {

struct MapCell {
  int grid_index = 1;
  double value = 0.0;
  int class_id = 7;
  bool above_limit = false;

  /// 1-based grid row and column: index 1..3 is the first row.
  int row() const noexcept { return (grid_index + 2) / 3; }
  int column() const noexcept { return (grid_index - 1) % 3 + 1; }
};

struct SideMap {
  Side side = Side::top;
  std::array<MapCell, kGridPoints> cells{};  ///< cells[i] has grid_index i + 1
};

struct DangerMap {
  std::string device_id;
  std::vector<SideMap> sides;  ///< top before bottom; absent sides omitted

  const SideMap* find(Side s) const {
    for (const auto& m : sides)
      if (m.side == s) return &m;
    return nullptr;
  }
};

/// Builds one device's map. All points must belong to the same device and
/// every side present must have its full 3x3 grid.
inline DangerMap build_map(std::span<const MeasurementPoint> device_points,
                           const ClassScheme& scheme) {
  if (device_points.empty()) throw Error(Errc::empty_input, "no points for device");
  check_unique(device_points);
  check_grids(device_points);

  DangerMap map;
  map.device_id = device_points.front().device_id;
  for (Side s : kSides) {
    SideMap sm;
    sm.side = s;
    bool present = false;
    for (const auto& p : device_points) {
      if (p.device_id != map.device_id) {
        throw Error(Errc::invalid_argument,
                    "points from devices " + map.device_id + " and " + p.device_id + " mixed");
      }
      if (p.side != s) continue;
      present = true;
      const double v = p.value();
      sm.cells[static_cast<std::size_t>(p.grid_index - 1)] =
          MapCell{p.grid_index, v, classify_value(scheme, s, v), at_or_above(v, scheme.limit)};
    }
    if (present) map.sides.push_back(sm);
  }
  return map;
}

/// One map per device, devices in lexical order.
inline std::vector<DangerMap> build_maps(std::span<const MeasurementPoint> points,
                                         const ClassScheme& scheme) {
  std::map<std::string, std::vector<MeasurementPoint>> by_device;
  for (const auto& p : points) by_device[p.device_id].push_back(p);
  std::vector<DangerMap> maps;
  maps.reserve(by_device.size());
  for (const auto& [_, pts] : by_device) maps.push_back(build_map(pts, scheme));
  return maps;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Fill colors for classes 1 (darkest red) through 7 (green), the color used
/// for values at or above the limit, and the regular text color.
struct Palette {
  std::array<std::string, 7> class_fill{"#7f0000", "#c62828", "#ef6c00", "#f9a825",
                                        "#c0ca33", "#7cb342", "#2e7d32"};
  std::string emphasis = "#c2185b";
  std::string text = "#212121";

  /// Fill for `class_id` of a scheme with `class_count` classes. Schemes with
  /// other than seven classes are spread over the same ramp.
  std::string fill(int class_id, std::size_t class_count) const {
    if (class_count == class_fill.size() || class_count == 0) {
      return class_fill.at(static_cast<std::size_t>(class_id - 1));
    }
    if (class_count == 1) return class_fill.front();
    const double t = static_cast<double>(class_id - 1) / static_cast<double>(class_count - 1);
    const auto idx = static_cast<std::size_t>(t * static_cast<double>(class_fill.size() - 1) + 0.5);
    return class_fill.at(idx);
  }
};

namespace detail {

inline void require_maps(std::span<const DangerMap> maps) {
  if (maps.empty()) throw Error(Errc::empty_input, "no maps to render");
}

inline std::string xml_escape(std::string_view in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline constexpr std::string_view kMapCsvHeader =
    "device_id,side,grid_index,value_uT,class_id,class_label,above_limit";

inline std::string render_csv(std::span<const DangerMap> maps, const ClassScheme& scheme) {
  detail::require_maps(maps);
  std::string out(kMapCsvHeader);
  out += '\n';
  for (const auto& m : maps) {
    for (const auto& sm : m.sides) {
      for (const auto& c : sm.cells) {
        out += fmt::format("{},{},{},{},{},{},{}\n", m.device_id, to_string(sm.side), c.grid_index,
                           format_uT(c.value), c.class_id, scheme.at(c.class_id).label,
                           c.above_limit ? "true" : "false");
      }
    }
  }
  return out;
}

/// Plain-text report: a 3x3 grid per device side (class id in brackets, '*'
/// marks values at or above the limit) followed by the cell listing.
inline std::string render_text(std::span<const DangerMap> maps, const ClassScheme& scheme) {
  detail::require_maps(maps);
  std::string out = fmt::format("Dangerousness maps (limit {} uT, * = at or above limit)\n",
                                format_fixed(scheme.limit, 2));
  for (const auto& m : maps) {
    for (const auto& sm : m.sides) {
      out += fmt::format("\n{} {}\n", m.device_id, to_string(sm.side));
      for (int r = 0; r < 3; ++r) {
        out += " ";
        for (int c = 0; c < 3; ++c) {
          const auto& cell = sm.cells[static_cast<std::size_t>(r * 3 + c)];
          out += fmt::format(" {}{}[{}]", format_uT(cell.value), cell.above_limit ? "*" : " ",
                             cell.class_id);
        }
        out += '\n';
      }
    }
  }
  out += "\ndevice side index value_uT class label above_limit\n";
  for (const auto& m : maps) {
    for (const auto& sm : m.sides) {
      for (const auto& c : sm.cells) {
        out += fmt::format("{} {} {} {} {} {} {}\n", m.device_id, to_string(sm.side), c.grid_index,
                           format_uT(c.value), c.class_id, scheme.at(c.class_id).label,
                           c.above_limit ? "true" : "false");
      }
    }
  }
  return out;
}

/// SVG document with one 3x3 grid group per device side, laid out with one
/// device per row (top grid left, bottom grid right), and a class legend.
inline std::string render_svg(std::span<const DangerMap> maps, const ClassScheme& scheme,
                              const Palette& palette = {}) {
  detail::require_maps(maps);
  constexpr int cell = 64;
  constexpr int grid = 3 * cell;
  constexpr int margin = 24;
  constexpr int title_h = 20;
  constexpr int block_w = grid + margin;
  constexpr int block_h = grid + title_h + margin;
  constexpr int legend_row = 22;

  const int legend_x = margin + 2 * block_w;
  const int width = legend_x + 260;
  const int height = std::max(margin + static_cast<int>(maps.size()) * block_h,
                              margin + title_h + static_cast<int>(scheme.size()) * legend_row + 40);

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\">\n",
      width, height, width, height);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", width, height);

  for (std::size_t mi = 0; mi < maps.size(); ++mi) {
    const auto& m = maps[mi];
    for (const auto& sm : m.sides) {
      const int x0 = margin + (sm.side == Side::top ? 0 : block_w);
      const int y0 = margin + static_cast<int>(mi) * block_h;
      const std::string id = detail::xml_escape(m.device_id) + "-" + std::string(to_string(sm.side));
      out += fmt::format("<g id=\"{}\" class=\"device-side\" transform=\"translate({},{})\">\n", id,
                         x0, y0);
      out += fmt::format("<text x=\"0\" y=\"14\" font-size=\"14\" fill=\"{}\">{} {}</text>\n",
                         palette.text, detail::xml_escape(m.device_id), to_string(sm.side));
      for (const auto& c : sm.cells) {
        const int cx = (c.column() - 1) * cell;
        const int cy = title_h + (c.row() - 1) * cell;
        out += fmt::format(
            "<rect class=\"cell\" data-index=\"{}\" data-class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" "
            "height=\"{}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"2\"/>\n",
            c.grid_index, c.class_id, cx, cy, cell, cell, palette.fill(c.class_id, scheme.size()));
        out += fmt::format(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"18\" rx=\"3\" fill=\"#ffffff\" "
            "fill-opacity=\"0.85\"/>\n",
            cx + 6, cy + cell / 2 - 12, cell - 12);
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"{}\"{}>{}</text>\n",
            cx + cell / 2, cy + cell / 2 + 2, c.above_limit ? palette.emphasis : palette.text,
            c.above_limit ? " font-weight=\"bold\"" : "", format_uT(c.value));
      }
      out += "</g>\n";
    }
  }

  out += fmt::format("<g id=\"legend\" transform=\"translate({},{})\">\n", legend_x, margin);
  out += fmt::format("<text x=\"0\" y=\"14\" font-size=\"14\" fill=\"{}\">Classes (limit {} uT)</text>\n",
                     palette.text, format_fixed(scheme.limit, 2));
  for (const auto& c : scheme.classes) {
    const int y = title_h + (c.id - 1) * legend_row;
    out += fmt::format("<rect x=\"0\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{}\"/>\n", y,
                       palette.fill(c.id, scheme.size()));
    out += fmt::format("<text class=\"legend-label\" x=\"24\" y=\"{}\" font-size=\"12\" fill=\"{}\">{} {}</text>\n",
                       y + 12, palette.text, c.id, detail::xml_escape(c.label));
  }
  const int note_y = title_h + static_cast<int>(scheme.size()) * legend_row + 12;
  out += fmt::format(
      "<text x=\"0\" y=\"{}\" font-size=\"12\" font-weight=\"bold\" fill=\"{}\">values at or above "
      "the limit</text>\n",
      note_y, palette.emphasis);
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace emfrisk
