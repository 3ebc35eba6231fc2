#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "emfrisk/clustering.hpp"
#include "emfrisk/decimal.hpp"
#include "emfrisk/error.hpp"
#include "emfrisk/measurement.hpp"

namespace emfrisk {

/// Default reference limit in uT (200 nT).
inline constexpr double kDefaultLimit = 0.2;

/// One cluster's emission range. Rank 1 is the highest range of its side.
struct EmissionRange {
  Side side = Side::top;
  std::size_t rank = 1;
  double raw_min = 0.0;
  double raw_max = 0.0;
  /// Extended display bounds, filled by extend_ranges. `ext_max` stays empty
  /// for the open-topped rank 1.
  std::optional<Hundredths> ext_min;
  std::optional<Hundredths> ext_max;
  bool open_top = false;

  bool extended() const noexcept { return ext_min.has_value(); }

  /// Threshold shown for an open-topped range ("> x").
  Hundredths open_threshold() const { return ext_min.value() - 1; }
};

/// Display form of an extended range: "> 0.19" or "0.12 - 0.19".
inline std::string display_interval(const EmissionRange& r) {
  if (!r.extended()) return format_uT(r.raw_min) + " - " + format_uT(r.raw_max);
  if (r.open_top) return "> " + format_hundredths(r.open_threshold());
  return format_hundredths(*r.ext_min) + " - " + format_hundredths(*r.ext_max);
}

namespace detail {

inline void require_rank_order(std::span<const EmissionRange> ranges) {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].rank != i + 1) {
      throw Error(Errc::invalid_argument, "ranges must be ordered by rank starting at 1");
    }
    if (ranges[i].raw_min > ranges[i].raw_max) {
      throw Error(Errc::invalid_argument, "range with raw_min above raw_max");
    }
    if (i > 0 && !(ranges[i - 1].raw_min > ranges[i].raw_max)) {
      throw Error(Errc::non_contiguous_clusters,
                  "range " + std::to_string(i + 1) + " overlaps range " + std::to_string(i));
    }
  }
}

}  // namespace detail

/// Per-cluster [min, max] of a clustering, ranked by descending minimum.
inline std::vector<EmissionRange> extract_ranges(std::span<const double> values,
                                                 const Clustering& clustering, Side side) {
  if (values.size() != clustering.assignments.size()) {
    throw Error(Errc::dimension_mismatch, "clustering does not match dataset size");
  }
  const std::size_t k = clustering.k();
  std::vector<std::optional<EmissionRange>> per_cluster(k);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t c = clustering.assignments[i];
    if (c >= k) throw Error(Errc::dimension_mismatch, "assignment without centroid");
    auto& r = per_cluster[c];
    if (!r) {
      r = EmissionRange{side, 0, values[i], values[i], {}, {}, false};
    } else {
      r->raw_min = std::min(r->raw_min, values[i]);
      r->raw_max = std::max(r->raw_max, values[i]);
    }
  }

  std::vector<EmissionRange> out;
  for (auto& r : per_cluster) {
    if (!r) throw Error(Errc::invalid_argument, "clustering has an empty cluster");
    out.push_back(*r);
  }
  std::sort(out.begin(), out.end(),
            [](const EmissionRange& a, const EmissionRange& b) { return a.raw_min > b.raw_min; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  detail::require_rank_order(out);
  return out;
}

inline std::vector<EmissionRange> extract_ranges(const FeatureDataset& dataset,
                                                 const Clustering& clustering) {
  const auto values = dataset.values();
  return extract_ranges(values, clustering, dataset.side);
}

/// Rounds each minimum half-up to 0.01 uT and stretches every range up to
/// 0.01 below the next higher range's minimum, so that a side's ranges tile
/// the 0.01 uT grid. Rank 1 is left open above.
inline std::vector<EmissionRange> extend_ranges(std::vector<EmissionRange> ranges) {
  detail::require_rank_order(ranges);
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    auto& r = ranges[i];
    r.ext_min = round_half_up_hundredths(r.raw_min);
    if (i == 0) {
      r.open_top = true;
      r.ext_max.reset();
      continue;
    }
    r.open_top = false;
    const Hundredths above = *ranges[i - 1].ext_min;
    if (!(above > *r.ext_min)) {
      throw Error(Errc::rounding_collision,
                  std::string(to_string(r.side)) + " R" + std::to_string(r.rank) + " and R" +
                      std::to_string(r.rank - 1) + " both round to " + format_hundredths(above));
    }
    r.ext_max = above - 1;
  }
  return ranges;
}

// ---------------------------------------------------------------------------
// Dangerousness classes
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 7> kCanonicalLabels{
    "Highly dangerous", "Middle dangerous", "Low dangerous", "Low safe",
    "Low medium safe",  "Medium safe",      "Highly safe"};

inline constexpr std::size_t kCanonicalRanges = 5;
inline constexpr std::size_t kCanonicalDangerClasses = 3;
inline constexpr std::size_t kCanonicalSafeClasses = 4;

/// A side's interval inside one class, on the 0.01 uT grid. `hi` is empty
/// when the interval is open above.
struct ClassInterval {
  Hundredths lo;
  std::optional<Hundredths> hi;
  std::vector<std::size_t> ranks;  ///< source ranges, by rank

  bool open() const noexcept { return !hi.has_value(); }
  bool contains(Hundredths v) const { return v >= lo && (open() || v <= *hi); }
  Hundredths open_threshold() const { return lo - 1; }
};

inline std::string display_interval(const ClassInterval& iv) {
  if (iv.open()) return "> " + format_hundredths(iv.open_threshold());
  return format_hundredths(iv.lo) + " - " + format_hundredths(*iv.hi);
}

struct DangerClass {
  int id = 1;
  std::string label;
  bool dangerous = false;  ///< sits above the reference limit
  std::optional<ClassInterval> top;
  std::optional<ClassInterval> bottom;

  const std::optional<ClassInterval>& interval(Side s) const { return s == Side::top ? top : bottom; }
  std::optional<ClassInterval>& interval(Side s) { return s == Side::top ? top : bottom; }
};

struct ClassScheme {
  double limit = kDefaultLimit;
  /// True for the 7-label scheme (five ranges per side); otherwise labels
  /// are generic D1..Dm / S1..Sn.
  bool canonical = true;
  std::vector<DangerClass> classes;  ///< ordered by id, 1 = most dangerous
  std::vector<std::string> notes;

  const DangerClass& at(int id) const { return classes.at(static_cast<std::size_t>(id - 1)); }
  std::size_t size() const noexcept { return classes.size(); }
  bool has_side(Side s) const {
    return std::any_of(classes.begin(), classes.end(),
                       [s](const DangerClass& c) { return c.interval(s).has_value(); });
  }
};

namespace detail {

struct SideSplit {
  std::vector<const EmissionRange*> dangerous;  // descending
  std::vector<const EmissionRange*> safe;       // descending
};

inline SideSplit split_by_limit(std::span<const EmissionRange> ranges, double limit) {
  SideSplit s;
  for (const auto& r : ranges) (at_or_above(r.raw_max, limit) ? s.dangerous : s.safe).push_back(&r);
  return s;
}

inline void add_to_class(DangerClass& cls, const EmissionRange& r) {
  auto& slot = cls.interval(r.side);
  if (!slot) {
    slot = ClassInterval{*r.ext_min, r.ext_max, {r.rank}};
    return;
  }
  slot->lo = std::min(slot->lo, *r.ext_min);
  if (r.open_top || slot->open()) {
    slot->hi.reset();
  } else {
    slot->hi = std::max(*slot->hi, *r.ext_max);
  }
  slot->ranks.push_back(r.rank);
  std::sort(slot->ranks.begin(), slot->ranks.end());
}

inline std::string range_name(const EmissionRange& r) {
  return std::string(to_string(r.side)) + " R" + std::to_string(r.rank);
}

}  // namespace detail

/// Aligns the extended ranges of both sides into one banded scheme.
///
/// Per side, ranges whose maximum reaches `limit` are dangerous and fill the
/// dangerous classes top-down; the rest fill the safe classes top-down,
/// except that the side's lowest range always lands in the last safe class.
/// With five ranges per side the bands are the 7 canonical classes (3
/// dangerous, 4 safe); surplus ranges in a band share its last class. Other
/// range counts get as many generic classes as the busier side needs.
/// Either side may be empty (not measured).
inline ClassScheme align_classes(std::span<const EmissionRange> top,
                                 std::span<const EmissionRange> bottom, double limit) {
  if (!(limit > 0.0)) throw Error(Errc::invalid_argument, "limit must be positive");
  if (top.empty() && bottom.empty()) throw Error(Errc::empty_input, "no ranges to align");
  for (auto side : {top, bottom}) {
    detail::require_rank_order(side);
    for (const auto& r : side)
      if (!r.extended()) throw Error(Errc::invalid_argument, "ranges must be extended first");
  }

  ClassScheme scheme;
  scheme.limit = limit;
  scheme.canonical = (top.empty() || top.size() == kCanonicalRanges) &&
                     (bottom.empty() || bottom.size() == kCanonicalRanges);

  const auto top_split = detail::split_by_limit(top, limit);
  const auto bottom_split = detail::split_by_limit(bottom, limit);

  std::size_t danger_classes = kCanonicalDangerClasses;
  std::size_t safe_classes = kCanonicalSafeClasses;
  if (!scheme.canonical) {
    danger_classes = std::max(top_split.dangerous.size(), bottom_split.dangerous.size());
    safe_classes = std::max(top_split.safe.size(), bottom_split.safe.size());
  }

  for (std::size_t i = 0; i < danger_classes + safe_classes; ++i) {
    DangerClass c;
    c.id = static_cast<int>(i + 1);
    c.dangerous = i < danger_classes;
    if (scheme.canonical) {
      c.label = std::string(kCanonicalLabels[i]);
    } else {
      c.label = c.dangerous ? "D" + std::to_string(i + 1)
                            : "S" + std::to_string(i + 1 - danger_classes);
    }
    scheme.classes.push_back(std::move(c));
  }

  const std::string limit_text = format_fixed(limit, 2);
  for (const auto* split : {&top_split, &bottom_split}) {
    const auto& dangerous = split->dangerous;
    for (std::size_t i = 0; i < dangerous.size(); ++i) {
      const std::size_t slot = std::min(i, danger_classes - 1);
      detail::add_to_class(scheme.classes[slot], *dangerous[i]);
      if (slot != i) {
        scheme.notes.push_back(detail::range_name(*dangerous[i]) + " shares class " +
                               std::to_string(slot + 1) + " (more dangerous ranges than classes)");
      }
    }
    for (const auto* r : dangerous) {
      if (at_or_above(r->raw_min, limit)) continue;
      scheme.notes.push_back(detail::range_name(*r) + " spans " + format_uT(r->raw_min) + " - " +
                             format_uT(r->raw_max) + " across the " + limit_text +
                             " uT limit; classed dangerous because its maximum reaches the limit");
    }

    const auto& safe = split->safe;
    for (std::size_t i = 0; i < safe.size(); ++i) {
      const bool lowest = i + 1 == safe.size();
      std::size_t slot = lowest ? safe_classes - 1 : std::min(i, safe_classes >= 2 ? safe_classes - 2 : 0);
      if (!lowest && slot != i) {
        scheme.notes.push_back(detail::range_name(*safe[i]) + " shares class " +
                               std::to_string(danger_classes + slot + 1) +
                               " (more safe ranges than classes)");
      }
      detail::add_to_class(scheme.classes[danger_classes + slot], *safe[i]);
    }
    if (safe.empty() && !dangerous.empty()) {
      scheme.notes.push_back(detail::range_name(*dangerous.back()) +
                             " is the lowest range and reaches the limit; no safe class holds this side");
    }
  }
  return scheme;
}

/// Class id for a value measured on `side`. The value is rounded half-up to
/// 0.01 uT; values beyond the side's outermost intervals clamp to the
/// nearest class.
inline int classify_value(const ClassScheme& scheme, Side side, double value) {
  if (!(value >= 0.0)) throw Error(Errc::invalid_argument, "value must be non-negative");
  const Hundredths v = round_half_up_hundredths(value);

  const DangerClass* highest = nullptr;  // interval with the largest lo
  const DangerClass* lowest = nullptr;
  for (const auto& c : scheme.classes) {
    const auto& iv = c.interval(side);
    if (!iv) continue;
    if (iv->contains(v)) return c.id;
    if (!highest || iv->lo > highest->interval(side)->lo) highest = &c;
    if (!lowest || iv->lo < lowest->interval(side)->lo) lowest = &c;
  }
  if (!highest) {
    throw Error(Errc::side_absent, "scheme has no " + std::string(to_string(side)) + " intervals");
  }
  return v < lowest->interval(side)->lo ? lowest->id : highest->id;
}

/// Text table of the scheme: one row per class, one column per side.
inline std::string render_class_table(const ClassScheme& scheme) {
  const std::string limit = format_fixed(scheme.limit, 2);
  std::string out;
  out += fmt::format("{:<10} {:>2}  {:<18} {:<14} {:<14}\n", "band", "id", "class", "TOP", "BOTTOM");
  for (const auto& c : scheme.classes) {
    const auto cell = [&](Side s) {
      const auto& iv = c.interval(s);
      return iv ? display_interval(*iv) : std::string("-");
    };
    const std::string band = (c.dangerous ? ">= " : "< ") + limit + " uT";
    out += fmt::format("{:<10} {:>2}  {:<18} {:<14} {:<14}\n", band, c.id, c.label, cell(Side::top),
                       cell(Side::bottom));
  }
  for (const auto& note : scheme.notes) out += "note: " + note + "\n";
  return out;
}

}  // namespace emfrisk
