#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emfrisk {

enum class Errc {
  malformed_row,
  unknown_unit,
  duplicate_point,
  negative_flux,
  incomplete_grid,
  empty_input,
  invalid_argument,
  too_few_distinct_values,
  k_too_large,
  dimension_mismatch,
  non_contiguous_clusters,
  rounding_collision,
  side_absent,
  io_failure,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_row: return "MalformedRow";
    case Errc::unknown_unit: return "UnknownUnit";
    case Errc::duplicate_point: return "DuplicatePoint";
    case Errc::negative_flux: return "NegativeFlux";
    case Errc::incomplete_grid: return "IncompleteGrid";
    case Errc::empty_input: return "EmptyInput";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::too_few_distinct_values: return "TooFewDistinctValues";
    case Errc::k_too_large: return "KTooLarge";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::non_contiguous_clusters: return "NonContiguousClusters";
    case Errc::rounding_collision: return "RoundingCollision";
    case Errc::side_absent: return "SideAbsent";
    case Errc::io_failure: return "IoFailure";
  }
  return "Unknown";
}

/// Library error. `row` is the 1-based line number in the source text when
/// the error comes from parsing.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail, std::optional<std::size_t> row = {})
      : std::runtime_error(compose(code, detail, row)), code_(code), row_(row) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  static std::string compose(Errc code, const std::string& detail,
                             std::optional<std::size_t> row) {
    std::string msg(to_string(code));
    if (row) msg += " at row " + std::to_string(*row);
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  Errc code_;
  std::optional<std::size_t> row_;
};

}  // namespace emfrisk
