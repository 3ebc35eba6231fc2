#pragma once

// End-to-end runs behind the command-line tool: ingest -> cluster ->
// classify -> report. Commands return process exit codes and never throw for
// data problems.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iterator>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "emfrisk/clustering.hpp"
#include "emfrisk/error.hpp"
#include "emfrisk/json_io.hpp"
#include "emfrisk/measurement.hpp"
#include "emfrisk/ranges.hpp"
#include "emfrisk/risk_map.hpp"

namespace emfrisk {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,       ///< unreadable, malformed or incomplete input
  kExitClustering = 2,  ///< clustering infeasible for the data
  kExitIo = 3,          ///< outputs could not be written
};

enum class Format { text, csv, svg, json };

inline std::optional<Format> parse_format(std::string_view token) {
  if (token == "text") return Format::text;
  if (token == "csv") return Format::csv;
  if (token == "svg") return Format::svg;
  if (token == "json") return Format::json;
  return std::nullopt;
}

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::size_t k = 5;
  std::size_t restarts = 50;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;
  double limit = kDefaultLimit;
  std::filesystem::path out_dir = "out";
  std::set<Format> formats{Format::text, Format::csv, Format::svg, Format::json};

  ClusterParams cluster_params() const { return {k, restarts, max_iterations, seed}; }
  ConfigEcho echo() const { return {k, restarts, max_iterations, seed, limit}; }
};

/// Everything one analysis produces, before it is written anywhere.
struct SideResult {
  FeatureDataset dataset;
  Clustering clustering;
  std::vector<EmissionRange> ranges;  ///< extended
};

struct Analysis {
  std::vector<MeasurementPoint> points;
  std::optional<SideResult> top;
  std::optional<SideResult> bottom;
  ClassScheme scheme;
  std::vector<DangerMap> maps;

  const std::optional<SideResult>& side(Side s) const { return s == Side::top ? top : bottom; }
};

namespace detail {

/// Error tagged with the exit code it maps to.
struct CommandError {
  int exit_code;
  std::string message;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError{kExitInput, path.string() + ": cannot open input file"};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Parses every input, prefixing errors with the file name.
inline std::vector<MeasurementPoint> load_points(const std::vector<std::filesystem::path>& inputs) {
  if (inputs.empty()) throw CommandError{kExitInput, "no input files given"};
  std::vector<MeasurementPoint> all;
  for (const auto& path : inputs) {
    const std::string text = read_file(path);
    try {
      auto pts = parse_measurements(text);
      all.insert(all.end(), std::make_move_iterator(pts.begin()), std::make_move_iterator(pts.end()));
      check_unique(all);
    } catch (const Error& e) {
      throw CommandError{kExitInput, path.string() + ": " + e.what()};
    }
  }
  return all;
}

inline SideResult analyze_side(FeatureDataset dataset, const ClusterParams& params) {
  SideResult r;
  r.clustering = best_of_restarts(dataset, params);
  r.ranges = extend_ranges(extract_ranges(dataset, r.clustering));
  r.dataset = std::move(dataset);
  return r;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CommandError{kExitIo, path.string() + ": cannot open for writing"};
  out << content;
  out.flush();
  if (!out) throw CommandError{kExitIo, path.string() + ": write failed"};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Runs the pipeline in memory. Throws Error on data problems.
inline Analysis analyze(std::vector<MeasurementPoint> points, const RunConfig& config) {
  if (!(config.limit > 0.0)) throw Error(Errc::invalid_argument, "limit must be positive");
  const ClusterParams params = config.cluster_params();

  Analysis a;
  auto [top, bottom] = build_datasets(points);

  // The two sides are independent; cluster them concurrently.
  std::future<SideResult> top_job;
  if (!top.empty()) {
    params.validate(top.size());
    top_job = std::async(std::launch::async, detail::analyze_side, std::move(top), params);
  }
  if (!bottom.empty()) {
    params.validate(bottom.size());
    a.bottom = detail::analyze_side(std::move(bottom), params);
  }
  if (top_job.valid()) a.top = top_job.get();

  const std::vector<EmissionRange> none;
  a.scheme = align_classes(a.top ? a.top->ranges : none, a.bottom ? a.bottom->ranges : none,
                           config.limit);
  a.maps = build_maps(points, a.scheme);
  a.points = std::move(points);
  return a;
}

inline std::string render_range_table(const Analysis& a) {
  std::string out = fmt::format("{:<6} {:<4} {:<17} {:<14}\n", "side", "rank", "min-max (uT)", "extended");
  for (Side s : kSides) {
    const auto& r = a.side(s);
    if (!r) continue;
    for (const auto& range : r->ranges) {
      out += fmt::format("{:<6} R{:<3} {:<17} {:<14}\n", to_string(s), range.rank,
                         format_uT(range.raw_min) + " - " + format_uT(range.raw_max),
                         display_interval(range));
    }
  }
  return out;
}

/// `analyze` command: writes per-side range JSON, the class scheme JSON and
/// table, and the requested map renders into `config.out_dir`.
inline int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.k < 1) throw detail::CommandError{kExitInput, "--k must be at least 1"};
    if (config.restarts < 1) throw detail::CommandError{kExitInput, "--restarts must be at least 1"};
    if (!(config.limit > 0.0)) throw detail::CommandError{kExitInput, "--limit must be positive"};

    std::vector<MeasurementPoint> points = detail::load_points(config.inputs);

    Analysis a;
    try {
      a = analyze(std::move(points), config);
    } catch (const Error& e) {
      switch (e.code()) {
        case Errc::too_few_distinct_values:
        case Errc::k_too_large:
        case Errc::rounding_collision:
        case Errc::non_contiguous_clusters:
          throw detail::CommandError{kExitClustering, e.what()};
        default:
          throw detail::CommandError{kExitInput, e.what()};
      }
    }

    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
      throw detail::CommandError{kExitIo,
                                 config.out_dir.string() + ": cannot create directory: " + ec.message()};
    }

    const Json echo = to_json(config.echo());
    for (Side s : kSides) {
      const auto& r = a.side(s);
      if (!r) continue;
      Json ranges = Json::array();
      for (const auto& range : r->ranges) ranges.push_back(to_json(range));
      const Json doc{{"config", echo},
                     {"side", to_string(s)},
                     {"features", r->dataset.size()},
                     {"devices", r->dataset.device_count},
                     {"clustering", clustering_to_json(r->clustering, r->dataset, a.points, config.seed)},
                     {"ranges", std::move(ranges)}};
      detail::write_file(config.out_dir / (std::string(to_string(s)) + "_ranges.json"), detail::dump(doc));
    }

    Json scheme_doc{{"config", echo}};
    const Json scheme_json = to_json(a.scheme);
    for (const auto& [key, value] : scheme_json.items()) scheme_doc[key] = value;
    detail::write_file(config.out_dir / "class_scheme.json", detail::dump(scheme_doc));
    const std::string class_table = render_class_table(a.scheme);
    detail::write_file(config.out_dir / "class_table.txt", class_table);

    if (config.formats.count(Format::text))
      detail::write_file(config.out_dir / "maps.txt", render_text(a.maps, a.scheme));
    if (config.formats.count(Format::csv))
      detail::write_file(config.out_dir / "maps.csv", render_csv(a.maps, a.scheme));
    if (config.formats.count(Format::svg))
      detail::write_file(config.out_dir / "maps.svg", render_svg(a.maps, a.scheme));
    if (config.formats.count(Format::json)) {
      const Json doc{{"config", echo}, {"maps", to_json(a.maps, a.scheme)}};
      detail::write_file(config.out_dir / "maps.json", detail::dump(doc));
    }

    out << fmt::format("{} devices, {} points\n", a.maps.size(), a.points.size());
    for (Side s : kSides) {
      if (const auto& r = a.side(s)) {
        out << fmt::format("{} objective: {:.6f} uT ({} features, {} iterations)\n", to_string(s),
                           r->clustering.objective, r->dataset.size(), r->clustering.iterations_used);
      }
    }
    out << '\n' << render_range_table(a) << '\n' << class_table;
    out << "outputs written to " << config.out_dir.string() << '\n';
    return kExitOk;
  } catch (const detail::CommandError& e) {
    err << "error: " << e.message << '\n';
    return e.exit_code;
  }
}

/// `validate` command: parses and grid-checks inputs without clustering.
inline int cmd_validate(const std::vector<std::filesystem::path>& inputs, std::ostream& out,
                        std::ostream& err) {
  try {
    const auto points = detail::load_points(inputs);
    const auto coverage = grid_coverage(points);
    bool ok = true;
    out << fmt::format("{} devices, {} points\n", coverage.size(), points.size());
    for (const auto& cov : coverage) {
      out << fmt::format("{}: top {}/9, bottom {}/9\n", cov.device_id, cov.top.points,
                         cov.bottom.points);
      for (Side s : kSides) {
        if (cov[s].present() && !cov[s].complete()) {
          ok = false;
          err << fmt::format("error: IncompleteGrid: device {} side {} has {} of 9 points\n",
                             cov.device_id, to_string(s), cov[s].points);
        }
      }
    }
    return ok ? kExitOk : kExitInput;
  } catch (const detail::CommandError& e) {
    err << "error: " << e.message << '\n';
    return e.exit_code;
  }
}

}  // namespace emfrisk
