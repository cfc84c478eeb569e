#include <cmath>
#include <ostream>

#include "common.hpp"
#include "oscar/error.hpp"
#include "oscar/index_io.hpp"

namespace oscar::cli {

std::vector<double> value_range(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to)) {
    fail(ErrorCode::kInvalidArgument, "range step must be positive");
  }
  if (from > to) fail(ErrorCode::kInvalidArgument, "empty range");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    // Rounded so 0.1 + 5 * 0.05 prints and compares as 0.35.
    values.push_back(std::round((from + step * static_cast<double>(i)) * 1e9) / 1e9);
  }
  return values;
}

std::vector<double> default_tau_grid() { return value_range(0.10, 0.65, 0.05); }

std::vector<double> default_k_grid() { return {5, 10, 15, 20, 25, 30, 40}; }

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  if (options.parameter != "tau" && options.parameter != "k") {
    fail(ErrorCode::kInvalidArgument, "--param must be tau or k");
  }
  const bool tau = options.parameter == "tau";
  const std::vector<double> values =
      !options.values.empty() ? options.values : (tau ? default_tau_grid() : default_k_grid());
  for (double v : values) {
    if (!tau && (v < 1 || v != std::floor(v))) {
      fail(ErrorCode::kInvalidArgument, "k values must be positive integers");
    }
    if (tau && !std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "tau values must be finite");
  }
  if (options.ap_k < 1) fail(ErrorCode::kInvalidArgument, "--ap-k must be >= 1");
  validate(options.config);

  const ObjectIndex index = load_index(options.index_dir);
  LazyProvider provider(options.provider, dims_of(index));
  std::vector<Query> queries;
  for (const auto& raw : read_json_records(options.queries)) {
    Query q = resolve_query(query_spec_from_json(raw), provider, options.queries.parent_path());
    if (q.query_id.empty()) fail(ErrorCode::kInvalidArgument, "sweep queries need a query_id");
    queries.push_back(std::move(q));
  }
  if (queries.empty()) fail(ErrorCode::kInvalidArgument, "no queries");

  const auto truth_records = read_json_records(options.ground_truth);
  if (truth_records.size() != 1) fail(ErrorCode::kInvalidArgument, "ground truth must be one JSON object");
  const ResolvedGroundTruth truth =
      resolve_ground_truth(ground_truth_from_json(truth_records.front()), &index);

  const json config = {{"command", "sweep"},
                       {"index", options.index_dir.string()},
                       {"queries", options.queries.string()},
                       {"ground_truth", options.ground_truth.string()},
                       {"provider", to_json(options.provider)},
                       {"retrieval", oscar::to_json(options.config)},
                       {"stage", to_string(options.stage)},
                       {"parameter", options.parameter},
                       {"values", values},
                       {"ap_k", options.ap_k}};
  std::string csv = "# " + run_stamp(config, index.manifest_version()).dump() + "\n";
  csv += std::string(tau ? "tau_text" : "fallback_k") + ",average_precision\n";
  for (double v : values) {
    RetrievalConfig c = options.config;
    if (tau) c.tau_text = v;
    else c.fallback_k = static_cast<int>(v);
    std::vector<QueryRanking> rankings;
    for (const auto& q : queries) {
      QueryRanking r{q.query_id, {}};
      for (const auto& e : rank_all(index, q, c, options.stage).entries) r.ranking.push_back(e.model_id);
      rankings.push_back(std::move(r));
    }
    csv += format_number(v, 9) + "," + format_number(mean_ap_at_k(rankings, truth, options.ap_k), 9) + "\n";
  }
  write_file_atomic(options.out, csv);
  out << values.size() << " rows written to " << options.out.string() << '\n';
  (void)err;
  return kExitOk;
}

}  // namespace oscar::cli
