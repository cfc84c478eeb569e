#include <algorithm>
#include <iomanip>
#include <ostream>

#include "common.hpp"
#include "oscar/error.hpp"
#include "oscar/index_io.hpp"

namespace oscar::cli {

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kKnown{"NN", "FT", "ST", "F", "DCG", "ANMRR"};
  for (const auto& m : options.metrics) {
    if (std::find(kKnown.begin(), kKnown.end(), m) == kKnown.end()) {
      fail(ErrorCode::kInvalidArgument, "unknown metric '" + m + "' (NN, FT, ST, F, DCG, ANMRR)");
    }
  }

  std::vector<QueryRanking> rankings;
  std::size_t skipped = 0;
  json source_run;
  for (const auto& raw : read_json_records(options.results)) {
    const ResultRecord r = result_record_from_json(raw);
    if (source_run.is_null() && raw.contains("run")) source_run = raw.at("run");
    if (r.error_code) {
      ++skipped;
      err << "skipping failed query " << r.query_id << '\n';
      continue;
    }
    QueryRanking q{r.query_id, {}};
    for (const auto& e : r.ranking) q.ranking.push_back(e.model_id);
    rankings.push_back(std::move(q));
  }

  const auto truth_records = read_json_records(options.ground_truth);
  if (truth_records.size() != 1) fail(ErrorCode::kInvalidArgument, "ground truth must be one JSON object");
  const GroundTruth truth = ground_truth_from_json(truth_records.front());
  std::optional<ObjectIndex> index;
  if (options.index_dir) index = load_index(*options.index_dir);
  const ResolvedGroundTruth resolved = resolve_ground_truth(truth, index ? &*index : nullptr);
  for (const auto& q : rankings) {
    if (!resolved.count(q.query_id)) {
      fail(ErrorCode::kInvalidArgument, "no ground truth for query '" + q.query_id + "'");
    }
  }

  const MetricReport report = evaluate_rankings(rankings, resolved, options.k_list);
  json j = oscar::to_json(report);
  json table1 = json::object();
  for (const auto& m : options.metrics) table1[m] = j["table1"][m];
  j["table1"] = std::move(table1);
  j["skipped_queries"] = skipped;
  json config = {{"command", "evaluate"},
                 {"results", options.results.string()},
                 {"ground_truth", options.ground_truth.string()},
                 {"k_list", options.k_list},
                 {"metrics", options.metrics}};
  if (options.index_dir) config["index"] = options.index_dir->string();
  const int manifest_version =
      index ? index->manifest_version()
            : (source_run.is_object() ? source_run.value("manifest_version", kManifestVersion)
                                      : kManifestVersion);
  j["run"] = run_stamp(std::move(config), manifest_version);
  if (source_run.is_object()) j["run"]["retrieval_run"] = source_run;
  if (!options.out.empty()) write_file_atomic(options.out, j.dump(2) + "\n");

  out << std::left << std::setw(8) << "metric" << "value\n";
  for (const auto& m : options.metrics) {
    out << std::setw(8) << m << format_number(j["table1"][m].get<double>()) << '\n';
  }
  for (const auto& [k, v] : report.map_at_k) {
    out << std::setw(8) << ("mAP@" + std::to_string(k)) << format_number(v) << '\n';
  }
  out << report.num_queries << " queries evaluated";
  if (skipped) out << ", " << skipped << " failed queries skipped";
  out << '\n';
  return kExitOk;
}

}  // namespace oscar::cli
