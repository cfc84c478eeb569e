#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oscar/index.hpp"

namespace oscar {

using RelevantSet = std::unordered_set<std::string>;

/// Precision-weighted relevance over the top-k prefix, normalized by
/// min(k, |relevant|). Errors: empty ranking, duplicate ids, k < 1 or an empty
/// relevant set -> invalid-argument.
double average_precision_at_k(std::span<const std::string> ranking,
                              const RelevantSet& relevant, int k);

struct QueryRanking {
  std::string query_id;
  std::vector<std::string> ranking;
};

/// Ground truth as written in the ground-truth file.
struct GroundTruthEntry {
  enum class Kind { kInstance, kClass };
  Kind kind = Kind::kInstance;
  std::string value;  // model_id or class label
};
using GroundTruth = std::map<std::string, GroundTruthEntry>;

/// query_id -> relevant model ids.
using ResolvedGroundTruth = std::unordered_map<std::string, RelevantSet>;

/// Class entries are expanded to all objects carrying that label, which needs
/// `index`. Errors: unknown model_id or class, or a class entry without an
/// index -> invalid-argument.
ResolvedGroundTruth resolve_ground_truth(const GroundTruth& truth,
                                         const ObjectIndex* index);

/// Mean of per-query AP@k. Errors: no queries, or a query without ground
/// truth -> invalid-argument.
double mean_ap_at_k(std::span<const QueryRanking> rankings,
                    const ResolvedGroundTruth& truth, int k);

/// Cutoffs of the shape-retrieval criteria. With C the relevant set of a
/// query: first tier looks at |C| results, second tier at 2|C|, the
/// F-measure at min(f_cutoff, N), and ANMRR uses a window of
/// window_factor * |C| with misses ranked at anmrr_penalty * window.
struct Table1Config {
  int f_cutoff = 32;
  int window_factor = 2;
  double anmrr_penalty = 1.25;
};

struct QueryMetrics {
  std::string query_id;
  std::size_t relevant_count = 0;
  double nn = 0.0;
  double ft = 0.0;
  double st = 0.0;
  double f = 0.0;
  double dcg = 0.0;
  double nmrr = 0.0;
  std::map<int, double> ap_at_k;
};

struct MetricReport {
  double nn = 0.0;
  double ft = 0.0;
  double st = 0.0;
  double f = 0.0;
  double dcg = 0.0;
  double anmrr = 0.0;
  std::map<int, double> map_at_k;
  std::vector<QueryMetrics> per_query;
  std::size_t num_queries = 0;
  Table1Config config;
};

/// Per-query metrics for a single ranking.
QueryMetrics query_metrics(std::string query_id, std::span<const std::string> ranking,
                           const RelevantSet& relevant, std::span<const int> k_list,
                           const Table1Config& config = {});

/// NN, FT, ST, F, DCG and ANMRR averaged over queries. Errors: empty
/// relevant set, missing ground truth or no queries -> invalid-argument.
MetricReport table1_metrics(std::span<const QueryRanking> rankings,
                            const ResolvedGroundTruth& truth,
                            const Table1Config& config = {});

/// table1_metrics plus mAP@k for every k in `k_list`.
MetricReport evaluate_rankings(std::span<const QueryRanking> rankings,
                               const ResolvedGroundTruth& truth,
                               std::span<const int> k_list,
                               const Table1Config& config = {});

}  // namespace oscar
