#include "oscar/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

namespace {

void check_ranking(std::span<const std::string> ranking) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ranking.size());
  for (const auto& id : ranking) {
    if (!seen.insert(id).second) {
      fail(ErrorCode::kInvalidArgument, "ranking lists '" + id + "' more than once");
    }
  }
}

const RelevantSet& relevant_for(const ResolvedGroundTruth& truth, const std::string& query_id) {
  auto it = truth.find(query_id);
  if (it == truth.end()) {
    fail(ErrorCode::kInvalidArgument, "no ground truth for query '" + query_id + "'");
  }
  if (it->second.empty()) {
    fail(ErrorCode::kInvalidArgument, "empty relevant set for query '" + query_id + "'");
  }
  return it->second;
}

double ap_unchecked(std::span<const std::string> ranking, const RelevantSet& relevant, int k) {
  const std::size_t depth = std::min(ranking.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.count(ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  if (hits == 0) return 0.0;
  return sum / static_cast<double>(std::min(static_cast<std::size_t>(k), relevant.size()));
}

}  // namespace

double average_precision_at_k(std::span<const std::string> ranking,
                              const RelevantSet& relevant, int k) {
  if (ranking.empty()) fail(ErrorCode::kInvalidArgument, "empty ranking");
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (relevant.empty()) fail(ErrorCode::kInvalidArgument, "empty relevant set");
  check_ranking(ranking);
  return ap_unchecked(ranking, relevant, k);
}

ResolvedGroundTruth resolve_ground_truth(const GroundTruth& truth, const ObjectIndex* index) {
  ResolvedGroundTruth resolved;
  std::unordered_map<std::string, RelevantSet> by_class;
  if (index) {
    for (const auto& o : index->objects()) {
      if (o.class_label) by_class[*o.class_label].insert(o.model_id);
    }
  }
  for (const auto& [query_id, entry] : truth) {
    if (entry.kind == GroundTruthEntry::Kind::kInstance) {
      if (index && !index->contains(entry.value)) {
        fail(ErrorCode::kInvalidArgument, "ground truth of '" + query_id +
                                              "' names unknown model '" + entry.value + "'");
      }
      resolved[query_id] = {entry.value};
      continue;
    }
    if (!index) {
      fail(ErrorCode::kInvalidArgument,
           "class ground truth for '" + query_id + "' requires an index");
    }
    auto it = by_class.find(entry.value);
    if (it == by_class.end()) {
      fail(ErrorCode::kInvalidArgument, "ground truth of '" + query_id +
                                            "' names unknown class '" + entry.value + "'");
    }
    resolved[query_id] = it->second;
  }
  return resolved;
}

double mean_ap_at_k(std::span<const QueryRanking> rankings, const ResolvedGroundTruth& truth,
                    int k) {
  if (rankings.empty()) fail(ErrorCode::kInvalidArgument, "no queries to evaluate");
  double sum = 0.0;
  for (const auto& q : rankings) {
    sum += average_precision_at_k(q.ranking, relevant_for(truth, q.query_id), k);
  }
  return sum / static_cast<double>(rankings.size());
}

QueryMetrics query_metrics(std::string query_id, std::span<const std::string> ranking,
                           const RelevantSet& relevant, std::span<const int> k_list,
                           const Table1Config& config) {
  if (relevant.empty()) {
    fail(ErrorCode::kInvalidArgument, "empty relevant set for query '" + query_id + "'");
  }
  check_ranking(ranking);

  QueryMetrics m;
  m.query_id = std::move(query_id);
  const std::size_t c = relevant.size();
  const double cd = static_cast<double>(c);
  const std::size_t n = ranking.size();
  m.relevant_count = c;

  // 1-based ranks of the relevant items that were retrieved at all.
  std::vector<std::size_t> ranks;
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking[i])) ranks.push_back(i + 1);
  }
  auto hits_within = [&](std::size_t cutoff) {
    return static_cast<double>(
        std::count_if(ranks.begin(), ranks.end(), [&](std::size_t r) { return r <= cutoff; }));
  };

  m.nn = (!ranks.empty() && ranks.front() == 1) ? 1.0 : 0.0;
  m.ft = hits_within(c) / cd;
  m.st = hits_within(2 * c) / cd;

  const std::size_t f_cut = std::min(static_cast<std::size_t>(config.f_cutoff), n);
  if (f_cut > 0) {
    const double hits = hits_within(f_cut);
    const double precision = hits / static_cast<double>(f_cut);
    const double recall = hits / cd;
    m.f = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }

  double dcg = 0.0;
  for (std::size_t r : ranks) dcg += 1.0 / std::log2(1.0 + static_cast<double>(r));
  double ideal = 0.0;
  for (std::size_t r = 1; r <= c; ++r) ideal += 1.0 / std::log2(1.0 + static_cast<double>(r));
  m.dcg = dcg / ideal;

  const double window = static_cast<double>(config.window_factor) * cd;
  const double penalty = config.anmrr_penalty * window;
  double rank_sum = 0.0;
  for (std::size_t r : ranks) {
    const double rd = static_cast<double>(r);
    rank_sum += rd <= window ? rd : penalty;
  }
  rank_sum += static_cast<double>(c - ranks.size()) * penalty;
  const double avr = rank_sum / cd;
  const double mrr = avr - 0.5 - cd / 2.0;
  m.nmrr = mrr / (penalty - 0.5 - cd / 2.0);

  for (int k : k_list) {
    if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
    m.ap_at_k[k] = ap_unchecked(ranking, relevant, k);
  }
  return m;
}

MetricReport evaluate_rankings(std::span<const QueryRanking> rankings,
                               const ResolvedGroundTruth& truth, std::span<const int> k_list,
                               const Table1Config& config) {
  if (rankings.empty()) fail(ErrorCode::kInvalidArgument, "no queries to evaluate");
  if (config.f_cutoff < 1 || config.window_factor < 1 || !(config.anmrr_penalty > 1.0)) {
    fail(ErrorCode::kInvalidArgument, "invalid metric cutoffs");
  }
  MetricReport report;
  report.config = config;
  report.num_queries = rankings.size();
  for (const auto& q : rankings) {
    if (!k_list.empty() && q.ranking.empty()) {
      fail(ErrorCode::kInvalidArgument, "empty ranking for query '" + q.query_id + "'");
    }
    report.per_query.push_back(
        query_metrics(q.query_id, q.ranking, relevant_for(truth, q.query_id), k_list, config));
  }
  const double n = static_cast<double>(rankings.size());
  for (const auto& m : report.per_query) {
    report.nn += m.nn;
    report.ft += m.ft;
    report.st += m.st;
    report.f += m.f;
    report.dcg += m.dcg;
    report.anmrr += m.nmrr;
    for (const auto& [k, ap] : m.ap_at_k) report.map_at_k[k] += ap;
  }
  report.nn /= n;
  report.ft /= n;
  report.st /= n;
  report.f /= n;
  report.dcg /= n;
  report.anmrr /= n;
  for (auto& [k, v] : report.map_at_k) v /= n;
  return report;
}

MetricReport table1_metrics(std::span<const QueryRanking> rankings,
                            const ResolvedGroundTruth& truth, const Table1Config& config) {
  return evaluate_rankings(rankings, truth, {}, config);
}

}  // namespace oscar
