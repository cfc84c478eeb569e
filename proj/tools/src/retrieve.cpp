#include <atomic>
#include <ostream>
#include <thread>

#include "common.hpp"
#include "oscar/error.hpp"
#include "oscar/index_io.hpp"

namespace oscar::cli {
namespace {

ResultRecord run_query(const ObjectIndex& index, const json& raw, std::size_t line,
                       LazyProvider& provider, const std::filesystem::path& base_dir,
                       const RetrieveOptions& options) {
  ResultRecord record;
  record.query_id = raw.is_object() ? raw.value("query_id", std::string()) : std::string();
  if (record.query_id.empty()) record.query_id = "#" + std::to_string(line);
  try {
    const Query query = resolve_query(query_spec_from_json(raw), provider, base_dir);
    FullRanking ranking = rank_all(index, query, options.config, options.stage);
    record.winner = ranking.entries.empty() ? std::string() : ranking.entries.front().model_id;
    record.ranking = std::move(ranking.entries);
    if (options.stage == Stage::kTwoStage) record.candidate_set = std::move(ranking.candidate_set);
    record.timings = ranking.timings;
  } catch (const Error& e) {
    record.error_code = std::string(to_string(e.code()));
    record.error_message = e.what();
  }
  return record;
}

}  // namespace

int cmd_retrieve(const RetrieveOptions& options, std::ostream& out, std::ostream& err) {
  validate(options.config);
  if (options.threads < 1) fail(ErrorCode::kInvalidArgument, "--threads must be >= 1");
  const ObjectIndex index = load_index(options.index_dir);
  const auto raw = read_json_records(options.queries);
  LazyProvider provider(options.provider, dims_of(index));
  const auto base_dir = options.queries.parent_path();

  // The provider is created up front when any query needs it, so workers
  // only read it.
  for (const auto& r : raw) {
    if (r.is_object() && (!r.contains("q_clip") || !r.contains("q_dino"))) {
      try {
        provider.get();
      } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
      }
      break;
    }
  }

  std::vector<ResultRecord> results(raw.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < raw.size(); i = next++) {
      results[i] = run_query(index, raw[i], i + 1, provider, base_dir, options);
    }
  };
  const int workers = std::min<int>(options.threads, std::max<std::size_t>(raw.size(), 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const json config = {{"command", "retrieve"},
                       {"index", options.index_dir.string()},
                       {"queries", options.queries.string()},
                       {"provider", to_json(options.provider)},
                       {"retrieval", oscar::to_json(options.config)},
                       {"stage", to_string(options.stage)}};
  const json stamp = run_stamp(config, index.manifest_version());
  std::string text;
  std::size_t failed = 0;
  double text_ms = 0.0, image_ms = 0.0;
  for (const auto& r : results) {
    text += result_record_to_json(r, stamp).dump() + "\n";
    if (r.error_code) {
      ++failed;
      err << "query " << r.query_id << ": " << *r.error_code << ": " << r.error_message.value_or("")
          << '\n';
    }
    text_ms += r.timings.text_filter_ms;
    image_ms += r.timings.image_refine_ms;
  }
  write_file_atomic(options.out, text);

  const std::size_t ok = results.size() - failed;
  out << results.size() << " queries, " << ok << " ok, " << failed << " failed; mean text filter "
      << format_number(ok ? text_ms / ok : 0.0, 4) << " ms, mean image refine "
      << format_number(ok ? image_ms / ok : 0.0, 4) << " ms\n";
  return failed == 0 ? kExitOk : kExitPartial;
}

}  // namespace oscar::cli
