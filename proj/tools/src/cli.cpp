#include "oscar/cli/cli.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <sstream>

#include "common.hpp"
#include "oscar/error.hpp"
#include "oscar/geometry.hpp"

namespace oscar::cli {
namespace {

void add_provider_flags(CLI::App& cmd, ProviderOptions& p) {
  cmd.add_option("--provider", p.kind, "Embedding provider")
      ->check(CLI::IsMember({"file", "remote"}))
      ->capture_default_str();
  cmd.add_option("--endpoint", p.endpoint, "Sidecar base URL for --provider remote")
      ->envname("OSCAR_ENDPOINT");
  cmd.add_option("--cache", p.cache_dir, "Directory holding embeddings.jsonl for --provider file");
  cmd.add_option("--timeout-ms", p.timeout_ms, "Sidecar request timeout")->capture_default_str();
  cmd.add_option("--max-in-flight", p.max_in_flight, "Concurrent sidecar requests")
      ->capture_default_str();
}

void add_retrieval_flags(CLI::App& cmd, RetrievalConfig& config, std::string& stage) {
  cmd.add_option("--tau", config.tau_text, "Text similarity threshold")->capture_default_str();
  cmd.add_option("--fallback-k", config.fallback_k, "Text candidates kept when none passes --tau")
      ->capture_default_str();
  cmd.add_option("--stage", stage, "Ranking stage")
      ->check(CLI::IsMember({"text", "image", "two-stage"}))
      ->capture_default_str();
}

int viewpoints(int count, const std::vector<double>& elevations, double radius, std::ostream& out) {
  json poses = json::array();
  const auto generated = generate_viewpoints(count, elevations, radius);
  for (std::size_t i = 0; i < generated.size(); ++i) {
    json p = to_json(generated[i]);
    p["view_id"] = i;
    p["position"] = pose_to_camera_position(generated[i]);
    poses.push_back(std::move(p));
  }
  out << poses.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view object retrieval: onboarding, two-stage search and evaluation", "oscar"};
  app.require_subcommand(1);

  OnboardOptions onboard;
  auto* c_onboard = app.add_subcommand("onboard", "Verify, fill in and commit objects listed in a models manifest");
  c_onboard->add_option("--index", onboard.index_dir, "Index directory")->required();
  c_onboard->add_option("--models", onboard.models_manifest, "Models manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_onboard->add_option("--prompt-type", onboard.prompt_type, "Caption prompt (blind, comma, caption, attributes)");
  c_onboard->add_option("--render-jobs", onboard.render_jobs, "Where missing renders are listed");
  add_provider_flags(*c_onboard, onboard.provider);

  RetrieveOptions retrieve;
  std::string retrieve_stage = "two-stage";
  auto* c_retrieve = app.add_subcommand("retrieve", "Rank the index for every query in a file");
  c_retrieve->add_option("--index", retrieve.index_dir, "Index directory")->required();
  c_retrieve->add_option("--queries", retrieve.queries, "Queries, JSON or JSON lines")
      ->required()
      ->check(CLI::ExistingFile);
  c_retrieve->add_option("--out", retrieve.out, "Results file (JSON lines)")->required();
  c_retrieve->add_option("--threads", retrieve.threads, "Worker threads")->capture_default_str();
  add_provider_flags(*c_retrieve, retrieve.provider);
  add_retrieval_flags(*c_retrieve, retrieve.config, retrieve_stage);

  EvaluateOptions evaluate;
  std::string evaluate_index;
  auto* c_evaluate = app.add_subcommand("evaluate", "Score a results file against ground truth");
  c_evaluate->add_option("--results", evaluate.results, "Results from retrieve")
      ->required()
      ->check(CLI::ExistingFile);
  c_evaluate->add_option("--ground-truth", evaluate.ground_truth, "Ground truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_evaluate->add_option("--index", evaluate_index, "Index, needed for class ground truth");
  c_evaluate->add_option("--k-list", evaluate.k_list, "Cutoffs for mAP@k")
      ->delimiter(',')
      ->capture_default_str();
  c_evaluate->add_option("--metrics", evaluate.metrics, "Criteria to report")
      ->delimiter(',')
      ->capture_default_str();
  c_evaluate->add_option("--out", evaluate.out, "Report JSON");

  SweepOptions sweep;
  std::string sweep_stage = "two-stage";
  std::vector<double> sweep_range;
  auto* c_sweep = app.add_subcommand("sweep", "Average precision over a grid of tau or fallback k");
  c_sweep->add_option("--index", sweep.index_dir, "Index directory")->required();
  c_sweep->add_option("--queries", sweep.queries, "Queries")->required()->check(CLI::ExistingFile);
  c_sweep->add_option("--ground-truth", sweep.ground_truth, "Ground truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_sweep->add_option("--out", sweep.out, "CSV output")->required();
  c_sweep->add_option("--param", sweep.parameter, "Swept parameter")
      ->check(CLI::IsMember({"tau", "k"}))
      ->capture_default_str();
  auto* values_opt = c_sweep->add_option("--values", sweep.values, "Explicit grid")->delimiter(',');
  c_sweep->add_option("--range", sweep_range, "from,to,step")->delimiter(',')->expected(3)->excludes(values_opt);
  c_sweep->add_option("--ap-k", sweep.ap_k, "Cutoff of the reported average precision")
      ->capture_default_str();
  add_provider_flags(*c_sweep, sweep.provider);
  add_retrieval_flags(*c_sweep, sweep.config, sweep_stage);

  InspectOptions inspect;
  auto* c_inspect = app.add_subcommand("inspect", "Summarize an index and its incomplete objects");
  c_inspect->add_option("--index", inspect.index_dir, "Index directory")->required();
  c_inspect->add_option("--model", inspect.model_id, "Show one object");
  c_inspect->add_flag("--json", inspect.as_json, "Machine-readable output");

  int vp_count = kDefaultViewCount;
  std::vector<double> vp_elevations(kDefaultElevationsDeg.begin(), kDefaultElevationsDeg.end());
  double vp_radius = kDefaultRadius;
  auto* c_viewpoints = app.add_subcommand("viewpoints", "Print the camera poses used for rendering");
  c_viewpoints->add_option("--count", vp_count, "Number of views")->capture_default_str();
  c_viewpoints->add_option("--elevations", vp_elevations, "Ring elevations in degrees")
      ->delimiter(',')
      ->capture_default_str();
  c_viewpoints->add_option("--radius", vp_radius, "Camera distance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_onboard->parsed()) return cmd_onboard(onboard, out, err);
    if (c_retrieve->parsed()) {
      retrieve.stage = parse_stage(retrieve_stage);
      return cmd_retrieve(retrieve, out, err);
    }
    if (c_evaluate->parsed()) {
      if (!evaluate_index.empty()) evaluate.index_dir = evaluate_index;
      return cmd_evaluate(evaluate, out, err);
    }
    if (c_sweep->parsed()) {
      sweep.stage = parse_stage(sweep_stage);
      if (!sweep_range.empty()) sweep.values = value_range(sweep_range[0], sweep_range[1], sweep_range[2]);
      return cmd_sweep(sweep, out, err);
    }
    if (c_inspect->parsed()) return cmd_inspect(inspect, out, err);
    if (c_viewpoints->parsed()) return viewpoints(vp_count, vp_elevations, vp_radius, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace oscar::cli
