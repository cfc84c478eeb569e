#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oscar/evaluation.hpp"
#include "oscar/providers.hpp"
#include "oscar/retrieval.hpp"

namespace oscar::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

struct ProviderOptions {
  std::string kind = "file";  // file | remote
  std::optional<std::string> endpoint;
  std::filesystem::path cache_dir;
  int timeout_ms = 30000;
  int max_in_flight = 4;
};

struct OnboardOptions {
  std::filesystem::path index_dir;
  std::filesystem::path models_manifest;
  ProviderOptions provider;
  std::optional<std::string> prompt_type;
  std::filesystem::path render_jobs;  // empty: <index>/render_jobs.jsonl
};

struct RetrieveOptions {
  std::filesystem::path index_dir;
  std::filesystem::path queries;
  std::filesystem::path out;
  ProviderOptions provider;
  RetrievalConfig config;
  Stage stage = Stage::kTwoStage;
  int threads = 1;
};

struct EvaluateOptions {
  std::filesystem::path results;
  std::filesystem::path ground_truth;
  std::optional<std::filesystem::path> index_dir;  // needed for class ground truth
  std::vector<int> k_list{1, 3, 5, 10};
  std::vector<std::string> metrics{"NN", "FT", "ST", "F", "DCG", "ANMRR"};
  std::filesystem::path out;
};

struct SweepOptions {
  std::filesystem::path index_dir;
  std::filesystem::path queries;
  std::filesystem::path ground_truth;
  std::filesystem::path out;
  ProviderOptions provider;
  std::string parameter = "tau";  // tau | k
  std::vector<double> values;     // empty: the default grid of the parameter
  RetrievalConfig config;
  Stage stage = Stage::kTwoStage;
  int ap_k = 1;
};

struct InspectOptions {
  std::filesystem::path index_dir;
  std::optional<std::string> model_id;
  bool as_json = false;
};

int cmd_onboard(const OnboardOptions& options, std::ostream& out, std::ostream& err);
int cmd_retrieve(const RetrieveOptions& options, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);
int cmd_inspect(const InspectOptions& options, std::ostream& out, std::ostream& err);

/// Values from..to inclusive in `step` increments. Errors: step <= 0 or
/// from > to -> invalid-argument.
std::vector<double> value_range(double from, double to, double step);

// Default sweep grids.
std::vector<double> default_tau_grid();
std::vector<double> default_k_grid();

/// Parses argv and dispatches; every oscar::Error is reported on `err` and
/// turned into an exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oscar::cli
