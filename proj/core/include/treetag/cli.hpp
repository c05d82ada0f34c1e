#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "treetag/corpus.hpp"
#include "treetag/learner.hpp"

namespace treetag {

enum class Command { kTrain, kTag, kEval };

struct RunConfig {
  Command command = Command::kTrain;
  std::string profile = "full";

  std::filesystem::path train_file;
  std::filesystem::path test_file;
  std::filesystem::path embeddings;
  std::filesystem::path checkpoint;
  std::filesystem::path predictions;  // eval input
  std::filesystem::path out;          // predictions (tag), held-out split (train), metrics (eval)

  TrainConfig train;
  int embedding_dim = 0;  // 0: infer from the embeddings file
  Decoder decoder = Decoder::kSearch;
  int jobs = 1;

  // subset_size = 0 trains on the whole training file.
  int subset_size = 0;
  int subset_train = 900;
  int max_len = 13;

  bool quiet = false;
};

// Known profiles: "full" (K=4000, h=200) and "desk" (K=64, h=32). Both use
// eta=0.001 and lambda=0.25. Throws ConfigError for other names.
void apply_profile(RunConfig& config, const std::string& name);

// JSON text holding every field; parsing accepts any subset and keeps
// defaults for the rest.
std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);
void save_run_config(const std::filesystem::path& path, const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

// Each command returns 0 iff its artifact was fully written. Diagnostics go
// to `log` (standard error in the binary), data to files or `out`.
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_tag(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& log);

int run_command(const RunConfig& config, std::ostream& out, std::ostream& log);

// "precision=95.75 recall=95.47 f1=94.82 accuracy=95.77" (percentages).
std::string metrics_record(const EvalResult& result);

}  // namespace treetag
