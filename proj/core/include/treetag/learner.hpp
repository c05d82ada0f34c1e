#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "treetag/mcts.hpp"
#include "treetag/model.hpp"

namespace treetag {

struct TrainConfig {
  int simulations = 4000;  // K
  double eta = 0.001;
  double lambda = 0.25;
  int hidden = 200;
  int epochs = 50;
  std::uint64_t seed = 1;
  bool bio_constraint = false;
  double clip_norm = 0.0;  // 0 disables clipping
  InitScheme init = InitScheme::kUnit;
  bool reuse_subtree = false;
  // Early stop once mean training reward has not improved by min_improvement
  // for `patience` consecutive epochs. patience = 0 disables it.
  int patience = 5;
  double min_improvement = 1e-4;

  SearchConfig search() const { return SearchConfig{simulations, lambda}; }
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double mean_reward = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::vector<std::filesystem::path> checkpoints;
  int best_epoch = 0;  // 0 = the initial parameters
  bool early_stopped = false;
};

// One JSON object per line: {"epoch":..,"mean_loss":..,"mean_reward":..,"seconds":..}
void write_report_line(std::ostream& out, const EpochRecord& record);

struct TrainOptions {
  // When set, the latest parameters are written here after every epoch, the
  // best-by-training-reward ones to "<path>.best", and a diagnostic snapshot
  // to "<path>.diag" if training hits a non-finite loss.
  std::optional<std::filesystem::path> checkpoint;
  std::ostream* log = nullptr;  // per-epoch report lines
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  ModelParams params;       // after the last completed epoch
  ModelParams best_params;  // highest mean training reward
  TrainReport report;
};

// One left-to-right tagging pass with a search at each position. The tag
// with the highest search probability is applied (lowest index on ties).
Episode run_episode(const LabeledSentence& example, const ModelParams& params,
                    const ActionSpace& space, const SearchConfig& search,
                    bool reuse_subtree = false);

// Per-sentence AdaGrad updates over a seeded shuffle of the data each epoch.
TrainResult train(const std::vector<LabeledSentence>& dataset, const ActionSpace& space,
                  const TrainConfig& config, const TrainOptions& options = {});

// Search-based inference; needs no labels.
std::vector<int> tag_sentence(std::shared_ptr<const Sentence> sentence,
                              const ModelParams& params, const ActionSpace& space,
                              const SearchConfig& search, bool reuse_subtree = false);

// Argmax of the raw policy at each position, no search.
std::vector<int> greedy_tag(std::shared_ptr<const Sentence> sentence,
                            const ModelParams& params, const ActionSpace& space);

enum class Decoder { kSearch, kGreedy };

// Tags many sentences, optionally on several threads; the result does not
// depend on the thread count.
std::vector<std::vector<int>> tag_corpus(
    const std::vector<std::shared_ptr<const Sentence>>& sentences, const ModelParams& params,
    const ActionSpace& space, const SearchConfig& search, Decoder decoder, int jobs = 1,
    bool reuse_subtree = false);

}  // namespace treetag
