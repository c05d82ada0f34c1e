#include "treetag/learner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "treetag/checkpoint.hpp"
#include "treetag/errors.hpp"
#include "treetag/evaluator.hpp"
#include "treetag/random.hpp"

namespace treetag {

void TrainConfig::validate() const {
  if (simulations < 2) throw ConfigError("K must be at least 2");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (hidden < 1) throw ConfigError("hidden size must be at least 1");
  if (epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (clip_norm < 0.0) throw ConfigError("clip norm must be nonnegative");
  if (patience < 0) throw ConfigError("patience must be nonnegative");
}

void write_report_line(std::ostream& out, const EpochRecord& r) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17) << "{\"epoch\":" << r.epoch << ",\"mean_loss\":" << r.mean_loss
      << ",\"mean_reward\":" << r.mean_reward << ",\"seconds\":" << std::setprecision(6)
      << r.seconds << "}\n";
  out.flags(flags);
  out.precision(prec);
}

namespace {

// Shared decode loop. When `record` is set, each (state, pi) is appended.
std::vector<int> search_decode(const std::shared_ptr<const Sentence>& sentence,
                               const ModelParams& params, const ActionSpace& space,
                               const SearchConfig& search, bool reuse_subtree,
                               Episode* record) {
  SentenceEvaluator evaluator(params, sentence);
  State s = initial_state(sentence);
  std::vector<int> predicted;
  predicted.reserve(sentence->size());

  std::optional<SearchTree> tree;
  while (!s.is_terminal()) {
    if (!tree || !reuse_subtree) {
      tree.emplace(s, space, evaluator.value_fn(), evaluator.policy_fn());
    }
    tree->run(search);
    const SearchPolicy pi = tree->policy();
    const int action = pi.actions[pi.argmax()];
    if (record != nullptr) record->steps.push_back(EpisodeStep{s, pi.actions, pi.probs});
    predicted.push_back(action);
    State next = transition(s, action, space);
    if (reuse_subtree && !next.is_terminal()) tree->advance(action);
    s = std::move(next);
  }
  return predicted;
}

void check_dims(const Sentence& sentence, const ModelParams& params) {
  if (sentence.embedding_dim() != params.words.input_dim()) {
    throw ConfigError("sentence embeddings have dimension " +
                      std::to_string(sentence.embedding_dim()) + " but the model expects " +
                      std::to_string(params.words.input_dim()));
  }
}

}  // namespace

Episode run_episode(const LabeledSentence& example, const ModelParams& params,
                    const ActionSpace& space, const SearchConfig& search,
                    bool reuse_subtree) {
  if (!example.sentence || example.gold.size() != example.sentence->size()) {
    throw InputError("gold tags do not align with the sentence");
  }
  Episode episode;
  episode.predicted =
      search_decode(example.sentence, params, space, search, reuse_subtree, &episode);
  episode.reward = accuracy(example.gold, episode.predicted);
  return episode;
}

std::vector<int> tag_sentence(std::shared_ptr<const Sentence> sentence,
                              const ModelParams& params, const ActionSpace& space,
                              const SearchConfig& search, bool reuse_subtree) {
  if (!sentence) throw InputError("null sentence");
  check_dims(*sentence, params);
  return search_decode(sentence, params, space, search, reuse_subtree, nullptr);
}

std::vector<int> greedy_tag(std::shared_ptr<const Sentence> sentence,
                            const ModelParams& params, const ActionSpace& space) {
  if (!sentence) throw InputError("null sentence");
  check_dims(*sentence, params);
  SentenceEvaluator evaluator(params, sentence);
  State s = initial_state(sentence);
  std::vector<int> predicted;
  while (!s.is_terminal()) {
    const std::vector<int> actions = space.actions(s);
    const std::vector<double> p = evaluator.policy(s, actions);
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p[k] > p[best]) best = k;
    }
    predicted.push_back(actions[best]);
    s = transition(s, actions[best], space);
  }
  return predicted;
}

TrainResult train(const std::vector<LabeledSentence>& dataset, const ActionSpace& space,
                  const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (dataset.empty()) throw InputError("training set is empty");
  const ModelDims dims{static_cast<int>(dataset.front().sentence->embedding_dim()),
                       config.hidden, space.num_tags()};
  for (const LabeledSentence& ex : dataset) {
    if (ex.sentence->embedding_dim() != dims.embedding_dim) {
      throw ConfigError("training sentences disagree on embedding dimension");
    }
  }

  TrainResult result{init_params(config.seed, dims, config.init), {}, {}};
  result.best_params = result.params;
  AdaGradState opt(dims);
  Rng order_rng(config.seed ^ 0x5DEECE66DULL);

  auto snapshot = [&](const ModelParams& params) {
    return Checkpoint{dims, config.seed, space.inventory().tags(), params};
  };
  auto with_suffix = [](std::filesystem::path p, const char* suffix) {
    p += suffix;
    return p;
  };

  std::vector<std::size_t> order(dataset.size());
  double best_reward = -1.0;
  double plateau_reference = -1.0;
  int stale = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    order_rng.shuffle(order);

    double loss_sum = 0.0, reward_sum = 0.0;
    for (std::size_t idx : order) {
      // Search runs against a frozen copy; the update happens afterwards.
      const Episode episode = run_episode(dataset[idx], result.params, space,
                                          config.search(), config.reuse_subtree);
      LossAndGradients lg;
      try {
        lg = loss_and_gradients(episode, result.params);
        if (!std::isfinite(lg.loss)) throw NumericError("non-finite loss");
      } catch (const NumericError& e) {
        if (options.checkpoint) {
          save_checkpoint(with_suffix(*options.checkpoint, ".diag"), snapshot(result.params));
        }
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", sentence " + std::to_string(idx + 1) + ")");
      }
      if (config.clip_norm > 0.0) lg.gradients.clip_norm(config.clip_norm);
      adagrad_step(result.params, lg.gradients, opt, config.eta);
      loss_sum += lg.loss;
      reward_sum += episode.reward;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.mean_loss = loss_sum / static_cast<double>(dataset.size());
    record.mean_reward = reward_sum / static_cast<double>(dataset.size());
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report.epochs.push_back(record);

    if (record.mean_reward > best_reward) {
      best_reward = record.mean_reward;
      result.best_params = result.params;
      result.report.best_epoch = epoch;
    }
    if (options.checkpoint) {
      save_checkpoint(*options.checkpoint, snapshot(result.params));
      const auto best_path = with_suffix(*options.checkpoint, ".best");
      if (result.report.best_epoch == epoch) save_checkpoint(best_path, snapshot(result.params));
      if (epoch == 1) {
        result.report.checkpoints = {*options.checkpoint, best_path};
      }
    }
    if (options.log != nullptr) write_report_line(*options.log, record);
    if (options.on_epoch) options.on_epoch(record);

    if (record.mean_reward > plateau_reference + config.min_improvement) {
      plateau_reference = record.mean_reward;
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      result.report.early_stopped = true;
      break;
    }
  }
  return result;
}

std::vector<std::vector<int>> tag_corpus(
    const std::vector<std::shared_ptr<const Sentence>>& sentences, const ModelParams& params,
    const ActionSpace& space, const SearchConfig& search, Decoder decoder, int jobs,
    bool reuse_subtree) {
  std::vector<std::vector<int>> out(sentences.size());
  auto work = [&](std::size_t i) {
    out[i] = decoder == Decoder::kGreedy
                 ? greedy_tag(sentences[i], params, space)
                 : tag_sentence(sentences[i], params, space, search, reuse_subtree);
  };
  if (jobs <= 1 || sentences.size() < 2) {
    for (std::size_t i = 0; i < sentences.size(); ++i) work(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), sentences.size());
    for (std::size_t w = 0; w < n; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < sentences.size(); i = next++) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace treetag
