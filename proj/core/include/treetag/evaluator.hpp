#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "treetag/mcts.hpp"
#include "treetag/model.hpp"

namespace treetag {

// Network value and policy for every state of one sentence, with the word
// LSTM run once and tag-prefix encodings memoized so each new search node
// costs a single tag-LSTM step. Results are bit-identical to value() and
// policy(). Not thread-safe; use one instance per sentence being searched.
class SentenceEvaluator {
 public:
  SentenceEvaluator(const ModelParams& params, std::shared_ptr<const Sentence> sentence);

  const Vector& repr(const State& s);
  double value(const State& s);
  std::vector<double> policy(const State& s, std::span<const int> actions);

  ValueFn value_fn();
  PolicyFn policy_fn();

  std::size_t cache_size() const { return cache_.size(); }

 private:
  struct PrefixHash {
    std::size_t operator()(const std::vector<int>& tags) const noexcept;
  };
  struct Entry {
    Vector h, c;  // tag LSTM state after the prefix
    Vector repr;  // g(s) for the state owning this prefix
  };

  const Entry& entry(const std::vector<int>& tags);

  const ModelParams* params_;
  std::shared_ptr<const Sentence> sentence_;
  std::vector<Vector> word_states_;  // [h_k; c_k] for k = 1..M
  std::unordered_map<std::vector<int>, Entry, PrefixHash> cache_;
};

}  // namespace treetag
