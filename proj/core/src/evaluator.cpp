#include "treetag/evaluator.hpp"

#include "treetag/errors.hpp"

namespace treetag {

std::size_t SentenceEvaluator::PrefixHash::operator()(
    const std::vector<int>& tags) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (int t : tags) {
    h ^= static_cast<std::size_t>(t) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

SentenceEvaluator::SentenceEvaluator(const ModelParams& params,
                                     std::shared_ptr<const Sentence> sentence)
    : params_(&params), sentence_(std::move(sentence)) {
  if (!sentence_ || sentence_->size() == 0) throw InputError("sentence is empty");
  if (sentence_->embedding_dim() != params.words.input_dim()) {
    throw ConfigError("embedding dimension " + std::to_string(sentence_->embedding_dim()) +
                      " does not match model input dimension " +
                      std::to_string(params.words.input_dim()));
  }
  const Eigen::Index h = params.words.hidden_dim();
  const LstmTrace trace = lstm_unroll(sentence_->embeddings, params.words);
  word_states_.reserve(trace.steps.size());
  for (const LstmStep& step : trace.steps) {
    Vector hc(2 * h);
    hc.head(h) = step.h;
    hc.tail(h) = step.c;
    word_states_.push_back(std::move(hc));
  }
}

const SentenceEvaluator::Entry& SentenceEvaluator::entry(const std::vector<int>& tags) {
  if (auto it = cache_.find(tags); it != cache_.end()) return it->second;

  const Eigen::Index h = params_->words.hidden_dim();
  Entry e;
  if (tags.empty()) {
    e.h = Vector::Zero(h);
    e.c = Vector::Zero(h);
  } else {
    const std::vector<int> parent_tags(tags.begin(), tags.end() - 1);
    const Entry& parent = entry(parent_tags);
    const LstmStep step = lstm_cell_forward(one_hot(tags.back(), params_->tags.input_dim()),
                                            parent.h, parent.c, params_->tags);
    e.h = step.h;
    e.c = step.c;
  }
  if (tags.size() > sentence_->size()) throw ContractViolation("tag prefix longer than sentence");
  const std::size_t words = std::min(tags.size() + 1, sentence_->size());
  e.repr.resize(4 * h);
  e.repr.head(2 * h) = word_states_[words - 1];
  e.repr.segment(2 * h, h) = e.h;
  e.repr.tail(h) = e.c;
  return cache_.emplace(tags, std::move(e)).first->second;
}

const Vector& SentenceEvaluator::repr(const State& s) {
  if (s.sentence_ptr() != sentence_) {
    throw ContractViolation("state belongs to a different sentence");
  }
  return entry(s.tags()).repr;
}

double SentenceEvaluator::value(const State& s) {
  return value_from_repr(repr(s), *params_);
}

std::vector<double> SentenceEvaluator::policy(const State& s,
                                              std::span<const int> actions) {
  return policy_from_repr(repr(s), actions, *params_);
}

ValueFn SentenceEvaluator::value_fn() {
  return [this](const State& s) { return value(s); };
}

PolicyFn SentenceEvaluator::policy_fn() {
  return [this](const State& s, std::span<const int> actions) {
    return policy(s, actions);
  };
}

}  // namespace treetag
