#include <benchmark/benchmark.h>

#include "treetag/evaluator.hpp"
#include "treetag/learner.hpp"
#include "treetag/mcts.hpp"
#include "treetag/random.hpp"

namespace {

constexpr int kDim = 100;
constexpr int kTags = 23;

std::shared_ptr<const treetag::Sentence> sentence(int length) {
  treetag::Rng rng(7);
  std::vector<std::string> tokens;
  std::vector<treetag::Vector> vectors;
  for (int i = 0; i < length; ++i) {
    tokens.push_back("w");
    treetag::Vector v(kDim);
    for (int k = 0; k < kDim; ++k) v[k] = rng.uniform(-1.0, 1.0);
    vectors.push_back(v);
  }
  return treetag::make_sentence(tokens, vectors);
}

treetag::ActionSpace tag_space() {
  std::vector<std::string> tags;
  for (int i = 0; i < kTags; ++i) tags.push_back("T" + std::to_string(i));
  return treetag::ActionSpace(treetag::TagInventory(tags));
}

void BM_EncodeWords(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const auto params = treetag::init_params(1, {kDim, h, kTags});
  const auto s = sentence(13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(treetag::encode_words(s->embeddings, params.words));
  }
}
BENCHMARK(BM_EncodeWords)->Arg(32)->Arg(200);

void BM_TreeSearch(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int h = static_cast<int>(state.range(1));
  const auto params = treetag::init_params(1, {kDim, h, kTags});
  const auto s = sentence(13);
  const auto space = tag_space();
  for (auto _ : state) {
    treetag::SentenceEvaluator eval(params, s);
    benchmark::DoNotOptimize(treetag::tree_search(treetag::initial_state(s), space,
                                                  eval.value_fn(), eval.policy_fn(), {k, 0.25}));
  }
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_TreeSearch)->Args({64, 32})->Args({256, 64})->Args({4000, 200})->Unit(benchmark::kMillisecond);

void BM_Gradients(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const auto params = treetag::init_params(1, {kDim, h, kTags});
  const auto s = sentence(13);
  const auto space = tag_space();
  treetag::LabeledSentence ex{s, std::vector<int>(13, 0)};
  const auto episode = treetag::run_episode(ex, params, space, {8, 0.25});
  for (auto _ : state) {
    benchmark::DoNotOptimize(treetag::gradients(episode, params));
  }
}
BENCHMARK(BM_Gradients)->Arg(32)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
