#include "doctest.h"
#include "support/fixtures.hpp"
#include "treetag/errors.hpp"
#include "treetag/evaluator.hpp"

TEST_CASE("evaluator is bit-identical to the direct forward pass") {
  treetag::ActionSpace space(fixtures::plain_tags(3));
  auto sentence = fixtures::random_sentence(4, 5, 12);
  const auto params = treetag::init_params(3, {5, 4, 3});
  treetag::SentenceEvaluator eval(params, sentence);

  std::vector<treetag::State> frontier{treetag::initial_state(sentence)};
  std::size_t states = 0;
  while (!frontier.empty()) {
    std::vector<treetag::State> next;
    for (const auto& s : frontier) {
      ++states;
      CHECK(eval.repr(s) == treetag::state_repr(s, params));
      CHECK(eval.value(s) == treetag::value(s, params));
      if (s.is_terminal()) continue;
      const auto actions = space.actions(s);
      CHECK(eval.policy(s, actions) == treetag::policy(s, actions, params));
      for (int a : actions) next.push_back(treetag::transition(s, a, space));
    }
    frontier = std::move(next);
  }
  CHECK(eval.cache_size() == states);
}

TEST_CASE("evaluator guards its inputs") {
  const auto params = treetag::init_params(3, {5, 4, 3});
  auto sentence = fixtures::random_sentence(3, 5, 1);
  treetag::SentenceEvaluator eval(params, sentence);
  auto other = fixtures::random_sentence(3, 5, 1);
  CHECK_THROWS_AS(eval.value(treetag::initial_state(other)), treetag::ContractViolation);
  CHECK_THROWS_AS(treetag::SentenceEvaluator(params, fixtures::random_sentence(3, 4, 1)),
                  treetag::ConfigError);
}
