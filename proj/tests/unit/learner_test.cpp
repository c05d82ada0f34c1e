#include <set>
#include <sstream>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "treetag/checkpoint.hpp"
#include "treetag/errors.hpp"
#include "treetag/learner.hpp"

namespace {

treetag::TrainConfig small_config() {
  treetag::TrainConfig c;
  c.simulations = 8;
  c.hidden = 4;
  c.epochs = 2;
  c.seed = 5;
  return c;
}

std::vector<treetag::LabeledSentence> tiny_dataset() {
  const auto& toy = fixtures::toy_corpus();
  return {toy.train.begin(), toy.train.begin() + 4};
}

}  // namespace

TEST_CASE("run_episode") {
  const auto& toy = fixtures::toy_corpus();
  treetag::ActionSpace space(toy.inventory);
  const auto params = treetag::init_params(1, {16, 4, space.num_tags()});

  SUBCASE("one-token sentence") {
    auto s = treetag::make_sentence({"x"}, {toy.embeddings.lookup("the")});
    const auto e = treetag::run_episode({s, {0}}, params, space, {8, 0.25});
    CHECK(e.steps.size() == 1);
    CHECK((e.reward == 0.0 || e.reward == 1.0));
  }
  SUBCASE("states walk t = 1..M") {
    const auto& ex = toy.train[0];
    const auto e = treetag::run_episode(ex, params, space, {8, 0.25});
    REQUIRE(e.steps.size() == ex.gold.size());
    for (std::size_t t = 0; t < e.steps.size(); ++t) {
      CHECK(e.steps[t].state.position() == static_cast<int>(t) + 1);
      CHECK(e.steps[t].state.tags().size() == t);
      CHECK(e.steps[t].actions.size() == static_cast<std::size_t>(space.num_tags()));
    }
    CHECK(e.reward == treetag::accuracy(ex.gold, e.predicted));
  }
  SUBCASE("gold tags must align") {
    const auto& ex = toy.train[0];
    CHECK_THROWS_AS(treetag::run_episode({ex.sentence, {0}}, params, space, {8, 0.25}),
                    treetag::InputError);
  }
}

TEST_CASE("training") {
  treetag::ActionSpace space(fixtures::toy_corpus().inventory);
  const auto data = tiny_dataset();

  SUBCASE("zero epochs returns the initial params") {
    auto c = small_config();
    c.epochs = 0;
    const auto r = treetag::train(data, space, c);
    CHECK(r.params == treetag::init_params(c.seed, {16, 4, space.num_tags()}, c.init));
    CHECK(r.report.epochs.empty());
  }
  SUBCASE("report has one record per epoch and runs repeat exactly") {
    std::ostringstream log;
    treetag::TrainOptions opts;
    opts.log = &log;
    int seen = 0;
    opts.on_epoch = [&](const treetag::EpochRecord&) { ++seen; };
    const auto a = treetag::train(data, space, small_config(), opts);
    const auto b = treetag::train(data, space, small_config());
    CHECK(a.report.epochs.size() == 2);
    CHECK(seen == 2);
    CHECK(a.params == b.params);
    CHECK(a.best_params == b.best_params);
    std::istringstream lines(log.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
      CHECK(line.rfind("{\"epoch\":", 0) == 0);
      ++n;
    }
    CHECK(n == 2);
  }
  SUBCASE("checkpoints are written") {
    const auto dir = fixtures::scratch_dir("learner");
    treetag::TrainOptions opts;
    opts.checkpoint = dir / "m.ckpt";
    const auto r = treetag::train(data, space, small_config(), opts);
    CHECK(std::filesystem::exists(dir / "m.ckpt"));
    CHECK(std::filesystem::exists(dir / "m.ckpt.best"));
    CHECK(treetag::load_checkpoint(dir / "m.ckpt").params == r.params);
  }
  SUBCASE("bad configs are rejected") {
    auto c = small_config();
    c.simulations = 1;
    CHECK_THROWS_AS(treetag::train(data, space, c), treetag::ConfigError);
    CHECK_THROWS_AS(treetag::train({}, space, small_config()), treetag::InputError);
  }
  SUBCASE("early stop") {
    auto c = small_config();
    c.epochs = 50;
    c.patience = 1;
    c.min_improvement = 1.0;  // nothing can improve by a whole unit
    const auto r = treetag::train(data, space, c);
    CHECK(r.report.early_stopped);
    CHECK(r.report.epochs.size() == 2);
  }
}

TEST_CASE("decoders") {
  const auto& toy = fixtures::toy_corpus();
  treetag::ActionSpace space(toy.inventory);
  const auto params = treetag::init_params(2, {16, 4, space.num_tags()});
  const auto& s = toy.heldout[1].sentence;

  const auto tags = treetag::tag_sentence(s, params, space, {16, 0.25});
  CHECK(tags.size() == s->size());
  for (int t : tags) CHECK((t >= 0 && t < space.num_tags()));
  CHECK(treetag::tag_sentence(s, params, space, {16, 0.25}) == tags);

  treetag::ModelParams flat = params;
  flat.policy_u.setZero();
  for (int t : treetag::greedy_tag(s, flat, space)) CHECK(t == 0);

  treetag::ActionSpace single(fixtures::plain_tags(1));
  const auto one = treetag::init_params(2, {16, 4, 1});
  for (int t : treetag::greedy_tag(s, one, single)) CHECK(t == 0);

  const auto wrong = treetag::init_params(2, {8, 4, space.num_tags()});
  CHECK_THROWS_AS(treetag::tag_sentence(s, wrong, space, {16, 0.25}), treetag::ConfigError);
  CHECK_THROWS_AS(treetag::greedy_tag(s, wrong, space), treetag::ConfigError);
}

// V = 0.9 while the prefix agrees with the target, 0.1 after any mistake.
TEST_CASE("search follows a rigged value function to the target") {
  treetag::ActionSpace space(fixtures::plain_tags(3));
  auto sentence = fixtures::random_sentence(3, 2, 4);
  const std::vector<int> target{2, 0, 1};
  treetag::ValueFn rigged = [&](const treetag::State& s) {
    const auto& tags = s.tags();
    for (std::size_t i = 0; i < tags.size(); ++i)
      if (tags[i] != target[i]) return 0.1;
    return 0.9;
  };
  treetag::PolicyFn uniform = [](const treetag::State&, std::span<const int> a) {
    return std::vector<double>(a.size(), 1.0 / static_cast<double>(a.size()));
  };
  treetag::State s = treetag::initial_state(sentence);
  std::vector<int> out;
  while (!s.is_terminal()) {
    const auto pi = treetag::tree_search(s, space, rigged, uniform, {200, 0.25});
    out.push_back(pi.actions[pi.argmax()]);
    s = treetag::transition(s, out.back(), space);
  }
  CHECK(out == target);
  CHECK(treetag::accuracy(target, out) == 1.0);
}

TEST_CASE("tag_corpus does not depend on the thread count") {
  const auto& toy = fixtures::toy_corpus();
  treetag::ActionSpace space(toy.inventory);
  const auto params = treetag::init_params(9, {16, 4, space.num_tags()});
  std::vector<std::shared_ptr<const treetag::Sentence>> sentences;
  for (const auto& ex : toy.heldout) sentences.push_back(ex.sentence);
  const auto one = treetag::tag_corpus(sentences, params, space, {16, 0.25},
                                       treetag::Decoder::kSearch, 1);
  const auto three = treetag::tag_corpus(sentences, params, space, {16, 0.25},
                                         treetag::Decoder::kSearch, 3);
  CHECK(one == three);
  const auto greedy = treetag::tag_corpus(sentences, params, space, {16, 0.25},
                                          treetag::Decoder::kGreedy, 2);
  for (std::size_t i = 0; i < sentences.size(); ++i)
    CHECK(greedy[i] == treetag::greedy_tag(sentences[i], params, space));
}

TEST_CASE("tag_sentence on the rigged model") {
  treetag::ActionSpace space(fixtures::plain_tags(3));
  auto sentence = fixtures::random_sentence(4, 2, 4);
  const auto params = fixtures::rigged_params(2, 3);
  const auto greedy = treetag::greedy_tag(sentence, params, space);
  CHECK(greedy == std::vector<int>{0, 0, 0, 0});
  const auto searched = treetag::tag_sentence(sentence, params, space, {64, 0.25});
  CHECK(searched[0] == 1);
}
