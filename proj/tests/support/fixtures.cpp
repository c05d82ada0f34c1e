#include "support/fixtures.hpp"

#include <fstream>

#include "treetag/random.hpp"

namespace fixtures {

std::filesystem::path path(const std::string& name) {
  return std::filesystem::path(TREETAG_FIXTURE_DIR) / name;
}

std::shared_ptr<const treetag::Sentence> random_sentence(int length, int dim,
                                                         std::uint64_t seed) {
  treetag::Rng rng(seed);
  std::vector<std::string> tokens;
  std::vector<treetag::Vector> vectors;
  for (int i = 0; i < length; ++i) {
    tokens.push_back("w" + std::to_string(i));
    treetag::Vector v(dim);
    for (int k = 0; k < dim; ++k) v[k] = rng.uniform(-1.0, 1.0);
    vectors.push_back(v);
  }
  return treetag::make_sentence(std::move(tokens), std::move(vectors));
}

treetag::TagInventory plain_tags(int n) {
  std::vector<std::string> tags;
  for (int i = 0; i < n; ++i) tags.push_back("T" + std::to_string(i));
  return treetag::TagInventory(tags);
}

treetag::Episode random_episode(std::shared_ptr<const treetag::Sentence> sentence,
                                const treetag::ActionSpace& space, int steps,
                                std::uint64_t seed) {
  treetag::Rng rng(seed);
  treetag::Episode e;
  treetag::State s = treetag::initial_state(sentence);
  for (int t = 0; t < steps; ++t) {
    std::vector<int> actions = space.actions(s);
    std::vector<double> pi(actions.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
      pi[k] = k == 1 ? 0.0 : rng.uniform(0.05, 1.0);
      total += pi[k];
    }
    for (double& p : pi) p /= total;
    const int a = actions[rng.below(actions.size())];
    e.steps.push_back(treetag::EpisodeStep{s, actions, pi});
    e.predicted.push_back(a);
    s = treetag::transition(s, a, space);
  }
  e.reward = rng.uniform01();
  return e;
}

treetag::ModelParams rigged_params(int embedding_dim, int num_tags) {
  const int h = 4;
  treetag::ModelParams p({embedding_dim, h, num_tags});
  p.tags.w_input(1, 1) = 10.0;
  p.tags.w_cell(1, 1) = 10.0;
  p.tags.b_forget.setConstant(10.0);
  p.value_w[3 * h + 1] = 6.0;
  p.value_b = -3.0;
  return p;
}

const ToyCorpus& toy_corpus() {
  static const ToyCorpus corpus = [] {
    ToyCorpus c;
    std::ifstream train(path("toy_train.txt")), held(path("toy_heldout.txt")),
        emb(path("toy_embeddings.txt"));
    c.train_raw = treetag::parse_conll(train);
    c.heldout_raw = treetag::parse_conll(held);
    c.embeddings = treetag::load_embeddings(emb);
    c.inventory = treetag::build_inventory(c.train_raw);
    c.train = treetag::make_labeled(c.train_raw, c.embeddings, c.inventory);
    c.heldout = treetag::make_labeled(c.heldout_raw, c.embeddings, c.inventory);
    return c;
  }();
  return corpus;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("treetag_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
