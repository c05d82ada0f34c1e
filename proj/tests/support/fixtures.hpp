#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "treetag/corpus.hpp"
#include "treetag/mdp.hpp"
#include "treetag/model.hpp"

namespace fixtures {

std::filesystem::path path(const std::string& name);

std::shared_ptr<const treetag::Sentence> random_sentence(int length, int dim,
                                                         std::uint64_t seed);

// Inventory "T0".."T{n-1}".
treetag::TagInventory plain_tags(int n);

// Episode along random tag choices with random search policies (some
// entries exactly zero) and a random reward.
treetag::Episode random_episode(std::shared_ptr<const treetag::Sentence> sentence,
                                const treetag::ActionSpace& space, int steps,
                                std::uint64_t seed);

// Hidden size 4, flat policy, zero word LSTM. The tag LSTM latches a cell
// channel on tag 1 and V reads it: V ~ 0.95 once tag 1 was emitted, ~0.05
// before. Greedy decoding therefore emits tag 0 everywhere while search
// picks tag 1 first.
treetag::ModelParams rigged_params(int embedding_dim, int num_tags);

// The bundled toy corpus: 20 training sentences, 10 held out, and 16-dim
// embeddings covering every word in both.
struct ToyCorpus {
  std::vector<treetag::RawSentence> train_raw, heldout_raw;
  treetag::EmbeddingTable embeddings;
  treetag::TagInventory inventory;
  std::vector<treetag::LabeledSentence> train, heldout;
};
const ToyCorpus& toy_corpus();

// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace fixtures
