#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "treetag/lstm.hpp"

namespace treetag {

// Tokens with their embedding vectors, aligned one to one.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<Vector> embeddings;

  std::size_t size() const { return tokens.size(); }
  Eigen::Index embedding_dim() const {
    return embeddings.empty() ? 0 : embeddings.front().size();
  }
};

// A training example: sentence plus its gold tag indices.
struct LabeledSentence {
  std::shared_ptr<const Sentence> sentence;
  std::vector<int> gold;
};

// Throws InputError when the sentence is empty or misaligned.
std::shared_ptr<const Sentence> make_sentence(std::vector<std::string> tokens,
                                              std::vector<Vector> embeddings);

// Ordered, duplicate-free tag list with dense indices.
class TagInventory {
 public:
  TagInventory() = default;
  explicit TagInventory(std::vector<std::string> tags);

  int size() const { return static_cast<int>(tags_.size()); }
  const std::string& tag(int index) const;
  int index_of(const std::string& tag) const;  // throws InputError
  bool contains(const std::string& tag) const { return lookup_.contains(tag); }
  const std::vector<std::string>& tags() const { return tags_; }

  // Chunk type for B-X / I-X tags, empty otherwise.
  const std::string& chunk_type(int index) const { return types_[index]; }
  bool is_inside(int index) const { return inside_[index]; }
  bool is_begin(int index) const { return begin_[index]; }

  // Appends a tag if absent; returns its index.
  int add(const std::string& tag);

  bool operator==(const TagInventory& other) const { return tags_ == other.tags_; }

 private:
  std::vector<std::string> tags_;
  std::vector<std::string> types_;
  std::vector<bool> inside_, begin_;
  std::unordered_map<std::string, int> lookup_;
};

// s_t: words x_1..x_t (capped at M once terminal) and tags y_1..y_{t-1}.
class State {
 public:
  State(std::shared_ptr<const Sentence> sentence, int position, std::vector<int> tags);

  const Sentence& sentence() const { return *sentence_; }
  const std::shared_ptr<const Sentence>& sentence_ptr() const { return sentence_; }
  int position() const { return position_; }  // 1-based t
  const std::vector<int>& tags() const { return tags_; }
  int sentence_length() const { return static_cast<int>(sentence_->size()); }
  bool is_terminal() const { return position_ == sentence_length() + 1; }

  // The word prefix; at the terminal position it is the whole sentence.
  std::span<const Vector> word_prefix() const;

  bool operator==(const State& other) const {
    return sentence_ == other.sentence_ && position_ == other.position_ &&
           tags_ == other.tags_;
  }

 private:
  std::shared_ptr<const Sentence> sentence_;
  int position_;
  std::vector<int> tags_;
};

// The action sets A(s). Default: every tag. With the BIO constraint an I-X tag
// is offered only directly after B-X or I-X.
class ActionSpace {
 public:
  explicit ActionSpace(TagInventory inventory, bool bio_constraint = false);

  const TagInventory& inventory() const { return inventory_; }
  int num_tags() const { return inventory_.size(); }
  bool bio_constraint() const { return bio_; }

  // Ordered by tag index. Throws ContractViolation on a terminal state.
  std::vector<int> actions(const State& s) const;
  bool allows(const State& s, int action) const;

 private:
  bool allowed_after(int previous, int action) const;

  TagInventory inventory_;
  bool bio_;
};

State initial_state(std::shared_ptr<const Sentence> sentence);

// Appends the action to the tag prefix and advances t by one. Throws
// ContractViolation on a terminal state and InputError on an action outside
// A(s).
State transition(const State& s, int action, const ActionSpace& space);

// Fraction of positions where the two sequences agree.
double accuracy(std::span<const int> gold, std::span<const int> predicted);

struct EpisodeStep {
  State state;
  std::vector<int> actions;           // A(s_t), ordered
  std::vector<double> search_policy;  // pi_t, aligned with actions
};

struct Episode {
  std::vector<EpisodeStep> steps;
  double reward = 0.0;
  std::vector<int> predicted;
};

}  // namespace treetag
