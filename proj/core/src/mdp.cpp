#include "treetag/mdp.hpp"

#include "treetag/errors.hpp"

namespace treetag {

std::shared_ptr<const Sentence> make_sentence(std::vector<std::string> tokens,
                                              std::vector<Vector> embeddings) {
  if (tokens.empty()) throw InputError("sentence is empty");
  if (tokens.size() != embeddings.size()) {
    throw InputError("sentence has " + std::to_string(tokens.size()) +
                     " tokens but " + std::to_string(embeddings.size()) +
                     " embeddings");
  }
  const Eigen::Index dim = embeddings.front().size();
  for (const Vector& e : embeddings) {
    if (e.size() != dim) throw InputError("ragged sentence embeddings");
  }
  auto s = std::make_shared<Sentence>();
  s->tokens = std::move(tokens);
  s->embeddings = std::move(embeddings);
  return s;
}

TagInventory::TagInventory(std::vector<std::string> tags) {
  for (const std::string& t : tags) {
    if (contains(t)) throw InputError("duplicate tag '" + t + "' in inventory");
    add(t);
  }
}

int TagInventory::add(const std::string& tag) {
  if (auto it = lookup_.find(tag); it != lookup_.end()) return it->second;
  if (tag.empty()) throw InputError("empty tag string");
  const int index = size();
  tags_.push_back(tag);
  lookup_.emplace(tag, index);
  const bool has_prefix = tag.size() > 2 && tag[1] == '-';
  begin_.push_back(has_prefix && tag[0] == 'B');
  inside_.push_back(has_prefix && tag[0] == 'I');
  types_.push_back(has_prefix && (tag[0] == 'B' || tag[0] == 'I') ? tag.substr(2)
                                                                  : std::string());
  return index;
}

const std::string& TagInventory::tag(int index) const {
  if (index < 0 || index >= size()) {
    throw InputError("tag index " + std::to_string(index) + " out of range");
  }
  return tags_[index];
}

int TagInventory::index_of(const std::string& tag) const {
  auto it = lookup_.find(tag);
  if (it == lookup_.end()) throw InputError("unknown tag '" + tag + "'");
  return it->second;
}

State::State(std::shared_ptr<const Sentence> sentence, int position,
             std::vector<int> tags)
    : sentence_(std::move(sentence)), position_(position), tags_(std::move(tags)) {
  if (!sentence_ || sentence_->size() == 0) throw InputError("state needs a nonempty sentence");
  if (position_ < 1 || position_ > sentence_length() + 1) {
    throw ContractViolation("state position out of range");
  }
  if (static_cast<int>(tags_.size()) != position_ - 1) {
    throw ContractViolation("tag prefix length must equal t - 1");
  }
}

std::span<const Vector> State::word_prefix() const {
  const std::size_t len = std::min<std::size_t>(position_, sentence_->size());
  return std::span<const Vector>(sentence_->embeddings).first(len);
}

ActionSpace::ActionSpace(TagInventory inventory, bool bio_constraint)
    : inventory_(std::move(inventory)), bio_(bio_constraint) {
  if (inventory_.size() == 0) throw ConfigError("tag inventory is empty");
}

bool ActionSpace::allowed_after(int previous, int action) const {
  if (!bio_ || !inventory_.is_inside(action)) return true;
  if (previous < 0) return false;
  return (inventory_.is_begin(previous) || inventory_.is_inside(previous)) &&
         inventory_.chunk_type(previous) == inventory_.chunk_type(action);
}

std::vector<int> ActionSpace::actions(const State& s) const {
  if (s.is_terminal()) throw ContractViolation("actions() on a terminal state");
  const int previous = s.tags().empty() ? -1 : s.tags().back();
  std::vector<int> out;
  out.reserve(num_tags());
  for (int a = 0; a < num_tags(); ++a) {
    if (allowed_after(previous, a)) out.push_back(a);
  }
  return out;
}

bool ActionSpace::allows(const State& s, int action) const {
  if (action < 0 || action >= num_tags()) return false;
  const int previous = s.tags().empty() ? -1 : s.tags().back();
  return allowed_after(previous, action);
}

State initial_state(std::shared_ptr<const Sentence> sentence) {
  if (!sentence || sentence->size() == 0) throw InputError("sentence is empty");
  return State(std::move(sentence), 1, {});
}

State transition(const State& s, int action, const ActionSpace& space) {
  if (s.is_terminal()) throw ContractViolation("transition from a terminal state");
  if (!space.allows(s, action)) {
    throw InputError("action " + std::to_string(action) + " not available at t=" +
                     std::to_string(s.position()));
  }
  std::vector<int> tags = s.tags();
  tags.push_back(action);
  return State(s.sentence_ptr(), s.position() + 1, std::move(tags));
}

double accuracy(std::span<const int> gold, std::span<const int> predicted) {
  if (gold.size() != predicted.size()) {
    throw InputError("accuracy: length mismatch (" + std::to_string(gold.size()) +
                     " vs " + std::to_string(predicted.size()) + ")");
  }
  if (gold.empty()) throw InputError("accuracy: empty sequences");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += gold[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

}  // namespace treetag
