#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "treetag/mdp.hpp"

namespace treetag {

// One line of a CoNLL-2000 file. The POS column is carried through but never
// seen by the model.
struct RawToken {
  std::string surface;
  std::string pos;
  std::string chunk;

  bool operator==(const RawToken&) const = default;
};

using RawSentence = std::vector<RawToken>;

// Three whitespace-separated columns per token, blank lines between
// sentences. Leading, trailing and repeated blank lines are ignored.
std::vector<RawSentence> parse_conll(std::istream& in);
void write_conll(std::ostream& out, const std::vector<RawSentence>& sentences);

// Four-column prediction files: word, POS, gold chunk, predicted chunk.
struct PredictedSentence {
  RawSentence tokens;
  std::vector<std::string> predicted;
};
std::vector<PredictedSentence> parse_predictions(std::istream& in);
void write_predictions(std::ostream& out, const std::vector<RawSentence>& sentences,
                       const std::vector<std::vector<std::string>>& predicted);

// Tags in first-occurrence order over the given sentences.
TagInventory build_inventory(const std::vector<RawSentence>& sentences);

// Throws InputError naming every tag used by the sentences but missing
// from the inventory.
void check_inventory_covers(const TagInventory& inventory,
                            const std::vector<RawSentence>& sentences);

// Word vectors in GloVe text format. Lookup lowercases the surface form; an
// unknown word maps to the zero vector.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& word) const;
  const Vector& lookup(const std::string& word) const;

  // Returns false when the (lowercased) word is already present.
  bool insert(const std::string& word, Vector v);

 private:
  int dim_ = 0;
  Vector zero_;
  std::unordered_map<std::string, Vector> vectors_;
};

// dim = 0 infers L from the first line. Each line must hold exactly L floats.
EmbeddingTable load_embeddings(std::istream& in, int dim = 0);

std::string lowercase(std::string s);

struct SubsetConfig {
  int max_len = 13;
  int sample_size = 1000;
  int train_size = 900;
  std::uint64_t seed = 1;
};

struct Split {
  std::vector<RawSentence> train;
  std::vector<RawSentence> test;
};

// Drops sentences longer than max_len, draws sample_size of the rest
// uniformly without replacement, and splits off the first train_size.
Split build_subset(const std::vector<RawSentence>& sentences, const SubsetConfig& config);

std::shared_ptr<const Sentence> embed(const RawSentence& raw, const EmbeddingTable& table);
std::vector<int> gold_indices(const RawSentence& raw, const TagInventory& inventory);
std::vector<LabeledSentence> make_labeled(const std::vector<RawSentence>& raws,
                                          const EmbeddingTable& table,
                                          const TagInventory& inventory);

// A chunk [begin, end] (inclusive token indices) of a given type.
struct Chunk {
  int begin = 0;
  int end = 0;
  std::string type;

  auto operator<=>(const Chunk&) const = default;
};

// Maximal B-X I-X* runs, conlleval-style: an I-X that does not continue a
// chunk of type X opens a new one.
std::vector<Chunk> extract_chunks(const std::vector<std::string>& tags);

struct ChunkCounts {
  int gold = 0;
  int predicted = 0;
  int correct = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tokens = 0;
  long correct_tokens = 0;
  ChunkCounts chunks;
  std::map<std::string, ChunkCounts> per_type;
};

EvalResult evaluate(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& predicted);

}  // namespace treetag
