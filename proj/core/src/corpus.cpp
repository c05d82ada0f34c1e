#include "treetag/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "treetag/errors.hpp"
#include "treetag/random.hpp"

namespace treetag {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

// Calls on_token(fields, line_no) per token line and on_break() between
// sentences; blank runs collapse.
template <typename OnToken, typename OnBreak>
void scan_columns(std::istream& in, std::size_t columns, OnToken on_token, OnBreak on_break) {
  std::string line;
  std::size_t line_no = 0;
  bool open = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) {
      if (open) on_break();
      open = false;
      continue;
    }
    std::vector<std::string> fields = split_ws(line);
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " columns, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    on_token(std::move(fields));
    open = true;
  }
  if (open) on_break();
}

}  // namespace

std::vector<RawSentence> parse_conll(std::istream& in) {
  std::vector<RawSentence> out;
  RawSentence current;
  scan_columns(
      in, 3,
      [&](std::vector<std::string> f) {
        current.push_back(RawToken{std::move(f[0]), std::move(f[1]), std::move(f[2])});
      },
      [&] { out.push_back(std::move(current)); current.clear(); });
  return out;
}

void write_conll(std::ostream& out, const std::vector<RawSentence>& sentences) {
  for (const RawSentence& s : sentences) {
    for (const RawToken& t : s) out << t.surface << ' ' << t.pos << ' ' << t.chunk << '\n';
    out << '\n';
  }
}

std::vector<PredictedSentence> parse_predictions(std::istream& in) {
  std::vector<PredictedSentence> out;
  PredictedSentence current;
  scan_columns(
      in, 4,
      [&](std::vector<std::string> f) {
        current.tokens.push_back(RawToken{std::move(f[0]), std::move(f[1]), std::move(f[2])});
        current.predicted.push_back(std::move(f[3]));
      },
      [&] { out.push_back(std::move(current)); current = {}; });
  return out;
}

void write_predictions(std::ostream& out, const std::vector<RawSentence>& sentences,
                       const std::vector<std::vector<std::string>>& predicted) {
  if (sentences.size() != predicted.size()) {
    throw InputError("write_predictions: sentence count mismatch");
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].size() != predicted[i].size()) {
      throw InputError("write_predictions: token count mismatch in sentence " +
                       std::to_string(i + 1));
    }
    for (std::size_t k = 0; k < sentences[i].size(); ++k) {
      const RawToken& t = sentences[i][k];
      out << t.surface << ' ' << t.pos << ' ' << t.chunk << ' ' << predicted[i][k] << '\n';
    }
    out << '\n';
  }
}

TagInventory build_inventory(const std::vector<RawSentence>& sentences) {
  TagInventory inventory;
  for (const RawSentence& s : sentences) {
    for (const RawToken& t : s) inventory.add(t.chunk);
  }
  return inventory;
}

void check_inventory_covers(const TagInventory& inventory,
                            const std::vector<RawSentence>& sentences) {
  std::set<std::string> missing;
  for (const RawSentence& s : sentences) {
    for (const RawToken& t : s) {
      if (!inventory.contains(t.chunk)) missing.insert(t.chunk);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const std::string& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw InputError("tags absent from the training inventory: " + list);
  }
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim), zero_(Vector::Zero(dim)) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
}

bool EmbeddingTable::contains(const std::string& word) const {
  return vectors_.contains(lowercase(word));
}

const Vector& EmbeddingTable::lookup(const std::string& word) const {
  auto it = vectors_.find(lowercase(word));
  return it == vectors_.end() ? zero_ : it->second;
}

bool EmbeddingTable::insert(const std::string& word, Vector v) {
  if (v.size() != dim_) throw ConfigError("embedding has the wrong dimension");
  return vectors_.emplace(lowercase(word), std::move(v)).second;
}

EmbeddingTable load_embeddings(std::istream& in, int dim) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    std::vector<std::string> fields = split_ws(line);
    values.clear();
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      const std::string& f = fields[k];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("bad float '" + f + "'", line_no);
      }
      values.push_back(v);
    }
    if (table.dim() == 0) {
      if (dim == 0) dim = static_cast<int>(values.size());
      if (dim <= 0) throw ParseError("embedding line has no values", line_no);
      table = EmbeddingTable(dim);
    }
    if (static_cast<int>(values.size()) != dim) {
      throw ParseError("expected " + std::to_string(dim) + " values, found " +
                           std::to_string(values.size()),
                       line_no);
    }
    table.insert(fields[0], Eigen::Map<const Vector>(values.data(), dim));
  }
  if (table.dim() == 0) {
    if (dim <= 0) throw ParseError("empty embedding file", line_no);
    table = EmbeddingTable(dim);
  }
  return table;
}

Split build_subset(const std::vector<RawSentence>& sentences, const SubsetConfig& config) {
  if (config.train_size < 0 || config.train_size > config.sample_size) {
    throw ConfigError("train size must lie in [0, sample size]");
  }
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!sentences[i].empty() && static_cast<int>(sentences[i].size()) <= config.max_len) {
      eligible.push_back(i);
    }
  }
  if (static_cast<int>(eligible.size()) < config.sample_size) {
    throw InputError("only " + std::to_string(eligible.size()) + " sentences of length <= " +
                     std::to_string(config.max_len) + ", need " +
                     std::to_string(config.sample_size));
  }
  Rng rng(config.seed);
  rng.shuffle(eligible);
  Split split;
  for (int k = 0; k < config.sample_size; ++k) {
    (k < config.train_size ? split.train : split.test).push_back(sentences[eligible[k]]);
  }
  return split;
}

std::shared_ptr<const Sentence> embed(const RawSentence& raw, const EmbeddingTable& table) {
  std::vector<std::string> tokens;
  std::vector<Vector> vectors;
  for (const RawToken& t : raw) {
    tokens.push_back(t.surface);
    vectors.push_back(table.lookup(t.surface));
  }
  return make_sentence(std::move(tokens), std::move(vectors));
}

std::vector<int> gold_indices(const RawSentence& raw, const TagInventory& inventory) {
  std::vector<int> out;
  out.reserve(raw.size());
  for (const RawToken& t : raw) out.push_back(inventory.index_of(t.chunk));
  return out;
}

std::vector<LabeledSentence> make_labeled(const std::vector<RawSentence>& raws,
                                          const EmbeddingTable& table,
                                          const TagInventory& inventory) {
  std::vector<LabeledSentence> out;
  out.reserve(raws.size());
  for (const RawSentence& r : raws) {
    out.push_back(LabeledSentence{embed(r, table), gold_indices(r, inventory)});
  }
  return out;
}

namespace {

// Splits "B-NP" into ("B", "NP"); tags without a hyphen have an empty type.
std::pair<std::string, std::string> split_tag(const std::string& tag) {
  const auto dash = tag.find('-');
  if (dash == std::string::npos) return {tag, ""};
  return {tag.substr(0, dash), tag.substr(dash + 1)};
}

bool chunk_ends(const std::string& prev, const std::string& tag,
                const std::string& prev_type, const std::string& type) {
  if (prev == "B" && (tag == "B" || tag == "O")) return true;
  if (prev == "I" && (tag == "B" || tag == "O")) return true;
  return prev != "O" && prev_type != type;
}

bool chunk_starts(const std::string& prev, const std::string& tag,
                  const std::string& prev_type, const std::string& type) {
  if (tag == "B") return true;
  if (prev == "O" && tag == "I") return true;
  return tag != "O" && prev_type != type;
}

}  // namespace

std::vector<Chunk> extract_chunks(const std::vector<std::string>& tags) {
  std::vector<Chunk> chunks;
  std::string prev = "O", prev_type;
  int open = -1;
  for (int k = 0; k <= static_cast<int>(tags.size()); ++k) {
    auto [tag, type] = k < static_cast<int>(tags.size()) ? split_tag(tags[k])
                                                         : std::pair<std::string, std::string>{"O", ""};
    if (open >= 0 && chunk_ends(prev, tag, prev_type, type)) {
      chunks.push_back(Chunk{open, k - 1, prev_type});
      open = -1;
    }
    if (chunk_starts(prev, tag, prev_type, type)) open = k;
    prev = tag;
    prev_type = type;
  }
  return chunks;
}

EvalResult evaluate(const std::vector<std::vector<std::string>>& gold,
                    const std::vector<std::vector<std::string>>& predicted) {
  if (gold.size() != predicted.size()) {
    throw InputError("evaluate: " + std::to_string(gold.size()) + " gold vs " +
                     std::to_string(predicted.size()) + " predicted sentences");
  }
  EvalResult r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != predicted[i].size()) {
      throw InputError("evaluate: sentence " + std::to_string(i + 1) +
                       " has mismatched lengths");
    }
    for (std::size_t k = 0; k < gold[i].size(); ++k) {
      ++r.tokens;
      r.correct_tokens += gold[i][k] == predicted[i][k];
    }
    const std::vector<Chunk> g = extract_chunks(gold[i]);
    const std::vector<Chunk> p = extract_chunks(predicted[i]);
    const std::set<Chunk> gold_set(g.begin(), g.end());
    for (const Chunk& c : g) {
      ++r.chunks.gold;
      ++r.per_type[c.type].gold;
    }
    for (const Chunk& c : p) {
      ++r.chunks.predicted;
      ++r.per_type[c.type].predicted;
      if (gold_set.contains(c)) {
        ++r.chunks.correct;
        ++r.per_type[c.type].correct;
      }
    }
  }
  r.accuracy = r.tokens == 0 ? 1.0 : static_cast<double>(r.correct_tokens) / r.tokens;
  // With no chunks on one side the ratio is undefined; it counts as perfect
  // only when the other side has none either.
  r.precision = r.chunks.predicted > 0
                    ? static_cast<double>(r.chunks.correct) / r.chunks.predicted
                    : (r.chunks.gold == 0 ? 1.0 : 0.0);
  r.recall = r.chunks.gold > 0 ? static_cast<double>(r.chunks.correct) / r.chunks.gold
                               : (r.chunks.predicted == 0 ? 1.0 : 0.0);
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

}  // namespace treetag
