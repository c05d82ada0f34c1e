#include "treetag/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "treetag/checkpoint.hpp"
#include "treetag/errors.hpp"

namespace treetag {
namespace {

using nlohmann::json;

const char* command_name(Command c) {
  switch (c) {
    case Command::kTrain: return "train";
    case Command::kTag: return "tag";
    case Command::kEval: return "eval";
  }
  return "train";
}

Command parse_command(const std::string& s) {
  if (s == "train") return Command::kTrain;
  if (s == "tag") return Command::kTag;
  if (s == "eval") return Command::kEval;
  throw ConfigError("unknown command '" + s + "'");
}

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string(what) + " not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + ": " + path.string());
  return in;
}

std::vector<RawSentence> read_conll(const std::filesystem::path& path, const char* what) {
  std::ifstream in = open_input(path, what);
  try {
    return parse_conll(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

EmbeddingTable read_embeddings(const std::filesystem::path& path, int dim) {
  std::ifstream in = open_input(path, "embeddings");
  try {
    return load_embeddings(in, dim);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

// Writes through a temp file so a failed command leaves no partial artifact.
template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fill) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    fill(out);
    if (!out) throw ConfigError("failed writing " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

// (surface, last column) pairs from a file with three or more columns.
std::vector<std::vector<std::pair<std::string, std::string>>> read_tag_columns(
    const std::filesystem::path& path, const char* what, bool last_column) {
  std::ifstream in = open_input(path, what);
  std::vector<std::vector<std::pair<std::string, std::string>>> out;
  std::vector<std::pair<std::string, std::string>> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string x; fields >> x;) f.push_back(x);
    if (f.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (f.size() < 3 || f.size() > 4) {
      throw ParseError(path.string() + ": expected 3 or 4 columns", line_no);
    }
    current.emplace_back(f[0], last_column ? f.back() : f[2]);
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

void log_line(std::ostream& log, bool quiet, const std::string& msg) {
  if (!quiet) log << "[treetag] " << msg << '\n';
}

template <typename Fn>
int guarded(std::ostream& log, const char* name, Fn&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "[treetag] " << name << " failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

void apply_profile(RunConfig& config, const std::string& name) {
  if (name == "full") {
    config.train.simulations = 4000;
    config.train.hidden = 200;
  } else if (name == "desk") {
    config.train.simulations = 64;
    config.train.hidden = 32;
  } else {
    throw ConfigError("unknown profile '" + name + "' (expected full or desk)");
  }
  config.train.eta = 0.001;
  config.train.lambda = 0.25;
  config.profile = name;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["command"] = command_name(c.command);
  j["profile"] = c.profile;
  j["train_file"] = c.train_file.string();
  j["test_file"] = c.test_file.string();
  j["embeddings"] = c.embeddings.string();
  j["checkpoint"] = c.checkpoint.string();
  j["predictions"] = c.predictions.string();
  j["out"] = c.out.string();
  j["k"] = c.train.simulations;
  j["eta"] = c.train.eta;
  j["lambda"] = c.train.lambda;
  j["hidden"] = c.train.hidden;
  j["epochs"] = c.train.epochs;
  j["seed"] = c.train.seed;
  j["bio_constraint"] = c.train.bio_constraint;
  j["clip_norm"] = c.train.clip_norm;
  j["init"] = c.train.init == InitScheme::kUnit ? "unit" : "scaled";
  j["reuse_subtree"] = c.train.reuse_subtree;
  j["patience"] = c.train.patience;
  j["min_improvement"] = c.train.min_improvement;
  j["embedding_dim"] = c.embedding_dim;
  j["decoder"] = c.decoder == Decoder::kSearch ? "mcts" : "greedy";
  j["jobs"] = c.jobs;
  j["subset_size"] = c.subset_size;
  j["subset_train"] = c.subset_train;
  j["max_len"] = c.max_len;
  j["quiet"] = c.quiet;
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        j.at(key).get_to(field);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
      }
    }
  };
  auto get_path = [&](const char* key, std::filesystem::path& field) {
    std::string s = field.string();
    get(key, s);
    field = s;
  };
  if (j.contains("profile")) apply_profile(c, j.at("profile").get<std::string>());
  if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
  get_path("train_file", c.train_file);
  get_path("test_file", c.test_file);
  get_path("embeddings", c.embeddings);
  get_path("checkpoint", c.checkpoint);
  get_path("predictions", c.predictions);
  get_path("out", c.out);
  get("k", c.train.simulations);
  get("eta", c.train.eta);
  get("lambda", c.train.lambda);
  get("hidden", c.train.hidden);
  get("epochs", c.train.epochs);
  get("seed", c.train.seed);
  get("bio_constraint", c.train.bio_constraint);
  get("clip_norm", c.train.clip_norm);
  if (j.contains("init")) {
    const std::string init = j.at("init").get<std::string>();
    if (init != "unit" && init != "scaled") throw ConfigError("init must be unit or scaled");
    c.train.init = init == "unit" ? InitScheme::kUnit : InitScheme::kScaled;
  }
  get("reuse_subtree", c.train.reuse_subtree);
  get("patience", c.train.patience);
  get("min_improvement", c.train.min_improvement);
  get("embedding_dim", c.embedding_dim);
  if (j.contains("decoder")) {
    const std::string d = j.at("decoder").get<std::string>();
    if (d != "mcts" && d != "greedy") throw ConfigError("decoder must be mcts or greedy");
    c.decoder = d == "mcts" ? Decoder::kSearch : Decoder::kGreedy;
  }
  get("jobs", c.jobs);
  get("subset_size", c.subset_size);
  get("subset_train", c.subset_train);
  get("max_len", c.max_len);
  get("quiet", c.quiet);
  return c;
}

void save_run_config(const std::filesystem::path& path, const RunConfig& config) {
  write_file(path, [&](std::ostream& out) { out << run_config_to_json(config); });
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, "config");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_json(buffer.str());
}

std::string metrics_record(const EvalResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "precision=%.2f recall=%.2f f1=%.2f accuracy=%.2f",
                100.0 * r.precision, 100.0 * r.recall, 100.0 * r.f1, 100.0 * r.accuracy);
  return buf;
}

int cmd_train(const RunConfig& config, std::ostream& log) {
  return guarded(log, "train", [&] {
    config.train.validate();
    if (config.checkpoint.empty()) throw ConfigError("--checkpoint is required");
    std::vector<RawSentence> raw = read_conll(config.train_file, "training file");
    std::ifstream probe = open_input(config.embeddings, "embeddings");
    probe.close();

    std::vector<RawSentence> train_split = std::move(raw);
    std::vector<RawSentence> held_out;
    if (config.subset_size > 0) {
      Split split = build_subset(
          train_split, SubsetConfig{config.max_len, config.subset_size, config.subset_train,
                                    config.train.seed});
      train_split = std::move(split.train);
      held_out = std::move(split.test);
    }
    if (train_split.empty()) throw InputError("no training sentences");

    const TagInventory inventory = build_inventory(train_split);
    check_inventory_covers(inventory, held_out);
    if (!config.test_file.empty()) {
      check_inventory_covers(inventory, read_conll(config.test_file, "test file"));
    }
    const EmbeddingTable table = read_embeddings(config.embeddings, config.embedding_dim);
    const ActionSpace space(inventory, config.train.bio_constraint);
    const std::vector<LabeledSentence> data = make_labeled(train_split, table, inventory);
    log_line(log, config.quiet,
             "training on " + std::to_string(data.size()) + " sentences, " +
                 std::to_string(inventory.size()) + " tags, L=" + std::to_string(table.dim()) +
                 ", h=" + std::to_string(config.train.hidden) +
                 ", K=" + std::to_string(config.train.simulations));

    std::filesystem::path report_path = config.checkpoint;
    report_path += ".report.jsonl";
    std::ofstream report(report_path, std::ios::trunc);
    if (!report) throw ConfigError("cannot write " + report_path.string());

    TrainOptions options;
    options.checkpoint = config.checkpoint;
    options.log = &report;
    options.on_epoch = [&](const EpochRecord& r) {
      if (!config.quiet) {
        log << "[treetag] ";
        write_report_line(log, r);
      }
    };
    const TrainResult result = train(data, space, config.train, options);
    if (config.train.epochs == 0) {
      save_checkpoint(config.checkpoint,
                      Checkpoint{result.params.dims(), config.train.seed, inventory.tags(),
                                 result.params});
    }

    std::filesystem::path config_path = config.checkpoint;
    config_path += ".config.json";
    save_run_config(config_path, config);
    if (!config.out.empty() && !held_out.empty()) {
      write_file(config.out, [&](std::ostream& out) { write_conll(out, held_out); });
    }
    log_line(log, config.quiet,
             "wrote " + config.checkpoint.string() + " (best epoch " +
                 std::to_string(result.report.best_epoch) + ")");
    return 0;
  });
}

int cmd_tag(const RunConfig& config, std::ostream& out, std::ostream& log) {
  return guarded(log, "tag", [&] {
    if (config.checkpoint.empty()) throw ConfigError("--checkpoint is required");
    if (!std::filesystem::exists(config.checkpoint)) {
      throw ConfigError("checkpoint not found: " + config.checkpoint.string());
    }
    const Checkpoint ckpt = load_checkpoint(config.checkpoint);
    const std::vector<RawSentence> raw = read_conll(config.test_file, "test file");
    const EmbeddingTable table = read_embeddings(config.embeddings, config.embedding_dim);
    if (table.dim() != ckpt.dims.embedding_dim) {
      throw ConfigError("embeddings have dimension " + std::to_string(table.dim()) +
                        " but the checkpoint expects " +
                        std::to_string(ckpt.dims.embedding_dim));
    }
    const TagInventory inventory(ckpt.tags);
    const ActionSpace space(inventory, config.train.bio_constraint);

    std::vector<std::shared_ptr<const Sentence>> sentences;
    sentences.reserve(raw.size());
    for (const RawSentence& r : raw) sentences.push_back(embed(r, table));
    const auto tags = tag_corpus(sentences, ckpt.params, space, config.train.search(),
                                 config.decoder, config.jobs, config.train.reuse_subtree);

    std::vector<std::vector<std::string>> predicted;
    predicted.reserve(tags.size());
    for (const auto& seq : tags) {
      std::vector<std::string> names;
      for (int t : seq) names.push_back(inventory.tag(t));
      predicted.push_back(std::move(names));
    }
    if (config.out.empty()) {
      write_predictions(out, raw, predicted);
    } else {
      write_file(config.out, [&](std::ostream& o) { write_predictions(o, raw, predicted); });
    }
    log_line(log, config.quiet, "tagged " + std::to_string(raw.size()) + " sentences");
    return 0;
  });
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& log) {
  return guarded(log, "eval", [&] {
    const auto gold = read_tag_columns(config.test_file, "gold file", false);
    const auto pred = read_tag_columns(config.predictions, "predictions file", true);
    if (gold.size() != pred.size()) {
      throw InputError("gold has " + std::to_string(gold.size()) + " sentences, predictions " +
                       std::to_string(pred.size()));
    }
    std::vector<std::vector<std::string>> g(gold.size()), p(pred.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i].size() != pred[i].size()) {
        throw InputError("sentence " + std::to_string(i + 1) + " differs in length");
      }
      for (std::size_t k = 0; k < gold[i].size(); ++k) {
        if (gold[i][k].first != pred[i][k].first) {
          throw InputError("sentence " + std::to_string(i + 1) + " token " +
                           std::to_string(k + 1) + ": '" + gold[i][k].first + "' vs '" +
                           pred[i][k].first + "'");
        }
        g[i].push_back(gold[i][k].second);
        p[i].push_back(pred[i][k].second);
      }
    }
    const EvalResult r = evaluate(g, p);

    char row[160];
    out << "tokens: " << r.tokens << "  chunks: gold " << r.chunks.gold << ", predicted "
        << r.chunks.predicted << ", correct " << r.chunks.correct << '\n';
    out << "          precision  recall      f1  accuracy\n";
    std::snprintf(row, sizeof row, "overall  %9.2f  %6.2f  %6.2f  %8.2f\n", 100.0 * r.precision,
                  100.0 * r.recall, 100.0 * r.f1, 100.0 * r.accuracy);
    out << row;
    for (const auto& [type, c] : r.per_type) {
      const double tp = c.predicted ? 100.0 * c.correct / c.predicted : 0.0;
      const double tr = c.gold ? 100.0 * c.correct / c.gold : 0.0;
      const double tf = tp + tr > 0 ? 2 * tp * tr / (tp + tr) : 0.0;
      std::snprintf(row, sizeof row, "%-8s %9.2f  %6.2f  %6.2f\n", type.c_str(), tp, tr, tf);
      out << row;
    }
    const std::string record = metrics_record(r);
    out << record << '\n';
    if (!config.out.empty()) {
      write_file(config.out, [&](std::ostream& o) { o << record << '\n'; });
    }
    return 0;
  });
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& log) {
  switch (config.command) {
    case Command::kTrain: return cmd_train(config, log);
    case Command::kTag: return cmd_tag(config, out, log);
    case Command::kEval: return cmd_eval(config, out, log);
  }
  return 1;
}

}  // namespace treetag
