// treetag: train, tag and evaluate the search-based chunker.
//
//   treetag train --train-file train.txt --embeddings glove.txt --checkpoint m.ckpt
//   treetag tag   --test-file test.txt --embeddings glove.txt --checkpoint m.ckpt --out pred.txt
//   treetag eval  --test-file test.txt --predictions pred.txt
//
// Precedence: defaults < --config file < --profile < individual flags.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "treetag/cli.hpp"
#include "treetag/errors.hpp"

namespace {

struct Flags {
  std::optional<std::string> config, save_config, profile;
  std::optional<std::string> train_file, test_file, embeddings, checkpoint, predictions, out;
  std::optional<int> k, hidden, epochs, jobs, embedding_dim, patience;
  std::optional<int> subset, subset_train, max_len;
  std::optional<double> eta, lambda, clip_norm;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> decoder, init;
  bool bio = false, clip = false, reuse = false, quiet = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run config to start from");
  cmd->add_option("--save-config", f.save_config, "Write the effective run config here");
  cmd->add_option("--profile", f.profile, "full (K=4000, h=200) or desk (K=64, h=32)")
      ->check(CLI::IsMember({"full", "desk"}));
  cmd->add_option("--test-file", f.test_file, "CoNLL file to tag / gold file for eval");
  cmd->add_option("--embeddings", f.embeddings, "GloVe-format text embeddings");
  cmd->add_option("--embedding-dim", f.embedding_dim, "Embedding size (0 = infer)");
  cmd->add_option("--checkpoint", f.checkpoint, "Model checkpoint path");
  cmd->add_option("--out", f.out, "Output file");
  cmd->add_option("--k", f.k, "Search iterations per position (K >= 2)");
  cmd->add_option("--lambda", f.lambda, "Exploration tradeoff");
  cmd->add_flag("--bio-constraint", f.bio, "Only offer I-X after B-X or I-X");
  cmd->add_flag("--reuse-subtree", f.reuse, "Keep the chosen subtree between positions");
  cmd->add_flag("-q,--quiet", f.quiet, "Suppress progress logs");
}

treetag::RunConfig resolve(treetag::Command command, const Flags& f) {
  treetag::RunConfig c;
  treetag::apply_profile(c, "full");
  if (f.config) c = treetag::load_run_config(*f.config);
  c.command = command;
  if (f.profile) treetag::apply_profile(c, *f.profile);
  if (f.train_file) c.train_file = *f.train_file;
  if (f.test_file) c.test_file = *f.test_file;
  if (f.embeddings) c.embeddings = *f.embeddings;
  if (f.checkpoint) c.checkpoint = *f.checkpoint;
  if (f.predictions) c.predictions = *f.predictions;
  if (f.out) c.out = *f.out;
  if (f.k) c.train.simulations = *f.k;
  if (f.eta) c.train.eta = *f.eta;
  if (f.lambda) c.train.lambda = *f.lambda;
  if (f.hidden) c.train.hidden = *f.hidden;
  if (f.epochs) c.train.epochs = *f.epochs;
  if (f.seed) c.train.seed = *f.seed;
  if (f.patience) c.train.patience = *f.patience;
  if (f.clip) c.train.clip_norm = 5.0;
  if (f.clip_norm) c.train.clip_norm = *f.clip_norm;
  if (f.init) c.train.init = *f.init == "unit" ? treetag::InitScheme::kUnit
                                               : treetag::InitScheme::kScaled;
  if (f.bio) c.train.bio_constraint = true;
  if (f.reuse) c.train.reuse_subtree = true;
  if (f.decoder) {
    c.decoder = *f.decoder == "greedy" ? treetag::Decoder::kGreedy : treetag::Decoder::kSearch;
  }
  if (f.jobs) c.jobs = *f.jobs;
  if (f.embedding_dim) c.embedding_dim = *f.embedding_dim;
  if (f.subset) c.subset_size = *f.subset;
  if (f.subset_train) c.subset_train = *f.subset_train;
  if (f.max_len) c.max_len = *f.max_len;
  if (f.quiet) c.quiet = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence chunking with policy/value-guided tree search"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_common(train, f);
  train->add_option("--train-file", f.train_file, "CoNLL-2000 training file");
  train->add_option("--eta", f.eta, "AdaGrad learning rate");
  train->add_option("--hidden", f.hidden, "LSTM hidden units");
  train->add_option("--epochs", f.epochs, "Epoch budget");
  train->add_option("--seed", f.seed, "Seed for init, shuffling and subset sampling");
  train->add_option("--patience", f.patience, "Early-stop patience in epochs (0 = off)");
  train->add_flag("--clip", f.clip, "Clip gradient norm at 5.0");
  train->add_option("--clip-norm", f.clip_norm, "Clip gradient norm at this value");
  train->add_option("--init", f.init, "Parameter init: unit (U[-1,1]) or scaled")
      ->check(CLI::IsMember({"unit", "scaled"}));
  train->add_option("--subset", f.subset, "Sample this many sentences (0 = whole file)");
  train->add_option("--subset-train", f.subset_train, "Training part of the sample");
  train->add_option("--max-len", f.max_len, "Drop longer sentences before sampling");

  CLI::App* tag = app.add_subcommand("tag", "Tag a CoNLL file with a trained model");
  add_common(tag, f);
  tag->add_option("--decoder", f.decoder, "mcts or greedy")
      ->check(CLI::IsMember({"mcts", "greedy"}));
  tag->add_option("--jobs", f.jobs, "Sentences tagged in parallel");

  CLI::App* eval = app.add_subcommand("eval", "Score predictions against gold chunks");
  add_common(eval, f);
  eval->add_option("--predictions", f.predictions, "Tagged file (last column is scored)");

  CLI11_PARSE(app, argc, argv);

  const treetag::Command command = train->parsed() ? treetag::Command::kTrain
                                   : tag->parsed() ? treetag::Command::kTag
                                                   : treetag::Command::kEval;
  treetag::RunConfig config;
  try {
    config = resolve(command, f);
    if (f.save_config) treetag::save_run_config(*f.save_config, config);
  } catch (const std::exception& e) {
    std::cerr << "[treetag] " << e.what() << '\n';
    return 2;
  }
  return treetag::run_command(config, std::cout, std::cerr);
}
