#include "treetag/model.hpp"

#include <algorithm>
#include <cmath>

#include "treetag/errors.hpp"
#include "treetag/random.hpp"

namespace treetag {

void ModelDims::validate() const {
  if (embedding_dim <= 0 || hidden <= 0 || num_tags <= 0) {
    throw ConfigError("model dimensions must be positive (L=" +
                      std::to_string(embedding_dim) + ", h=" + std::to_string(hidden) +
                      ", |Y|=" + std::to_string(num_tags) + ")");
  }
}

ModelParams::ModelParams(const ModelDims& dims)
    : words(dims.embedding_dim, dims.hidden),
      tags(dims.num_tags, dims.hidden),
      value_w(Vector::Zero(4 * dims.hidden)),
      policy_u(Matrix::Zero(dims.num_tags, 4 * dims.hidden)) {
  dims.validate();
}

ModelDims ModelParams::dims() const {
  return ModelDims{static_cast<int>(words.input_dim()),
                   static_cast<int>(words.hidden_dim()),
                   static_cast<int>(tags.input_dim())};
}

void ModelParams::validate() const {
  words.validate();
  tags.validate();
  if (tags.hidden_dim() != words.hidden_dim()) {
    throw ConfigError("word and tag LSTMs disagree on hidden size");
  }
  if (value_w.size() != repr_dim()) throw ConfigError("value_w must have length 4h");
  if (policy_u.rows() != tags.input_dim() || policy_u.cols() != repr_dim()) {
    throw ConfigError("policy_u must be |Y| x 4h");
  }
}

std::size_t ModelParams::num_scalars() const {
  std::size_t n = 0;
  for_each_tensor([&n](const std::string&, auto data, auto, auto) { n += data.size(); });
  return n;
}

bool ModelParams::operator==(const ModelParams& other) const {
  std::vector<std::span<const double>> mine, theirs;
  for_each_tensor([&](const std::string&, auto d, auto, auto) { mine.push_back(d); });
  other.for_each_tensor(
      [&](const std::string&, auto d, auto, auto) { theirs.push_back(d); });
  if (mine.size() != theirs.size()) return false;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (!std::ranges::equal(mine[i], theirs[i])) return false;
  }
  return dims() == other.dims();
}

double GradientSet::squared_norm() const {
  double total = 0.0;
  tensors.for_each_tensor([&](const std::string&, auto data, auto, auto) {
    for (double v : data) total += v * v;
  });
  return total;
}

void GradientSet::scale(double factor) {
  tensors.for_each_tensor([&](const std::string&, auto data, auto, auto) {
    for (double& v : data) v *= factor;
  });
}

double GradientSet::clip_norm(double max_norm) {
  const double norm = std::sqrt(squared_norm());
  if (norm > max_norm && norm > 0.0) scale(max_norm / norm);
  return norm;
}

void GradientSet::check_finite() const {
  tensors.for_each_tensor([](const std::string& name, auto data, auto, auto cols) {
    for (std::size_t k = 0; k < data.size(); ++k) {
      if (!std::isfinite(data[k])) {
        // Eigen storage is column-major.
        const auto rows = static_cast<std::size_t>(data.size() / cols);
        throw NumericError("non-finite gradient in " + name + "(" +
                           std::to_string(k % rows) + "," + std::to_string(k / rows) +
                           ")");
      }
    }
  });
}

ModelParams init_params(std::uint64_t seed, const ModelDims& dims, InitScheme scheme) {
  ModelParams params(dims);
  const double bound =
      scheme == InitScheme::kUnit ? 1.0 : 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  Rng rng(seed);
  params.for_each_tensor([&](const std::string&, auto data, auto, auto) {
    for (double& v : data) v = rng.uniform(-bound, bound);
  });
  return params;
}

Vector state_repr(const State& s, const ModelParams& params) {
  const Eigen::Index h = params.words.hidden_dim();
  Vector g(4 * h);
  g.head(2 * h) = encode_words(s.word_prefix(), params.words);
  g.tail(2 * h) = encode_tag_indices(s.tags(), params.tags);
  return g;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<double> logits_for(const Vector& repr, std::span<const int> actions,
                               const ModelParams& params) {
  if (actions.empty()) throw ContractViolation("policy over an empty action set");
  std::vector<double> z;
  z.reserve(actions.size());
  for (int a : actions) {
    if (a < 0 || a >= params.policy_u.rows()) {
      throw ConfigError("action " + std::to_string(a) + " outside the tag inventory");
    }
    z.push_back(params.policy_u.row(a).dot(repr));
  }
  return z;
}

// Stable log-softmax.
std::vector<double> log_softmax(const std::vector<double>& z) {
  const double m = *std::ranges::max_element(z);
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - m);
  const double log_sum = std::log(sum);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - m - log_sum;
  return out;
}

std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::ranges::max_element(z);
  std::vector<double> out(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - m);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

void check_episode(const Episode& episode) {
  if (episode.steps.empty()) throw ContractViolation("loss of an empty episode");
  if (!(episode.reward >= 0.0 && episode.reward <= 1.0)) {
    throw ContractViolation("episode reward must lie in [0, 1]");
  }
  for (const EpisodeStep& step : episode.steps) {
    if (step.search_policy.size() != step.actions.size()) {
      throw ContractViolation("search policy not aligned with the action set");
    }
    double total = 0.0;
    for (double p : step.search_policy) {
      if (!(p >= 0.0)) throw ContractViolation("negative search probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw ContractViolation("search policy does not sum to 1");
    }
  }
}

}  // namespace

double value_from_repr(const Vector& repr, const ModelParams& params) {
  return sigmoid(params.value_w.dot(repr) + params.value_b);
}

std::vector<double> policy_from_repr(const Vector& repr, std::span<const int> actions,
                                     const ModelParams& params) {
  return softmax(logits_for(repr, actions, params));
}

double value(const State& s, const ModelParams& params) {
  return value_from_repr(state_repr(s, params), params);
}

std::vector<double> policy(const State& s, std::span<const int> actions,
                           const ModelParams& params) {
  return policy_from_repr(state_repr(s, params), actions, params);
}

double loss(const Episode& episode, const ModelParams& params) {
  check_episode(episode);
  double total = 0.0;
  for (const EpisodeStep& step : episode.steps) {
    const Vector g = state_repr(step.state, params);
    const double v = value_from_repr(g, params);
    total += (v - episode.reward) * (v - episode.reward);
    const std::vector<double> log_p = log_softmax(logits_for(g, step.actions, params));
    for (std::size_t k = 0; k < step.actions.size(); ++k) {
      if (step.search_policy[k] > 0.0) total -= step.search_policy[k] * log_p[k];
    }
  }
  return total;
}

LossAndGradients loss_and_gradients(const Episode& episode, const ModelParams& params) {
  check_episode(episode);
  const Eigen::Index h = params.words.hidden_dim();
  LossAndGradients out{0.0, GradientSet(params.dims())};
  ModelParams& grad = out.gradients.tensors;

  for (const EpisodeStep& step : episode.steps) {
    LstmTrace word_trace, tag_trace;
    Vector g(4 * h);
    g.head(2 * h) = encode_words(step.state.word_prefix(), params.words, &word_trace);
    g.tail(2 * h) = encode_tag_indices(step.state.tags(), params.tags, &tag_trace);

    // Value head: (V - r)^2 with V = sigmoid(z).
    const double v = value_from_repr(g, params);
    const double err = v - episode.reward;
    out.loss += err * err;
    const double dz_value = 2.0 * err * v * (1.0 - v);
    grad.value_w += dz_value * g;
    grad.value_b += dz_value;
    Vector d_repr = dz_value * params.value_w;

    // Policy head: cross entropy against pi; d/dz_a = p(a) - pi(a).
    const std::vector<double> log_p = log_softmax(logits_for(g, step.actions, params));
    for (std::size_t k = 0; k < step.actions.size(); ++k) {
      const double pi = step.search_policy[k];
      if (pi > 0.0) out.loss -= pi * log_p[k];
      const double dz = std::exp(log_p[k]) - pi;
      const int a = step.actions[k];
      grad.policy_u.row(a) += dz * g.transpose();
      d_repr += dz * params.policy_u.row(a).transpose();
    }

    lstm_backward(word_trace, params.words, d_repr.segment(0, h), d_repr.segment(h, h),
                  grad.words);
    if (!tag_trace.steps.empty()) {
      lstm_backward(tag_trace, params.tags, d_repr.segment(2 * h, h),
                    d_repr.segment(3 * h, h), grad.tags);
    }
  }
  out.gradients.check_finite();
  return out;
}

GradientSet gradients(const Episode& episode, const ModelParams& params) {
  return loss_and_gradients(episode, params).gradients;
}

void adagrad_step(ModelParams& params, const GradientSet& grads, AdaGradState& opt,
                  double eta) {
  if (!(eta > 0.0)) throw ConfigError("learning rate must be positive");
  if (params.dims() != grads.tensors.dims() || params.dims() != opt.accumulator.dims()) {
    throw ConfigError("adagrad_step: shape mismatch");
  }
  std::vector<std::span<double>> p, acc;
  std::vector<std::span<const double>> g;
  params.for_each_tensor([&](const std::string&, auto d, auto, auto) { p.push_back(d); });
  opt.accumulator.for_each_tensor(
      [&](const std::string&, auto d, auto, auto) { acc.push_back(d); });
  grads.tensors.for_each_tensor(
      [&](const std::string&, auto d, auto, auto) { g.push_back(d); });
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t k = 0; k < p[t].size(); ++k) {
      const double gk = g[t][k];
      acc[t][k] += gk * gk;
      p[t][k] -= eta * gk / (std::sqrt(acc[t][k]) + opt.epsilon);
    }
  }
}

}  // namespace treetag
