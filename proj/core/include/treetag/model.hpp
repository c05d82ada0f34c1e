#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treetag/lstm.hpp"
#include "treetag/mdp.hpp"

namespace treetag {

struct ModelDims {
  int embedding_dim = 0;  // L
  int hidden = 0;         // h
  int num_tags = 0;       // |Y|

  void validate() const;
  bool operator==(const ModelDims&) const = default;
};

// Every trainable tensor. g(s) = [h_X; c_X; h_Y; c_Y] has length 4h, so
// value_w has 4h entries and policy_u is |Y| x 4h.
struct ModelParams {
  LstmParams words;  // input dim L
  LstmParams tags;   // input dim |Y|
  Vector value_w;
  double value_b = 0.0;
  Matrix policy_u;

  ModelParams() = default;
  explicit ModelParams(const ModelDims& dims);  // all zeros

  ModelDims dims() const;
  int repr_dim() const { return static_cast<int>(4 * words.hidden_dim()); }
  void validate() const;

  // Visits every tensor as (name, flat storage, rows, cols). value_b is
  // presented as a 1x1 tensor.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) { visit(*this, fn); }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const { visit(*this, fn); }

  std::size_t num_scalars() const;
  bool operator==(const ModelParams& other) const;

 private:
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn& fn) {
    auto lstm = [&fn](const std::string& prefix, auto& p) {
      p.for_each_tensor([&](const char* name, auto& t) {
        fn(prefix + name, std::span(t.data(), static_cast<std::size_t>(t.size())),
           t.rows(), t.cols());
      });
    };
    lstm("words.", self.words);
    lstm("tags.", self.tags);
    fn(std::string("value_w"),
       std::span(self.value_w.data(), static_cast<std::size_t>(self.value_w.size())),
       self.value_w.rows(), self.value_w.cols());
    fn(std::string("value_b"), std::span(&self.value_b, 1), Eigen::Index{1},
       Eigen::Index{1});
    fn(std::string("policy_u"),
       std::span(self.policy_u.data(), static_cast<std::size_t>(self.policy_u.size())),
       self.policy_u.rows(), self.policy_u.cols());
  }
};

// Loss gradient, shape-congruent with ModelParams.
struct GradientSet {
  ModelParams tensors;

  GradientSet() = default;
  explicit GradientSet(const ModelDims& dims) : tensors(dims) {}

  double squared_norm() const;
  void scale(double factor);
  // Rescales so the global L2 norm is at most max_norm; returns the pre-clip norm.
  double clip_norm(double max_norm);
  // Throws NumericError naming the first tensor holding a NaN or infinity.
  void check_finite() const;
};

struct AdaGradState {
  ModelParams accumulator;
  double epsilon = 1e-8;

  AdaGradState() = default;
  explicit AdaGradState(const ModelDims& dims, double eps = 1e-8)
      : accumulator(dims), epsilon(eps) {}
};

enum class InitScheme {
  kUnit,    // U[-1, 1]
  kScaled,  // U[-1/sqrt(h), 1/sqrt(h)]
};

ModelParams init_params(std::uint64_t seed, const ModelDims& dims,
                        InitScheme scheme = InitScheme::kUnit);

Vector state_repr(const State& s, const ModelParams& params);

double value_from_repr(const Vector& repr, const ModelParams& params);
std::vector<double> policy_from_repr(const Vector& repr, std::span<const int> actions,
                                     const ModelParams& params);

// sigmoid(<w, g(s)> + b)
double value(const State& s, const ModelParams& params);

// Softmax over the bilinear logits phi(a)^T U_p g(s), restricted to actions.
std::vector<double> policy(const State& s, std::span<const int> actions,
                           const ModelParams& params);

// sum_t (V(s_t) - r)^2 + sum_a pi_t(a) log(1 / p(a|s_t))
double loss(const Episode& episode, const ModelParams& params);

struct LossAndGradients {
  double loss = 0.0;
  GradientSet gradients;
};

// Exact gradient of loss() by backpropagation through both LSTMs. The search
// policies and the reward are treated as constants.
LossAndGradients loss_and_gradients(const Episode& episode, const ModelParams& params);
GradientSet gradients(const Episode& episode, const ModelParams& params);

// accumulator += g^2; param -= eta * g / (sqrt(accumulator) + epsilon)
void adagrad_step(ModelParams& params, const GradientSet& grads, AdaGradState& opt,
                  double eta);

}  // namespace treetag
