#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace treetag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One unidirectional LSTM layer. Gate order everywhere is forget, input,
// output, cell candidate.
struct LstmParams {
  Matrix w_forget, w_input, w_output, w_cell;  // hidden x input
  Matrix u_forget, u_input, u_output, u_cell;  // hidden x hidden
  Vector b_forget, b_input, b_output, b_cell;  // hidden

  LstmParams() = default;
  LstmParams(Eigen::Index input_dim, Eigen::Index hidden_dim);

  Eigen::Index input_dim() const { return w_forget.cols(); }
  Eigen::Index hidden_dim() const { return w_forget.rows(); }

  // Throws ConfigError unless all twelve tensors agree on (hidden, input).
  void validate() const;

  template <typename Fn>
  void for_each_tensor(Fn&& fn) { visit(*this, fn); }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const { visit(*this, fn); }

 private:
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn& fn) {
    fn("w_forget", self.w_forget); fn("w_input", self.w_input);
    fn("w_output", self.w_output); fn("w_cell", self.w_cell);
    fn("u_forget", self.u_forget); fn("u_input", self.u_input);
    fn("u_output", self.u_output); fn("u_cell", self.u_cell);
    fn("b_forget", self.b_forget); fn("b_input", self.b_input);
    fn("b_output", self.b_output); fn("b_cell", self.b_cell);
  }
};

// Activations of one cell application, kept for the backward pass.
struct LstmStep {
  Vector x, h_prev, c_prev;
  Vector forget, input, output, candidate;  // gate activations; candidate = tanh(.)
  Vector c, tanh_c, h;
};

struct LstmTrace {
  std::vector<LstmStep> steps;
};

LstmStep lstm_cell_forward(const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, const LstmParams& params);

// Unrolls the cell from zero state. An empty input yields an empty trace.
LstmTrace lstm_unroll(std::span<const Vector> inputs, const LstmParams& params);

// [h_t; c_t] after the whole word prefix. The prefix must be nonempty.
Vector encode_words(std::span<const Vector> prefix, const LstmParams& params,
                    LstmTrace* trace = nullptr);

// Same as encode_words over one-hot tag vectors; the empty prefix encodes to
// zeros. Each vector must have arity params.input_dim().
Vector encode_tags(std::span<const Vector> one_hots, const LstmParams& params,
                   LstmTrace* trace = nullptr);

// Index form of encode_tags.
Vector encode_tag_indices(std::span<const int> tags, const LstmParams& params,
                          LstmTrace* trace = nullptr);

Vector one_hot(int index, Eigen::Index arity);

// Backpropagation through time. d_h / d_c are the loss gradients at the last
// step's outputs; parameter gradients are accumulated into grads.
void lstm_backward(const LstmTrace& trace, const LstmParams& params,
                   const Vector& d_h, const Vector& d_c, LstmParams& grads);

}  // namespace treetag
