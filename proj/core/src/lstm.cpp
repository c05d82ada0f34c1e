#include "treetag/lstm.hpp"

#include <string>

#include "treetag/errors.hpp"

namespace treetag {
namespace {

Vector sigmoid(const Vector& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Vector tanh_vec(const Vector& a) {
  return a.unaryExpr([](double v) { return std::tanh(v); });
}

}  // namespace

LstmParams::LstmParams(Eigen::Index input_dim, Eigen::Index hidden_dim) {
  if (input_dim <= 0 || hidden_dim <= 0) {
    throw ConfigError("LSTM dimensions must be positive");
  }
  for (Matrix* w : {&w_forget, &w_input, &w_output, &w_cell}) {
    w->setZero(hidden_dim, input_dim);
  }
  for (Matrix* u : {&u_forget, &u_input, &u_output, &u_cell}) {
    u->setZero(hidden_dim, hidden_dim);
  }
  for (Vector* b : {&b_forget, &b_input, &b_output, &b_cell}) {
    b->setZero(hidden_dim);
  }
}

void LstmParams::validate() const {
  const Eigen::Index h = hidden_dim();
  const Eigen::Index d = input_dim();
  if (h <= 0 || d <= 0) throw ConfigError("LSTM dimensions must be positive");
  for (const Matrix* w : {&w_forget, &w_input, &w_output, &w_cell}) {
    if (w->rows() != h || w->cols() != d) {
      throw ConfigError("LSTM input weight shape mismatch");
    }
  }
  for (const Matrix* u : {&u_forget, &u_input, &u_output, &u_cell}) {
    if (u->rows() != h || u->cols() != h) {
      throw ConfigError("LSTM recurrent weight shape mismatch");
    }
  }
  for (const Vector* b : {&b_forget, &b_input, &b_output, &b_cell}) {
    if (b->size() != h) throw ConfigError("LSTM bias shape mismatch");
  }
}

LstmStep lstm_cell_forward(const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, const LstmParams& params) {
  const Eigen::Index h = params.hidden_dim();
  if (x.size() != params.input_dim()) {
    throw ConfigError("LSTM input has dimension " + std::to_string(x.size()) +
                      ", expected " + std::to_string(params.input_dim()));
  }
  if (h_prev.size() != h || c_prev.size() != h) {
    throw ConfigError("LSTM recurrent state dimension mismatch");
  }

  LstmStep s;
  s.x = x;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.forget = sigmoid(params.w_forget * x + params.u_forget * h_prev + params.b_forget);
  s.input = sigmoid(params.w_input * x + params.u_input * h_prev + params.b_input);
  s.output = sigmoid(params.w_output * x + params.u_output * h_prev + params.b_output);
  s.candidate = tanh_vec(params.w_cell * x + params.u_cell * h_prev + params.b_cell);
  s.c = s.forget.cwiseProduct(c_prev) + s.input.cwiseProduct(s.candidate);
  s.tanh_c = tanh_vec(s.c);
  s.h = s.output.cwiseProduct(s.tanh_c);
  return s;
}

LstmTrace lstm_unroll(std::span<const Vector> inputs, const LstmParams& params) {
  LstmTrace trace;
  trace.steps.reserve(inputs.size());
  Vector h = Vector::Zero(params.hidden_dim());
  Vector c = Vector::Zero(params.hidden_dim());
  for (const Vector& x : inputs) {
    trace.steps.push_back(lstm_cell_forward(x, h, c, params));
    h = trace.steps.back().h;
    c = trace.steps.back().c;
  }
  return trace;
}

namespace {

Vector final_state(const LstmTrace& trace, Eigen::Index hidden) {
  Vector out = Vector::Zero(2 * hidden);
  if (!trace.steps.empty()) {
    out.head(hidden) = trace.steps.back().h;
    out.tail(hidden) = trace.steps.back().c;
  }
  return out;
}

}  // namespace

Vector encode_words(std::span<const Vector> prefix, const LstmParams& params,
                    LstmTrace* trace) {
  if (prefix.empty()) {
    throw ContractViolation("encode_words: word prefix must be nonempty");
  }
  LstmTrace local = lstm_unroll(prefix, params);
  Vector out = final_state(local, params.hidden_dim());
  if (trace != nullptr) *trace = std::move(local);
  return out;
}

Vector encode_tags(std::span<const Vector> one_hots, const LstmParams& params,
                   LstmTrace* trace) {
  for (const Vector& v : one_hots) {
    if (v.size() != params.input_dim()) {
      throw ConfigError("tag one-hot has arity " + std::to_string(v.size()) +
                        ", expected " + std::to_string(params.input_dim()));
    }
  }
  LstmTrace local = lstm_unroll(one_hots, params);
  Vector out = final_state(local, params.hidden_dim());
  if (trace != nullptr) *trace = std::move(local);
  return out;
}

Vector one_hot(int index, Eigen::Index arity) {
  if (index < 0 || index >= arity) {
    throw ConfigError("tag index " + std::to_string(index) +
                      " outside inventory of size " + std::to_string(arity));
  }
  Vector v = Vector::Zero(arity);
  v[index] = 1.0;
  return v;
}

Vector encode_tag_indices(std::span<const int> tags, const LstmParams& params,
                          LstmTrace* trace) {
  std::vector<Vector> one_hots;
  one_hots.reserve(tags.size());
  for (int t : tags) one_hots.push_back(one_hot(t, params.input_dim()));
  return encode_tags(one_hots, params, trace);
}

void lstm_backward(const LstmTrace& trace, const LstmParams& params,
                   const Vector& d_h, const Vector& d_c, LstmParams& grads) {
  Vector dh = d_h;
  Vector dc = d_c;
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    const LstmStep& s = *it;
    // h = o * tanh(c)
    const Vector d_out = dh.cwiseProduct(s.tanh_c);
    const Vector dc_total =
        dc + dh.cwiseProduct(s.output).cwiseProduct(
                 (1.0 - s.tanh_c.array().square()).matrix());
    // c = f * c_prev + i * candidate
    const Vector d_forget = dc_total.cwiseProduct(s.c_prev);
    const Vector d_input = dc_total.cwiseProduct(s.candidate);
    const Vector d_cand = dc_total.cwiseProduct(s.input);

    const Vector da_f =
        d_forget.array() * s.forget.array() * (1.0 - s.forget.array());
    const Vector da_i = d_input.array() * s.input.array() * (1.0 - s.input.array());
    const Vector da_o =
        d_out.array() * s.output.array() * (1.0 - s.output.array());
    const Vector da_c = d_cand.array() * (1.0 - s.candidate.array().square());

    grads.w_forget.noalias() += da_f * s.x.transpose();
    grads.w_input.noalias() += da_i * s.x.transpose();
    grads.w_output.noalias() += da_o * s.x.transpose();
    grads.w_cell.noalias() += da_c * s.x.transpose();
    grads.u_forget.noalias() += da_f * s.h_prev.transpose();
    grads.u_input.noalias() += da_i * s.h_prev.transpose();
    grads.u_output.noalias() += da_o * s.h_prev.transpose();
    grads.u_cell.noalias() += da_c * s.h_prev.transpose();
    grads.b_forget += da_f;
    grads.b_input += da_i;
    grads.b_output += da_o;
    grads.b_cell += da_c;

    dh = params.u_forget.transpose() * da_f + params.u_input.transpose() * da_i +
         params.u_output.transpose() * da_o + params.u_cell.transpose() * da_c;
    dc = dc_total.cwiseProduct(s.forget);
  }
}

}  // namespace treetag
