#include "treetag/mcts.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "treetag/errors.hpp"

namespace treetag {

int SearchNode::total_visits() const {
  int total = 0;
  for (const SearchEdge& e : edges) total += e.visits;
  return total;
}

std::size_t SearchPolicy::argmax() const {
  if (probs.empty()) throw ContractViolation("argmax of an empty search policy");
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k) {
    if (probs[k] > probs[best] ||
        (probs[k] == probs[best] && actions[k] < actions[best])) {
      best = k;
    }
  }
  return best;
}

std::size_t select_child(const SearchNode& node, double lambda) {
  if (!node.is_expanded()) throw ContractViolation("select_child on an unexpanded node");
  const double sqrt_total = std::sqrt(static_cast<double>(node.total_visits()));
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t k = 0; k < node.edges.size(); ++k) {
    const SearchEdge& e = node.edges[k];
    const double score = e.q + lambda * e.prior * sqrt_total / (1.0 + e.visits);
    if (k == 0 || score > best_score ||
        (score == best_score && e.prior > node.edges[best].prior)) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

double expand_and_evaluate(SearchNode& leaf, const ActionSpace& space,
                           const ValueFn& value_fn, const PolicyFn& policy_fn) {
  if (leaf.is_expanded()) throw ContractViolation("expand_and_evaluate on an expanded node");
  const double v = value_fn(leaf.state);
  ++leaf.evaluations;
  if (leaf.is_terminal()) return v;

  const std::vector<int> actions = space.actions(leaf.state);
  if (actions.empty()) throw ContractViolation("non-terminal state without actions");
  const std::vector<double> priors = policy_fn(leaf.state, actions);
  if (priors.size() != actions.size()) {
    throw ContractViolation("policy returned " + std::to_string(priors.size()) +
                            " priors for " + std::to_string(actions.size()) + " actions");
  }
  leaf.edges.reserve(actions.size());
  for (std::size_t k = 0; k < actions.size(); ++k) {
    leaf.edges.push_back(SearchEdge{actions[k], priors[k], 0.0, 0, -1});
  }
  return v;
}

void backup(std::span<SearchEdge* const> path, double v) {
  if (!std::isfinite(v)) throw NumericError("backup of a non-finite value");
  for (SearchEdge* e : path) {
    e->q = (e->q * e->visits + v) / (e->visits + 1);
    ++e->visits;
  }
}

SearchPolicy search_policy(const SearchNode& root) {
  const int total = root.total_visits();
  if (!root.is_expanded() || total == 0) {
    throw ContractViolation("search_policy needs at least one root visit");
  }
  SearchPolicy pi;
  for (const SearchEdge& e : root.edges) {
    pi.actions.push_back(e.action);
    pi.probs.push_back(static_cast<double>(e.visits) / total);
  }
  return pi;
}

SearchTree::SearchTree(State root, const ActionSpace& space, ValueFn value_fn,
                       PolicyFn policy_fn)
    : space_(&space), value_fn_(std::move(value_fn)), policy_fn_(std::move(policy_fn)) {
  if (root.is_terminal()) throw ContractViolation("tree search from a terminal state");
  nodes_.emplace_back(std::move(root));
}

int SearchTree::ensure_child(int node_index, std::size_t edge_index) {
  SearchEdge& edge = nodes_[node_index].edges[edge_index];
  if (edge.child >= 0) return edge.child;
  State next = transition(nodes_[node_index].state, edge.action, *space_);
  const int child = static_cast<int>(nodes_.size());
  nodes_[node_index].edges[edge_index].child = child;
  nodes_.emplace_back(std::move(next));
  return child;
}

void SearchTree::simulate(double lambda) {
  std::vector<std::pair<int, std::size_t>> path;
  int current = 0;
  while (nodes_[current].is_expanded()) {
    const std::size_t k = select_child(nodes_[current], lambda);
    const int child = ensure_child(current, k);
    path.emplace_back(current, k);
    current = child;
  }
  const double v = expand_and_evaluate(nodes_[current], *space_, value_fn_, policy_fn_);
  std::vector<SearchEdge*> edges;
  edges.reserve(path.size());
  for (auto [node, k] : path) edges.push_back(&nodes_[node].edges[k]);
  backup(edges, v);
}

void SearchTree::run(const SearchConfig& config) {
  if (config.simulations < 2) {
    throw ConfigError("tree search needs K >= 2 (the first iteration only expands the root)");
  }
  if (!(config.exploration > 0.0)) throw ConfigError("lambda must be positive");
  for (int k = 0; k < config.simulations; ++k) simulate(config.exploration);
}

void SearchTree::advance(int action) {
  if (!root().is_expanded()) expand_and_evaluate(nodes_.front(), *space_, value_fn_, policy_fn_);
  std::size_t edge_index = root().edges.size();
  for (std::size_t k = 0; k < root().edges.size(); ++k) {
    if (root().edges[k].action == action) edge_index = k;
  }
  if (edge_index == root().edges.size()) {
    throw InputError("advance: action " + std::to_string(action) + " not at the root");
  }
  const int new_root = ensure_child(0, edge_index);
  if (nodes_[new_root].is_terminal()) {
    throw ContractViolation("advance into a terminal state");
  }

  // Copy the reachable subtree, renumbering breadth-first from the new root.
  std::vector<SearchNode> kept;
  std::vector<int> remap(nodes_.size(), -1);
  std::vector<int> order{new_root};
  remap[new_root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const SearchEdge& e : nodes_[order[i]].edges) {
      if (e.child >= 0) {
        remap[e.child] = static_cast<int>(order.size());
        order.push_back(e.child);
      }
    }
  }
  kept.reserve(order.size());
  for (int old : order) {
    kept.push_back(std::move(nodes_[old]));
    for (SearchEdge& e : kept.back().edges) {
      if (e.child >= 0) e.child = remap[e.child];
    }
  }
  nodes_ = std::move(kept);
}

void SearchTree::dump(std::ostream& out) const {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(6) << std::fixed;
  // Depth is bounded by the sentence length, so recursion is fine.
  auto visit = [&](auto& self, int index, int depth) -> void {
    for (const SearchEdge& e : nodes_[index].edges) {
      out << depth << ' ' << e.action << ' ' << e.prior << ' ' << e.q << ' ' << e.visits
          << '\n';
      if (e.child >= 0) self(self, e.child, depth + 1);
    }
  };
  visit(visit, 0, 0);
  out.flags(flags);
  out.precision(prec);
}

SearchPolicy tree_search(const State& root, const ActionSpace& space,
                         const ValueFn& value_fn, const PolicyFn& policy_fn,
                         const SearchConfig& config) {
  SearchTree tree(root, space, value_fn, policy_fn);
  tree.run(config);
  return tree.policy();
}

}  // namespace treetag
