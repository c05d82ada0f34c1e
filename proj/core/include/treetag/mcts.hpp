#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "treetag/mdp.hpp"

namespace treetag {

using ValueFn = std::function<double(const State&)>;
using PolicyFn = std::function<std::vector<double>(const State&, std::span<const int>)>;

struct SearchEdge {
  int action = 0;
  double prior = 0.0;  // P(s, a), fixed at expansion
  double q = 0.0;      // running mean of backed-up values
  int visits = 0;      // N(s, a)
  int child = -1;      // node index, -1 until first traversal
};

struct SearchNode {
  State state;
  std::vector<SearchEdge> edges;  // empty while unexpanded
  int evaluations = 0;            // times V was applied here

  explicit SearchNode(State s) : state(std::move(s)) {}
  bool is_terminal() const { return state.is_terminal(); }
  bool is_expanded() const { return !edges.empty(); }
  int total_visits() const;
};

struct SearchPolicy {
  std::vector<int> actions;
  std::vector<double> probs;  // aligned with actions

  // Index of the most probable action; ties go to the lowest tag index.
  std::size_t argmax() const;
};

struct SearchConfig {
  int simulations = 4000;  // K
  double exploration = 0.25;  // lambda
};

// argmax_a Q(s,a) + lambda * P(s,a) * sqrt(sum_b N(s,b)) / (1 + N(s,a)).
// Exact ties prefer the larger prior, then the earlier edge.
std::size_t select_child(const SearchNode& node, double lambda);

// Scores the leaf with V and, unless it is terminal, creates one edge per
// action with P = p(a|s), Q = 0, N = 0. Returns the value.
double expand_and_evaluate(SearchNode& leaf, const ActionSpace& space,
                           const ValueFn& value_fn, const PolicyFn& policy_fn);

// Q <- (Q * N + v) / (N + 1); N <- N + 1 along the traversed path.
void backup(std::span<SearchEdge* const> path, double v);

// pi(a) = N(root, a) / sum_b N(root, b).
SearchPolicy search_policy(const SearchNode& root);

// One search tree rooted at a non-terminal state. Node 0 is the root.
class SearchTree {
 public:
  SearchTree(State root, const ActionSpace& space, ValueFn value_fn, PolicyFn policy_fn);

  // Runs one select / evaluate-expand / backup iteration.
  void simulate(double lambda);
  void run(const SearchConfig& config);

  const SearchNode& root() const { return nodes_.front(); }
  const SearchNode& node(int index) const { return nodes_.at(index); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  SearchPolicy policy() const { return search_policy(root()); }

  // Keeps only the subtree below the root edge with the given action; the
  // child becomes the new root. The child is created and expanded if needed.
  void advance(int action);

  // One line per edge, depth-first: "<depth> <action> <P> <Q> <N>".
  void dump(std::ostream& out) const;

 private:
  int ensure_child(int node_index, std::size_t edge_index);

  const ActionSpace* space_;
  ValueFn value_fn_;
  PolicyFn policy_fn_;
  std::vector<SearchNode> nodes_;
};

// Fresh tree per call; K >= 2, lambda > 0, root non-terminal.
SearchPolicy tree_search(const State& root, const ActionSpace& space,
                         const ValueFn& value_fn, const PolicyFn& policy_fn,
                         const SearchConfig& config);

}  // namespace treetag
