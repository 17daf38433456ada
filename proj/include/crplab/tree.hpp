#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "crplab/partition.hpp"
#include "crplab/rng.hpp"

namespace crplab {

// Rooted tree without degree-2 vertices. The root has label 0 and a single
// child; leaves carry labels 1..n; internal vertices have label -1. At every
// vertex on the path from the root to leaf 1 the spinal child is stored last,
// preceded by the bush subtrees in left-to-right order.
class LabeledTree {
 public:
  struct Node {
    int parent = -1;
    std::vector<int> children;
    int label = -1;
  };

  static LabeledTree single_leaf();

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return 0; }
  int leaf_count() const { return leaves_; }
  int node_of_label(int label) const;
  // Root-to-leaf-1 path, root first.
  std::vector<int> spine() const;
  std::vector<int> subtree_leaf_counts() const;
  // Throws std::logic_error when an invariant fails.
  void validate() const;

  // Insertion sites and their growth weights.
  struct Site {
    enum Kind { Edge, Vertex } kind;
    int node;  // Edge: the lower endpoint; Vertex: the branch point
    double weight;
  };
  std::vector<Site> growth_sites(double alpha, double gamma) const;

  void insert_on_edge(int below);
  // Adds a leaf at branch point v; for spinal branch points `slot` is its
  // index among the bush subtrees, otherwise the leaf is appended.
  void insert_at_vertex(int v, std::size_t slot);
  // Deletes a leaf other than leaf 1; the largest label takes over its label.
  void delete_leaf(int label);

  nlohmann::json to_json() const;
  bool operator==(const LabeledTree&) const = default;

 private:
  int add_node(int parent, int label);
  void remove_node(int id);

  std::vector<Node> nodes_;
  int leaves_ = 0;
};

LabeledTree grow_tree(const LabeledTree& t, double alpha, double gamma, Rng& rng);
LabeledTree grow_tree_to(int n, double alpha, double gamma, Rng& rng);

struct TreeStep {
  LabeledTree tree;
  double holding_time;
  bool inserted;
};

TreeStep tree_updown_step(const LabeledTree& t, double alpha, double gamma, Rng& rng);

// (coarse, fine): bush sizes from leaf 1 towards the root, and subtree sizes
// within each bush in semi-planar order.
std::pair<Composition, Composition> spinal_decomposition(const LabeledTree& t);

}  // namespace crplab
