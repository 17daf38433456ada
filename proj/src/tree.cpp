#include "crplab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace crplab {

LabeledTree LabeledTree::single_leaf() {
  LabeledTree t;
  t.add_node(-1, 0);
  t.add_node(0, 1);
  return t;
}

int LabeledTree::add_node(int parent, int label) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({parent, {}, label});
  if (parent >= 0) nodes_[parent].children.push_back(id);
  if (label > 0) ++leaves_;
  return id;
}

void LabeledTree::remove_node(int id) {
  // Moves the last node into slot `id`.
  if (nodes_[id].label > 0) --leaves_;
  const int last = static_cast<int>(nodes_.size()) - 1;
  if (id != last) {
    nodes_[id] = std::move(nodes_[last]);
    Node& n = nodes_[id];
    if (n.parent >= 0) std::replace(nodes_[n.parent].children.begin(), nodes_[n.parent].children.end(), last, id);
    for (int c : n.children) nodes_[c].parent = id;
  }
  nodes_.pop_back();
}

int LabeledTree::node_of_label(int label) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].label == label) return static_cast<int>(i);
  throw std::out_of_range("LabeledTree: no such label");
}

std::vector<int> LabeledTree::spine() const {
  std::vector<int> path;
  for (int v = node_of_label(1); v >= 0; v = nodes_[v].parent) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> LabeledTree::subtree_leaf_counts() const {
  std::vector<int> count(nodes_.size(), 0);
  std::function<int(int)> rec = [&](int v) {
    int s = nodes_[v].label > 0 ? 1 : 0;
    for (int c : nodes_[v].children) s += rec(c);
    return count[v] = s;
  };
  rec(root());
  return count;
}

void LabeledTree::validate() const {
  if (nodes_.empty() || nodes_[0].label != 0 || nodes_[0].parent != -1)
    throw std::logic_error("LabeledTree: bad root");
  if (nodes_[0].children.size() != 1) throw std::logic_error("LabeledTree: root must have degree 1");
  std::vector<int> seen(leaves_ + 1, 0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.parent < 0) throw std::logic_error("LabeledTree: orphan vertex");
    const auto& sib = nodes_[n.parent].children;
    if (std::count(sib.begin(), sib.end(), static_cast<int>(i)) != 1)
      throw std::logic_error("LabeledTree: parent does not list child");
    if (n.label > 0) {
      if (!n.children.empty()) throw std::logic_error("LabeledTree: labelled vertex with children");
      if (n.label > leaves_ || seen[n.label]++) throw std::logic_error("LabeledTree: labels are not 1..n");
    } else if (n.label == -1) {
      if (n.children.size() < 2) throw std::logic_error("LabeledTree: degree-2 vertex");
    } else {
      throw std::logic_error("LabeledTree: bad label");
    }
  }
  auto sp = spine();
  for (std::size_t i = 0; i + 1 < sp.size(); ++i)
    if (nodes_[sp[i]].children.back() != sp[i + 1]) throw std::logic_error("LabeledTree: spinal child not last");
}

std::vector<LabeledTree::Site> LabeledTree::growth_sites(double alpha, double gamma) const {
  std::vector<Site> sites;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const int v = static_cast<int>(i);
    if (n.label > 0) {
      sites.push_back({Site::Edge, v, 1.0 - alpha});
    } else {
      sites.push_back({Site::Edge, v, gamma});
      const double d = static_cast<double>(n.children.size()) + 1.0;
      sites.push_back({Site::Vertex, v, (d - 2.0) * alpha - gamma});
    }
  }
  return sites;
}

void LabeledTree::insert_on_edge(int below) {
  if (below <= 0 || below >= static_cast<int>(nodes_.size())) throw std::out_of_range("insert_on_edge: bad vertex");
  const int p = nodes_[below].parent;
  const int w = static_cast<int>(nodes_.size());
  nodes_.push_back({p, {}, -1});
  std::replace(nodes_[p].children.begin(), nodes_[p].children.end(), below, w);
  nodes_[below].parent = w;
  auto sp = spine();
  const bool spinal = std::find(sp.begin(), sp.end(), below) != sp.end();
  const int leaf = static_cast<int>(nodes_.size());
  nodes_.push_back({w, {}, leaves_ + 1});
  ++leaves_;
  nodes_[w].children = spinal ? std::vector<int>{leaf, below} : std::vector<int>{below, leaf};
}

void LabeledTree::insert_at_vertex(int v, std::size_t slot) {
  if (v <= 0 || v >= static_cast<int>(nodes_.size()) || nodes_[v].label != -1)
    throw std::out_of_range("insert_at_vertex: not a branch point");
  auto sp = spine();
  const bool spinal = std::find(sp.begin(), sp.end(), v) != sp.end();
  const int leaf = static_cast<int>(nodes_.size());
  nodes_.push_back({v, {}, leaves_ + 1});
  ++leaves_;
  auto& ch = nodes_[v].children;
  if (spinal) {
    const std::size_t bush = ch.size() - 1;
    if (slot > bush) throw std::out_of_range("insert_at_vertex: slot outside bush");
    ch.insert(ch.begin() + static_cast<std::ptrdiff_t>(slot), leaf);
  } else {
    ch.push_back(leaf);
  }
}

void LabeledTree::delete_leaf(int label) {
  if (label == 1) throw std::invalid_argument("delete_leaf: leaf 1 is never deleted");
  const int v = node_of_label(label);
  const int top = leaves_;
  const int p = nodes_[v].parent;
  auto& pc = nodes_[p].children;
  pc.erase(std::find(pc.begin(), pc.end(), v));
  remove_node(v);
  if (label != top) nodes_[node_of_label(top)].label = label;
  // The parent index may have moved if it was the last node.
  int parent = p == static_cast<int>(nodes_.size()) ? v : p;
  if (parent != root() && nodes_[parent].children.size() == 1) {
    const int g = nodes_[parent].parent;
    const int c = nodes_[parent].children[0];
    std::replace(nodes_[g].children.begin(), nodes_[g].children.end(), parent, c);
    nodes_[c].parent = g;
    nodes_[parent].children.clear();
    remove_node(parent);
  }
}

nlohmann::json LabeledTree::to_json() const {
  std::function<nlohmann::json(int)> rec = [&](int v) {
    nlohmann::json j;
    if (nodes_[v].label >= 0) j["label"] = nodes_[v].label;
    if (!nodes_[v].children.empty()) {
      j["children"] = nlohmann::json::array();
      for (int c : nodes_[v].children) j["children"].push_back(rec(c));
    }
    return j;
  };
  return rec(root());
}

LabeledTree grow_tree(const LabeledTree& t, double alpha, double gamma, Rng& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("grow_tree: alpha must lie in [0,1)");
  if (!(gamma >= 0.0 && gamma <= alpha)) throw std::invalid_argument("grow_tree: gamma must lie in [0, alpha]");
  auto sites = t.growth_sites(alpha, gamma);
  double total = 0.0;
  for (const auto& s : sites) total += s.weight;
  if (std::abs(total - (t.leaf_count() - alpha)) > 1e-9)
    throw std::logic_error("grow_tree: growth weights do not sum to k - alpha");
  double u = uniform01(rng) * total;
  const LabeledTree::Site* chosen = nullptr;
  for (const auto& s : sites) {
    if (s.weight <= 0.0) continue;
    chosen = &s;
    u -= s.weight;
    if (u < 0.0) break;
  }
  LabeledTree out = t;
  if (chosen->kind == LabeledTree::Site::Edge) {
    out.insert_on_edge(chosen->node);
  } else {
    const auto& n = t.nodes()[chosen->node];
    auto sp = t.spine();
    std::size_t slot = 0;
    if (std::find(sp.begin(), sp.end(), chosen->node) != sp.end()) {
      // Within a bush of c subtrees: leftmost 0, each inner gap alpha, rightmost alpha - gamma.
      const std::size_t c = n.children.size() - 1;
      const double bush_total = c * alpha - gamma;
      if (std::abs(bush_total - chosen->weight) > 1e-12)
        throw std::logic_error("grow_tree: bush weights do not match branch-point weight");
      double w = uniform01(rng) * bush_total;
      slot = c;
      for (std::size_t g = 1; g < c; ++g) {
        w -= alpha;
        if (w < 0.0) {
          slot = g;
          break;
        }
      }
    }
    out.insert_at_vertex(chosen->node, slot);
  }
  return out;
}

LabeledTree grow_tree_to(int n, double alpha, double gamma, Rng& rng) {
  LabeledTree t = LabeledTree::single_leaf();
  while (t.leaf_count() < n) t = grow_tree(t, alpha, gamma, rng);
  return t;
}

TreeStep tree_updown_step(const LabeledTree& t, double alpha, double gamma, Rng& rng) {
  const int k = t.leaf_count();
  const double up = k - alpha;
  const double down = k - 1;
  const double dt = exponential(rng, up + down);
  if (uniform01(rng) * (up + down) < up) return {grow_tree(t, alpha, gamma, rng), dt, true};
  std::uniform_int_distribution<int> pick(2, k);
  LabeledTree out = t;
  out.delete_leaf(pick(rng));
  return {std::move(out), dt, false};
}

std::pair<Composition, Composition> spinal_decomposition(const LabeledTree& t) {
  if (t.leaf_count() < 2) throw std::invalid_argument("spinal_decomposition: need at least two leaves");
  auto sp = t.spine();
  auto count = t.subtree_leaf_counts();
  std::vector<int> coarse, fine;
  // Spinal branch points from leaf 1 towards the root.
  for (std::size_t i = sp.size() - 1; i-- > 1;) {
    const auto& ch = t.nodes()[sp[i]].children;
    int bush = 0;
    for (std::size_t c = 0; c + 1 < ch.size(); ++c) {
      fine.push_back(count[ch[c]]);
      bush += count[ch[c]];
    }
    coarse.push_back(bush);
  }
  return {Composition(std::move(coarse)), Composition(std::move(fine))};
}

}  // namespace crplab
