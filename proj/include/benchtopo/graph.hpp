#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "benchtopo/metrics.hpp"
#include "benchtopo/records.hpp"

namespace benchtopo {

enum class NodeKind { Benchmark, Author, Institution };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Benchmark: return "benchmark";
    case NodeKind::Author: return "author";
    default: return "institution";
  }
}

inline NodeKind node_kind_from(std::string_view s) {
  if (s == "benchmark") return NodeKind::Benchmark;
  if (s == "author") return NodeKind::Author;
  if (s == "institution") return NodeKind::Institution;
  throw std::invalid_argument("unknown node kind: '" + std::string(s) + "'");
}

struct EcoNode {
  std::uint32_t id = 0;
  NodeKind kind = NodeKind::Benchmark;
  std::string label;
};

/// Adjacency-list representation shared by the graph algorithms below.
/// Neighbor lists are sorted and deduplicated.
using AdjacencyList = std::vector<std::vector<std::uint32_t>>;

// ---------------------------------------------------------------------------
// Kind-agnostic graph algorithms. The tripartite operations delegate here;
// the functions also serve as the general-purpose layer for closed-form
// checks on graphs (cliques, odd cycles) that the tripartite edge schema
// cannot represent.
// ---------------------------------------------------------------------------
namespace graphalg {

inline std::size_t edge_count(const AdjacencyList& adj) {
  std::size_t twice = 0;
  for (const auto& n : adj) twice += n.size();
  return twice / 2;
}

/// deg(v) / (N - 1) for every node.
inline std::vector<double> degree_centrality(const AdjacencyList& adj) {
  const std::size_t n = adj.size();
  if (n < 2) throw std::invalid_argument("degree_centrality: need at least 2 nodes");
  std::vector<double> out(n);
  for (std::size_t v = 0; v < n; ++v)
    out[v] = static_cast<double>(adj[v].size()) / static_cast<double>(n - 1);
  return out;
}

/// Iterative peeling: flags the nodes of the maximal subgraph with minimum
/// internal degree k.
inline std::vector<bool> k_core_membership(const AdjacencyList& adj, std::size_t k) {
  const std::size_t n = adj.size();
  std::vector<std::size_t> deg(n);
  std::vector<bool> alive(n, true);
  std::deque<std::uint32_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    deg[v] = adj[v].size();
    if (deg[v] < k) {
      alive[v] = false;
      queue.push_back(static_cast<std::uint32_t>(v));
    }
  }
  while (!queue.empty()) {
    std::uint32_t v = queue.front();
    queue.pop_front();
    for (std::uint32_t w : adj[v]) {
      if (!alive[w]) continue;
      if (--deg[w] < k) {
        alive[w] = false;
        queue.push_back(w);
      }
    }
  }
  return alive;
}

/// Restrict `alive` to its largest connected component (ties resolved
/// toward the component discovered first in node-id order).
inline std::vector<bool> largest_component(const AdjacencyList& adj, std::vector<bool> alive) {
  const std::size_t n = adj.size();
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::uint32_t> stack;
  int n_comp = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!alive[s] || comp[s] >= 0) continue;
    comp[s] = n_comp;
    comp_size.push_back(0);
    stack.push_back(s);
    while (!stack.empty()) {
      std::uint32_t v = stack.back();
      stack.pop_back();
      ++comp_size[n_comp];
      for (std::uint32_t w : adj[v])
        if (alive[w] && comp[w] < 0) {
          comp[w] = n_comp;
          stack.push_back(w);
        }
    }
    ++n_comp;
  }
  int best = -1;
  std::size_t best_size = 0;
  for (int c = 0; c < n_comp; ++c)
    if (comp_size[c] > best_size) {
      best = c;
      best_size = comp_size[c];
    }
  for (std::size_t v = 0; v < n; ++v) alive[v] = alive[v] && comp[v] == best;
  return alive;
}

/// Brandes shortest-path betweenness, normalized by (N-1)(N-2)/2 for
/// undirected graphs; endpoints excluded, disconnected pairs contribute
/// zero. Accumulation runs in node-id order, so results are reproducible
/// bit for bit.
inline std::vector<double> betweenness(const AdjacencyList& adj) {
  const std::size_t n = adj.size();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;
  std::vector<std::int64_t> dist(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<std::uint32_t>> pred(n);
  std::vector<std::uint32_t> order;
  order.reserve(n);
  for (std::uint32_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : pred) p.clear();
    order.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    std::deque<std::uint32_t> queue{s};
    while (!queue.empty()) {
      std::uint32_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (std::uint32_t w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::uint32_t w = *it;
      for (std::uint32_t v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both endpoints.
  const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (auto& v : bc) v /= norm;
  return bc;
}

}  // namespace graphalg

/// Undirected graph over {Benchmark, Author, Institution} nodes. Only
/// Benchmark-Author and Author-Institution edges are representable; any
/// other pairing throws on insertion. Nodes are interned by (kind, label),
/// so ids are stable for identical insertion sequences. No self-loops, no
/// duplicate edges.
class TripartiteGraph {
 public:
  std::uint32_t add_node(NodeKind kind, const std::string& label) {
    auto key = std::make_pair(static_cast<int>(kind), label);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({id, kind, label});
    adj_.emplace_back();
    index_.emplace(std::move(key), id);
    return id;
  }

  /// Returns false if the edge already exists.
  bool add_edge(std::uint32_t u, std::uint32_t v) {
    if (u >= nodes_.size() || v >= nodes_.size())
      throw std::invalid_argument("add_edge: node id out of range");
    if (u == v) throw std::invalid_argument("add_edge: self-loop");
    NodeKind ku = nodes_[u].kind, kv = nodes_[v].kind;
    bool ok = (ku == NodeKind::Benchmark && kv == NodeKind::Author) ||
              (ku == NodeKind::Author && kv == NodeKind::Benchmark) ||
              (ku == NodeKind::Author && kv == NodeKind::Institution) ||
              (ku == NodeKind::Institution && kv == NodeKind::Author);
    if (!ok)
      throw std::invalid_argument("add_edge: only benchmark-author and author-institution "
                                  "edges are allowed");
    auto& nu = adj_[u];
    auto pos = std::lower_bound(nu.begin(), nu.end(), v);
    if (pos != nu.end() && *pos == v) return false;
    nu.insert(pos, v);
    auto& nv = adj_[v];
    nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
    ++edge_count_;
    return true;
  }

  std::optional<std::uint32_t> find(NodeKind kind, const std::string& label) const {
    auto it = index_.find(std::make_pair(static_cast<int>(kind), label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<EcoNode>& nodes() const { return nodes_; }
  const EcoNode& node(std::uint32_t id) const { return nodes_.at(id); }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t id) const { return adj_.at(id); }
  std::size_t degree(std::uint32_t id) const { return adj_.at(id).size(); }
  const AdjacencyList& adjacency() const { return adj_; }

  /// Subgraph induced by `keep`, preserving (kind, label), new ids in
  /// old-id order.
  TripartiteGraph induced_subgraph(const std::vector<bool>& keep) const {
    TripartiteGraph out;
    std::vector<std::uint32_t> remap(nodes_.size(), 0);
    for (std::uint32_t v = 0; v < nodes_.size(); ++v)
      if (keep[v]) remap[v] = out.add_node(nodes_[v].kind, nodes_[v].label);
    for (std::uint32_t v = 0; v < nodes_.size(); ++v) {
      if (!keep[v]) continue;
      for (std::uint32_t w : adj_[v])
        if (keep[w] && v < w) out.add_edge(remap[v], remap[w]);
    }
    return out;
  }

 private:
  std::vector<EcoNode> nodes_;
  AdjacencyList adj_;
  std::map<std::pair<int, std::string>, std::uint32_t> index_;
  std::size_t edge_count_ = 0;
};

/// Project records onto the tripartite graph: one benchmark node per
/// record, one author node per distinct author name, one institution node
/// per distinct institution name; benchmark-author edges from authorship
/// and author-institution edges from distinct affiliation pairs. Author
/// identity is the exact name string (no alias resolution).
inline TripartiteGraph build_graph(std::span<const BenchmarkRecord> records) {
  if (records.empty()) throw std::invalid_argument("build_graph: no records");
  TripartiteGraph g;
  std::set<std::string> seen_ids;
  for (const auto& rec : records) {
    if (!seen_ids.insert(rec.id).second)
      throw std::invalid_argument("build_graph: duplicate record id '" + rec.id + "'");
    if (g.find(NodeKind::Benchmark, rec.name))
      throw std::invalid_argument("build_graph: duplicate benchmark label '" + rec.name + "'");
    std::uint32_t b = g.add_node(NodeKind::Benchmark, rec.name);
    std::set<std::string> listed(rec.authors.begin(), rec.authors.end());
    for (const auto& author : rec.authors) {
      std::uint32_t a = g.add_node(NodeKind::Author, author);
      g.add_edge(b, a);
    }
    for (const auto& aff : rec.affiliations) {
      if (!listed.count(aff.author))
        throw std::invalid_argument("build_graph: affiliation references unlisted author '" +
                                    aff.author + "' on record '" + rec.id + "'");
      if (aff.institution.empty()) continue;
      std::uint32_t a = g.add_node(NodeKind::Author, aff.author);
      std::uint32_t i = g.add_node(NodeKind::Institution, aff.institution);
      g.add_edge(a, i);
    }
  }
  return g;
}

inline std::vector<double> degree_centrality(const TripartiteGraph& g) {
  return graphalg::degree_centrality(g.adjacency());
}

/// Maximal subgraph in which every node has internal degree >= k
/// (no component extraction).
inline TripartiteGraph k_core_subgraph(const TripartiteGraph& g, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k_core: k must be >= 1");
  return g.induced_subgraph(graphalg::k_core_membership(g.adjacency(), k));
}

/// The largest connected component of the k-core. May be empty.
inline TripartiteGraph k_core(const TripartiteGraph& g, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k_core: k must be >= 1");
  return g.induced_subgraph(graphalg::largest_component(
      g.adjacency(), graphalg::k_core_membership(g.adjacency(), k)));
}

inline std::vector<double> betweenness(const TripartiteGraph& g) {
  return graphalg::betweenness(g.adjacency());
}

/// Gini coefficient of the degree-centrality distribution, over all nodes
/// by default or restricted to one node kind.
inline double degree_gini(const TripartiteGraph& g,
                          std::optional<NodeKind> kind = std::nullopt) {
  if (g.edge_count() == 0) throw std::invalid_argument("degree_gini: graph has no edges");
  auto c = degree_centrality(g);
  if (!kind) return gini(c);
  std::vector<double> filtered;
  for (const auto& n : g.nodes())
    if (n.kind == *kind) filtered.push_back(c[n.id]);
  if (filtered.empty())
    throw std::invalid_argument("degree_gini: no nodes of the requested kind");
  return gini(filtered);
}

/// One line per edge: `kind:label<TAB>kind:label`, LF endings, lines and
/// endpoints ordered deterministically (benchmark < author < institution).
inline void write_edge_list(const TripartiteGraph& g, std::ostream& os) {
  std::vector<std::string> lines;
  lines.reserve(g.edge_count());
  auto fmt = [&](const EcoNode& n) {
    if (n.label.find_first_of("\t\n\r") != std::string::npos)
      throw std::invalid_argument("edge list: label contains tab or newline: '" + n.label + "'");
    return std::string(to_string(n.kind)) + ":" + n.label;
  };
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    for (std::uint32_t w : g.neighbors(v)) {
      if (v >= w) continue;
      const EcoNode &a = g.node(v), &b = g.node(w);
      const EcoNode &first = a.kind < b.kind ? a : b, &second = a.kind < b.kind ? b : a;
      lines.push_back(fmt(first) + "\t" + fmt(second));
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << '\n';
}

inline TripartiteGraph read_edge_list(std::istream& is) {
  TripartiteGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("edge list line " + std::to_string(lineno) + ": missing tab");
    auto parse_node = [&](std::string_view tok) {
      auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw std::runtime_error("edge list line " + std::to_string(lineno) +
                                 ": missing kind prefix");
      NodeKind kind = node_kind_from(tok.substr(0, colon));
      return g.add_node(kind, std::string(tok.substr(colon + 1)));
    };
    std::uint32_t u = parse_node(std::string_view(line).substr(0, tab));
    std::uint32_t v = parse_node(std::string_view(line).substr(tab + 1));
    g.add_edge(u, v);
  }
  return g;
}

}  // namespace benchtopo
