#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace beepsim {

// Undirected connected graph on nodes 0..n-1. Immutable after construction.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;        // sorted neighbor lists
  std::vector<std::pair<int, int>> edges;   // u < v, lexicographically sorted

  int degree(int u) const { return static_cast<int>(adj[u].size()); }
  bool has_edge(int u, int v) const;
  std::size_t edge_count() const { return edges.size(); }
};

// Builds and validates a graph from an edge list. Duplicate edges collapse;
// self-loops and disconnected inputs are rejected.
Graph make_graph(int n, std::vector<std::pair<int, int>> edge_list);

// Generator descriptors:
//   path:N  cycle:N  clique:N  grid:WxH  tree:N:SEED  gnp:N:P:SEED
// tree is a uniform random labeled tree; gnp resamples G(n,p) until
// connected (at most 1000 attempts). Seeded generators are deterministic
// in (descriptor, seed).
Graph generate(const std::string& spec);

// Parses lines "u v" of non-negative integers; node count = 1 + max index.
Graph load_edge_list(const std::string& text);

// One "u v" line per edge, u < v. load_edge_list(serialize_edge_list(g))
// reproduces g exactly.
std::string serialize_edge_list(const Graph& g);

// All-pairs hop distances, computed eagerly by BFS from every node.
struct DistanceTable {
  int n = 0;
  int diameter = 0;
  std::vector<int> dist;  // row-major n*n

  int operator()(int u, int v) const {
    return dist[static_cast<std::size_t>(u) * n + v];
  }
};

DistanceTable distances(const Graph& g);

}  // namespace beepsim
