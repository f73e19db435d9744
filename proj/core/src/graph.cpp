#include "beepsim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "beepsim/rng.hpp"

namespace beepsim {

namespace {

constexpr int kGnpRetryCap = 1000;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

bool connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == n;
}

long parse_long(std::string_view s, const std::string& what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail("graph spec: bad " + what + " '" + std::string(s) + "'");
  }
  return value;
}

double parse_double(std::string_view s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double value = std::stod(std::string(s), &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    fail("graph spec: bad " + what + " '" + std::string(s) + "'");
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

// Prufer decoding: uniform over labeled trees on n >= 2 nodes.
std::vector<std::pair<int, int>> random_tree_edges(int n, std::uint64_t seed) {
  std::vector<std::pair<int, int>> edges;
  if (n < 2) return edges;
  if (n == 2) return {{0, 1}};
  Rng rng(seed);
  std::vector<int> prufer(n - 2);
  for (auto& x : prufer) x = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
  std::vector<int> degree(n, 1);
  for (int x : prufer) ++degree[x];
  std::set<int> leaves;
  for (int v = 0; v < n; ++v)
    if (degree[v] == 1) leaves.insert(v);
  for (int x : prufer) {
    int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.emplace_back(leaf, x);
    if (--degree[x] == 1) leaves.insert(x);
  }
  int a = *leaves.begin();
  int b = *std::next(leaves.begin());
  edges.emplace_back(a, b);
  return edges;
}

}  // namespace

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= n || v >= n) return false;
  return std::binary_search(adj[u].begin(), adj[u].end(), v);
}

Graph make_graph(int n, std::vector<std::pair<int, int>> edge_list) {
  if (n < 1) fail("graph must have at least one node");
  std::set<std::pair<int, int>> dedup;
  for (auto [u, v] : edge_list) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      fail("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range for n=" +
           std::to_string(n));
    }
    if (u == v) fail("self-loop at node " + std::to_string(u));
    dedup.emplace(std::min(u, v), std::max(u, v));
  }
  Graph g;
  g.n = n;
  g.edges.assign(dedup.begin(), dedup.end());
  g.adj.assign(n, {});
  for (auto [u, v] : g.edges) {
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
  if (!connected(n, g.adj)) fail("graph is disconnected");
  return g;
}

Graph generate(const std::string& spec) {
  auto parts = split(spec, ':');
  const std::string kind(parts[0]);

  auto expect_arity = [&](std::size_t arity) {
    if (parts.size() != arity) fail("graph spec '" + spec + "': wrong number of fields");
  };

  if (kind == "path" || kind == "cycle" || kind == "clique") {
    expect_arity(2);
    long n = parse_long(parts[1], "node count");
    if (n < 1) fail("graph spec '" + spec + "': node count must be >= 1");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    if (kind == "cycle" && n >= 3) edges.emplace_back(static_cast<int>(n) - 1, 0);
    if (kind == "clique") {
      edges.clear();
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    }
    return make_graph(static_cast<int>(n), std::move(edges));
  }

  if (kind == "grid") {
    expect_arity(2);
    auto dims = split(parts[1], 'x');
    if (dims.size() != 2) fail("graph spec '" + spec + "': grid wants WxH");
    long w = parse_long(dims[0], "grid width");
    long h = parse_long(dims[1], "grid height");
    if (w < 1 || h < 1) fail("graph spec '" + spec + "': grid dimensions must be >= 1");
    std::vector<std::pair<int, int>> edges;
    auto id = [w](long r, long c) { return static_cast<int>(r * w + c); };
    for (long r = 0; r < h; ++r)
      for (long c = 0; c < w; ++c) {
        if (c + 1 < w) edges.emplace_back(id(r, c), id(r, c + 1));
        if (r + 1 < h) edges.emplace_back(id(r, c), id(r + 1, c));
      }
    return make_graph(static_cast<int>(w * h), std::move(edges));
  }

  if (kind == "tree") {
    expect_arity(3);
    long n = parse_long(parts[1], "node count");
    if (n < 1) fail("graph spec '" + spec + "': node count must be >= 1");
    std::uint64_t seed = static_cast<std::uint64_t>(parse_long(parts[2], "seed"));
    return make_graph(static_cast<int>(n), random_tree_edges(static_cast<int>(n), seed));
  }

  if (kind == "gnp") {
    expect_arity(4);
    long n = parse_long(parts[1], "node count");
    if (n < 1) fail("graph spec '" + spec + "': node count must be >= 1");
    double p = parse_double(parts[2], "edge probability");
    if (p < 0.0 || p > 1.0) fail("graph spec '" + spec + "': edge probability outside [0,1]");
    std::uint64_t seed = static_cast<std::uint64_t>(parse_long(parts[3], "seed"));
    // Resampling keeps the G(n,p) law conditioned on connectivity.
    for (int attempt = 0; attempt < kGnpRetryCap; ++attempt) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng.u01() < p) edges.emplace_back(i, j);
      try {
        return make_graph(static_cast<int>(n), std::move(edges));
      } catch (const std::invalid_argument&) {
        // disconnected sample; try again
      }
    }
    fail("graph spec '" + spec + "': no connected sample in " +
         std::to_string(kGnpRetryCap) + " attempts");
  }

  fail("graph spec '" + spec + "': unknown generator '" + kind + "'");
}

Graph load_edge_list(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  int max_node = -1;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long u = 0, v = 0;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra) || u < 0 || v < 0) {
      fail("edge list parse error at line " + std::to_string(line_no) + ": '" + line + "'");
    }
    if (u == v) {
      fail("edge list self-loop at line " + std::to_string(line_no) + ": node " +
           std::to_string(u));
    }
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    max_node = std::max(max_node, static_cast<int>(std::max(u, v)));
  }
  if (edges.empty()) fail("edge list parse error: no edges");
  // make_graph reports disconnection; self-loops already rejected above.
  return make_graph(max_node + 1, std::move(edges));
}

std::string serialize_edge_list(const Graph& g) {
  std::string out;
  for (auto [u, v] : g.edges) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

DistanceTable distances(const Graph& g) {
  DistanceTable table;
  table.n = g.n;
  table.dist.assign(static_cast<std::size_t>(g.n) * g.n, -1);
  std::vector<int> queue(g.n);
  for (int src = 0; src < g.n; ++src) {
    int* row = table.dist.data() + static_cast<std::size_t>(src) * g.n;
    row[src] = 0;
    int head = 0, tail = 0;
    queue[tail++] = src;
    while (head < tail) {
      int u = queue[head++];
      for (int v : g.adj[u]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    table.diameter = std::max(table.diameter, *std::max_element(row, row + g.n));
  }
  return table;
}

}  // namespace beepsim
