#include "clgl/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace clgl::graphs {

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split: " + name);
}

std::vector<std::vector<std::uint32_t>> adjacency(const GraphSample& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.num_nodes);
  for (const auto& [u, v] : g.edges) {
    if (u >= g.num_nodes || v >= g.num_nodes) throw std::invalid_argument("edge references invalid node");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

std::vector<std::uint32_t> embodiment_of(const GraphSample& g, std::uint32_t radius) {
  if (g.connection_node >= g.num_nodes) throw std::invalid_argument("embodiment_of: connection node not set");
  const auto adj = adjacency(g);
  std::vector<std::uint32_t> dist(g.num_nodes, UINT32_MAX);
  std::queue<std::uint32_t> q;
  dist[g.connection_node] = 0;
  q.push(g.connection_node);
  std::vector<std::uint32_t> out;
  while (!q.empty()) {
    const std::uint32_t u = q.front();
    q.pop();
    out.push_back(u);
    if (dist[u] == radius) continue;
    for (std::uint32_t v : adj[u]) {
      if (dist[v] == UINT32_MAX) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool connection_on_cycle(const GraphSample& g) {
  const auto adj = adjacency(g);
  const std::uint32_t c = g.connection_node;
  if (adj[c].size() < 2) return false;
  // c lies on a cycle iff two of its neighbors are connected in g - c.
  std::vector<int> comp(g.num_nodes, -1);
  comp[c] = -2;
  int next = 0;
  for (std::uint32_t start = 0; start < g.num_nodes; ++start) {
    if (comp[start] != -1) continue;
    comp[start] = next;
    std::queue<std::uint32_t> q;
    q.push(start);
    while (!q.empty()) {
      const std::uint32_t u = q.front();
      q.pop();
      for (std::uint32_t v : adj[u]) {
        if (comp[v] == -1) {
          comp[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  std::vector<int> seen;
  for (std::uint32_t nb : adj[c]) {
    if (std::find(seen.begin(), seen.end(), comp[nb]) != seen.end()) return true;
    seen.push_back(comp[nb]);
  }
  return false;
}

std::uint32_t connection_motif_degree(const GraphSample& g) {
  const auto adj = adjacency(g);
  const std::size_t deg = adj[g.connection_node].size();
  return deg > 0 ? static_cast<std::uint32_t>(deg - 1) : 0;
}

int morphology_class(const GraphSample& g) {
  if (g.connection_node >= g.num_nodes) throw std::invalid_argument("morphology_class: connection node not set");
  const bool cyc = connection_on_cycle(g);
  const bool high = connection_motif_degree(g) >= 3;
  return (cyc ? 2 : 0) + (high ? 1 : 0);
}

bool is_connected(const GraphSample& g) {
  if (g.num_nodes == 0) return true;
  const auto adj = adjacency(g);
  std::vector<char> seen(g.num_nodes, 0);
  std::queue<std::uint32_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const std::uint32_t u = q.front();
    q.pop();
    for (std::uint32_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == g.num_nodes;
}

}  // namespace clgl::graphs
