#include <stdexcept>

#include "bmlab/mechanisms.hpp"

namespace bmlab {

Matching ttc(const Market& m) {
  const std::size_t n = m.size();
  const RankingTable& prefs = m.preferences();
  const RankingTable& prios = m.priorities();

  // Graph nodes: students are 0..n-1, schools are n..2n-1.
  std::vector<char> removed(2 * n, 0);
  std::vector<std::int32_t> cursor(2 * n, 0);  // position in each node's list
  std::vector<std::int32_t> points_to(2 * n, -1);
  std::vector<std::int32_t> walk_id(2 * n, -1);
  std::vector<std::int32_t> path;
  std::vector<std::int32_t> cycle_nodes;

  Matching x;
  x.assignment.assign(n, -1);
  std::size_t remaining = n;

  auto advance = [&](std::size_t node) {
    if (node < n) {
      while (removed[n + prefs.at(node, cursor[node])]) ++cursor[node];
      points_to[node] = static_cast<std::int32_t>(n) + prefs.at(node, cursor[node]);
    } else {
      const std::size_t s = node - n;
      while (removed[prios.at(s, cursor[node])]) ++cursor[node];
      points_to[node] = prios.at(s, cursor[node]);
    }
  };

  std::int32_t walk = 0;
  while (remaining > 0) {
    for (std::size_t v = 0; v < 2 * n; ++v) {
      if (!removed[v]) advance(v);
      walk_id[v] = -1;
    }
    cycle_nodes.clear();
    // Every remaining node has out-degree one, so each walk ends either on a
    // node of an earlier walk or closes a new cycle.
    for (std::size_t start = 0; start < n; ++start) {
      if (removed[start] || walk_id[start] >= 0) continue;
      path.clear();
      std::int32_t v = static_cast<std::int32_t>(start);
      while (walk_id[v] < 0) {
        walk_id[v] = walk;
        path.push_back(v);
        v = points_to[v];
      }
      if (walk_id[v] == walk) {
        const std::int32_t entry = v;
        do {
          cycle_nodes.push_back(v);
          v = points_to[v];
        } while (v != entry);
      }
      ++walk;
    }
    if (cycle_nodes.empty()) throw std::logic_error("ttc: no cycle among remaining agents");
    for (std::int32_t v : cycle_nodes) {
      if (static_cast<std::size_t>(v) < n) {
        x.assignment[v] = points_to[v] - static_cast<std::int32_t>(n);
        --remaining;
      }
    }
    for (std::int32_t v : cycle_nodes) removed[v] = 1;
  }
  return x;
}

}  // namespace bmlab
