#include "v2g/comms.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace v2g {

std::size_t Topology::edge_count() const {
  std::size_t deg_sum = 0;
  for (const auto& nb : adj) deg_sum += nb.size();
  return deg_sum / 2;
}

bool Topology::has_edge(int a, int b) const {
  const auto& nb = adj.at(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

Topology ba_generate(int n, int m0, int m, Rng& rng) {
  if (m < 1 || m > m0 || m0 >= n)
    throw std::invalid_argument("ba_generate: need 1 <= m <= m0 < n");
  Topology t;
  t.n = n;
  t.m0 = m0;
  t.m = m;
  t.adj.assign(n, {});
  // Repeated-nodes list: each node appears once per unit of degree, which
  // makes degree-proportional sampling a uniform pick from the list.
  std::vector<int> repeated;
  auto add_edge = [&](int a, int b) {
    t.adj[a].push_back(b);
    t.adj[b].push_back(a);
    repeated.push_back(a);
    repeated.push_back(b);
  };
  for (int a = 0; a < m0; ++a)
    for (int b = a + 1; b < m0; ++b) add_edge(a, b);
  std::vector<int> chosen;
  for (int v = m0; v < n; ++v) {
    chosen.clear();
    while (static_cast<int>(chosen.size()) < m) {
      const int cand = repeated[rng.uniform_index(repeated.size())];
      if (std::find(chosen.begin(), chosen.end(), cand) == chosen.end())
        chosen.push_back(cand);
    }
    for (int c : chosen) add_edge(v, c);
  }
  for (auto& nb : t.adj) std::sort(nb.begin(), nb.end());
  return t;
}

std::vector<int> route(const Topology& topo, int src, int dst) {
  if (src < 0 || src >= topo.n || dst < 0 || dst >= topo.n)
    throw std::out_of_range("route: node out of range");
  if (src == dst) return {src};
  // Distance-to-destination BFS, then greedy walk picking the smallest-id
  // neighbor that moves closer: yields the lexicographically smallest
  // shortest path.
  std::vector<int> dist(topo.n, -1);
  std::deque<int> queue{dst};
  dist[dst] = 0;
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    for (int nb : topo.adj[cur])
      if (dist[nb] < 0) {
        dist[nb] = dist[cur] + 1;
        queue.push_back(nb);
      }
  }
  if (dist[src] < 0) throw std::logic_error("route: graph not connected");
  std::vector<int> path{src};
  int cur = src;
  while (cur != dst) {
    for (int nb : topo.adj[cur])  // neighbors sorted ascending
      if (dist[nb] == dist[cur] - 1) {
        cur = nb;
        break;
      }
    path.push_back(cur);
  }
  return path;
}

void MessageLog::init(int n) {
  originated.assign(n, 0);
  relayed.assign(n, 0);
  terminated.assign(n, 0);
  total_messages = 0;
  steps = 0;
}

std::vector<double> load_distribution(const MessageLog& log) {
  const std::size_t n = log.originated.size();
  std::vector<double> pct(n, 0.0);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += log.node_total(static_cast<int>(i));
  if (total == 0) return pct;
  for (std::size_t i = 0; i < n; ++i)
    pct[i] = 100.0 * static_cast<double>(log.node_total(static_cast<int>(i))) /
             static_cast<double>(total);
  return pct;
}

void CommsConfig::validate() const {
  if (m < 1 || m > m0) throw std::invalid_argument("comms: need 1 <= m <= m0");
  if (sync_period < 1) throw std::invalid_argument("comms: sync_period must be >= 1");
}

CommsNetwork::CommsNetwork(Algo algo, int n_agents, const CommsConfig& cfg, Rng& rng)
    : algo_(algo), cfg_(cfg) {
  cfg_.validate();
  const int n = n_agents + 1;
  if (cfg_.m0 >= n) throw std::invalid_argument("comms: m0 must be < n_agents + 1");
  topo_ = ba_generate(n, cfg_.m0, cfg_.m, rng);
  if (cfg_.central_is_hub) {
    central_ = 0;
    for (int i = 1; i < n; ++i)
      if (topo_.degree(i) > topo_.degree(central_)) central_ = i;
  } else {
    central_ = static_cast<int>(rng.uniform_index(n));
  }
  for (int i = 0; i < n; ++i)
    if (i != central_) agent_nodes_.push_back(i);
  log_.init(n);
}

void CommsNetwork::send(int src_node, int dst_node) {
  const auto path = route(topo_, src_node, dst_node);
  log_.originated[src_node] += 1;
  log_.terminated[dst_node] += 1;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) log_.relayed[path[i]] += 1;
  log_.total_messages += 1;
}

void CommsNetwork::record_step() {
  log_.steps += 1;
  const bool sync_now = log_.steps % static_cast<std::uint64_t>(cfg_.sync_period) == 0;
  switch (algo_) {
    case Algo::IL:
      break;
    case Algo::MADDPG:
      for (int a : agent_nodes_) send(a, central_);
      if (sync_now)
        for (int a : agent_nodes_) send(central_, a);
      break;
    case Algo::DT_MADDPG:
      for (int a : agent_nodes_)
        for (int nb : topo_.adj[a])
          if (nb != central_) send(a, nb);
      if (sync_now)
        for (int a : agent_nodes_) send(a, central_);
      break;
  }
}

}  // namespace v2g
