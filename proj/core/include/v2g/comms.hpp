#pragma once

#include <cstdint>
#include <vector>

#include "v2g/rng.hpp"
#include "v2g/trainer.hpp"

namespace v2g {

// Undirected scale-free graph grown by preferential attachment from an
// initial m0-clique, with m edges per new node.
struct Topology {
  int n = 0;
  int m0 = 0;
  int m = 0;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists

  std::size_t edge_count() const;
  int degree(int node) const { return static_cast<int>(adj.at(node).size()); }
  bool has_edge(int a, int b) const;
};

Topology ba_generate(int n, int m0, int m, Rng& rng);

// Shortest path by hop count; among equals, the lexicographically smallest
// node-id sequence, so routing is deterministic. src == dst gives {src}.
std::vector<int> route(const Topology& topo, int src, int dst);

// Per-node traffic counters for routed messages.
struct MessageLog {
  std::vector<std::uint64_t> originated, relayed, terminated;
  std::uint64_t total_messages = 0;
  std::uint64_t steps = 0;

  void init(int n);
  std::uint64_t node_total(int i) const {
    return originated[i] + relayed[i] + terminated[i];
  }
};

// Percentage of total traffic events per node; all zeros when nothing flowed.
std::vector<double> load_distribution(const MessageLog& log);

struct CommsConfig {
  bool enabled = true;
  int m0 = 3;
  int m = 2;
  int sync_period = 24;       // steps between parameter broadcasts / model syncs
  bool central_is_hub = true; // otherwise a random node

  void validate() const;
};

// Message-level accounting of the DT network. One node per agent plus one
// central trainer node. Traffic per step:
//   IL        - nothing (non-collaborating baseline)
//   MADDPG    - one experience message per agent to the central node;
//               a parameter broadcast from the centre to each agent every
//               sync_period steps
//   DT-MADDPG - one prediction message per agent to each of its agent
//               neighbors; a compact model sync to the centre every
//               sync_period steps
// Accounting is observational only; it never gates the learning loop.
class CommsNetwork {
 public:
  CommsNetwork(Algo algo, int n_agents, const CommsConfig& cfg, Rng& rng);

  void record_step();
  void send(int src_node, int dst_node);

  const Topology& topology() const { return topo_; }
  const MessageLog& log() const { return log_; }
  int central_node() const { return central_; }
  int agent_node(int agent) const { return agent_nodes_.at(agent); }
  double messages_per_step() const {
    return log_.steps == 0 ? 0.0
                           : static_cast<double>(log_.total_messages) /
                                 static_cast<double>(log_.steps);
  }

 private:
  Algo algo_;
  CommsConfig cfg_;
  Topology topo_;
  int central_ = 0;
  std::vector<int> agent_nodes_;
  MessageLog log_;
};

}  // namespace v2g
