#pragma once

#include "subeq/network.hpp"

#include <random>
#include <utility>
#include <vector>

namespace subeq {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Connected undirected graph on nodes 1..N with no self-loops.
class UGraph {
public:
  /// Throws DomainError for out-of-range ids, self-loops, duplicate edges, or a disconnected graph.
  UGraph(int num_nodes, std::vector<std::pair<AgentId, AgentId>> edges, std::vector<Point> positions = {});

  int num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  /// Edges as (i, j) with i < j, sorted.
  const std::vector<std::pair<AgentId, AgentId>>& edges() const { return edges_; }
  const std::vector<Point>& positions() const { return positions_; }

  /// Sorted neighbor ids of node i.
  const std::vector<AgentId>& neighbors(AgentId i) const;
  int degree(AgentId i) const { return static_cast<int>(neighbors(i).size()); }
  int max_degree() const;
  bool has_edge(AgentId i, AgentId j) const;

  static UGraph complete(int num_nodes);
  static UGraph path(int num_nodes);
  static UGraph star(int num_nodes);  // node 1 is the center

private:
  int num_nodes_;
  std::vector<std::pair<AgentId, AgentId>> edges_;
  std::vector<Point> positions_;
  std::vector<std::vector<AgentId>> adjacency_;  // index 0 unused
};

/// True when the edge list spans a connected graph on nodes 1..N.
bool is_connected(int num_nodes, const std::vector<std::pair<AgentId, AgentId>>& edges);

inline constexpr int kMaxPlacementAttempts = 1000;

/// N uniform points on the unit square joined by their L shortest pairwise
/// links, which is the one-hop radius grown until exactly L links exist.
/// Disconnected placements are discarded and redrawn.
UGraph random_geometric(int num_nodes, int num_links, std::mt19937_64& rng);

/// Gossip between the endpoints of an edge. Throws DomainError for a non-edge.
ActionStep pe_step(const UGraph& graph, AgentId i, AgentId j);

/// Node i together with its whole neighborhood.
ActionStep ge_step(const UGraph& graph, AgentId i);

enum class EqualizingMode { pairwise, groupwise };

struct ScheduledStep {
  ActionStep step;
  AgentId initiator = 0;
};

/// Draws the initiator uniformly over nodes; in pairwise mode the partner is
/// uniform over the initiator's neighbors.
class UniformScheduler {
public:
  UniformScheduler(const UGraph& graph, EqualizingMode mode, std::uint64_t seed);

  ScheduledStep next();

private:
  const UGraph* graph_;
  EqualizingMode mode_;
  std::mt19937_64 rng_;
};

/// {"N":…, "edges":[[i,j]…], "positions":[[x,y]…]}
nlohmann::json to_json(const UGraph& graph);
UGraph graph_from_json(const nlohmann::json& doc);

}  // namespace subeq
