#include "subeq/topology.hpp"

#include "subeq/errors.hpp"

#include <algorithm>
#include <numeric>

namespace subeq {

namespace {

struct DisjointSets {
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n) + 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
  std::vector<int> parent;
};

}  // namespace

bool is_connected(int num_nodes, const std::vector<std::pair<AgentId, AgentId>>& edges) {
  if (num_nodes <= 1) return true;
  DisjointSets sets(num_nodes);
  int components = num_nodes;
  for (const auto& [a, b] : edges) {
    if (sets.unite(a, b)) --components;
  }
  return components == 1;
}

UGraph::UGraph(int num_nodes, std::vector<std::pair<AgentId, AgentId>> edges, std::vector<Point> positions)
    : num_nodes_(num_nodes), edges_(std::move(edges)), positions_(std::move(positions)) {
  if (num_nodes_ < 1) throw DomainError("UGraph: need at least one node");
  if (!positions_.empty() && static_cast<int>(positions_.size()) != num_nodes_) {
    throw DomainError("UGraph: positions must be given for every node or none");
  }
  for (auto& [a, b] : edges_) {
    if (a < 1 || a > num_nodes_ || b < 1 || b > num_nodes_) throw DomainError("UGraph: edge endpoint out of range");
    if (a == b) throw DomainError("UGraph: self-loop on node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw DomainError("UGraph: duplicate edge");
  }
  if (!is_connected(num_nodes_, edges_)) throw DomainError("UGraph: graph is not connected");
  adjacency_.resize(static_cast<std::size_t>(num_nodes_) + 1);
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

const std::vector<AgentId>& UGraph::neighbors(AgentId i) const {
  if (i < 1 || i > num_nodes_) throw DomainError("UGraph: node " + std::to_string(i) + " out of range");
  return adjacency_[i];
}

int UGraph::max_degree() const {
  int best = 0;
  for (AgentId i = 1; i <= num_nodes_; ++i) best = std::max(best, degree(i));
  return best;
}

bool UGraph::has_edge(AgentId i, AgentId j) const {
  if (i < 1 || i > num_nodes_ || j < 1 || j > num_nodes_) return false;
  const auto& row = adjacency_[i];
  return std::binary_search(row.begin(), row.end(), j);
}

UGraph UGraph::complete(int num_nodes) {
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (AgentId i = 1; i <= num_nodes; ++i) {
    for (AgentId j = i + 1; j <= num_nodes; ++j) edges.emplace_back(i, j);
  }
  return UGraph(num_nodes, std::move(edges));
}

UGraph UGraph::path(int num_nodes) {
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (AgentId i = 1; i < num_nodes; ++i) edges.emplace_back(i, i + 1);
  return UGraph(num_nodes, std::move(edges));
}

UGraph UGraph::star(int num_nodes) {
  std::vector<std::pair<AgentId, AgentId>> edges;
  for (AgentId i = 2; i <= num_nodes; ++i) edges.emplace_back(1, i);
  return UGraph(num_nodes, std::move(edges));
}

UGraph random_geometric(int num_nodes, int num_links, std::mt19937_64& rng) {
  const long long max_links = static_cast<long long>(num_nodes) * (num_nodes - 1) / 2;
  if (num_nodes < 2 || num_links < num_nodes - 1 || num_links > max_links) {
    throw DomainError("random_geometric: need N >= 2 and N-1 <= L <= N(N-1)/2, got N=" +
                      std::to_string(num_nodes) + ", L=" + std::to_string(num_links));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Candidate {
    double dist2;
    AgentId a;
    AgentId b;
  };
  std::vector<Candidate> pairs;
  pairs.reserve(static_cast<std::size_t>(max_links));
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    std::vector<Point> pts(static_cast<std::size_t>(num_nodes));
    for (auto& p : pts) {
      p.x = unit(rng);
      p.y = unit(rng);
    }
    pairs.clear();
    for (AgentId i = 1; i <= num_nodes; ++i) {
      for (AgentId j = i + 1; j <= num_nodes; ++j) {
        const double dx = pts[i - 1].x - pts[j - 1].x;
        const double dy = pts[i - 1].y - pts[j - 1].y;
        pairs.push_back({dx * dx + dy * dy, i, j});
      }
    }
    const auto by_distance = [](const Candidate& u, const Candidate& v) {
      return u.dist2 < v.dist2 || (u.dist2 == v.dist2 && std::tie(u.a, u.b) < std::tie(v.a, v.b));
    };
    std::nth_element(pairs.begin(), pairs.begin() + (num_links - 1), pairs.end(), by_distance);
    std::vector<std::pair<AgentId, AgentId>> edges;
    edges.reserve(static_cast<std::size_t>(num_links));
    for (int e = 0; e < num_links; ++e) edges.emplace_back(pairs[e].a, pairs[e].b);
    if (is_connected(num_nodes, edges)) return UGraph(num_nodes, std::move(edges), std::move(pts));
  }
  throw DomainError("random_geometric: no connected placement within " + std::to_string(kMaxPlacementAttempts) +
                    " attempts for N=" + std::to_string(num_nodes) + ", L=" + std::to_string(num_links));
}

ActionStep pe_step(const UGraph& graph, AgentId i, AgentId j) {
  if (!graph.has_edge(i, j)) {
    throw DomainError("pe_step: {" + std::to_string(i) + "," + std::to_string(j) + "} is not an edge");
  }
  return ActionStep{{}, {i, j}, {}};
}

ActionStep ge_step(const UGraph& graph, AgentId i) {
  const auto& nbrs = graph.neighbors(i);
  ActionStep step;
  step.interact.insert(nbrs.begin(), nbrs.end());
  step.interact.insert(i);
  return step;
}

UniformScheduler::UniformScheduler(const UGraph& graph, EqualizingMode mode, std::uint64_t seed)
    : graph_(&graph), mode_(mode), rng_(seed) {}

ScheduledStep UniformScheduler::next() {
  std::uniform_int_distribution<AgentId> pick_node(1, graph_->num_nodes());
  const AgentId i = pick_node(rng_);
  if (mode_ == EqualizingMode::groupwise) return {ge_step(*graph_, i), i};
  const auto& nbrs = graph_->neighbors(i);
  std::uniform_int_distribution<std::size_t> pick_partner(0, nbrs.size() - 1);
  return {ActionStep{{}, {i, nbrs[pick_partner(rng_)]}, {}}, i};
}

nlohmann::json to_json(const UGraph& graph) {
  nlohmann::json doc;
  doc["N"] = graph.num_nodes();
  auto edges = nlohmann::json::array();
  for (const auto& [a, b] : graph.edges()) edges.push_back({a, b});
  doc["edges"] = std::move(edges);
  auto pos = nlohmann::json::array();
  for (const auto& p : graph.positions()) pos.push_back({p.x, p.y});
  doc["positions"] = std::move(pos);
  return doc;
}

UGraph graph_from_json(const nlohmann::json& doc) {
  try {
    const int n = doc.at("N").get<int>();
    std::vector<std::pair<AgentId, AgentId>> edges;
    for (const auto& e : doc.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<Point> positions;
    if (doc.contains("positions")) {
      for (const auto& p : doc.at("positions")) positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return UGraph(n, std::move(edges), std::move(positions));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed graph document: ") + e.what());
  }
}

}  // namespace subeq
