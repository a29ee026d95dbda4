// Copyright 2026 The HRC Co-Assembly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hrc/task_graph.hpp"

#include <bit>
#include <algorithm>
#include <deque>
#include <functional>

namespace hrc {

TaskGraph::TaskGraph(std::vector<TaskNode> nodes, std::vector<TaskEdge> edges,
                     int root)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), root_(root) {
  validate();
}

void TaskGraph::validate() {
  if (nodes_.empty())
    throw Error(ErrorCode::kInvalidArgument, "task graph has no nodes");
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, static_cast<int>(i)).second)
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate task node id " + std::to_string(nodes_[i].id));
    out_[nodes_[i].id];
  }
  if (!index_.count(root_))
    throw Error(ErrorCode::kInvalidArgument, "task graph root not found");

  for (size_t e = 0; e < edges_.size(); ++e) {
    const TaskEdge& edge = edges_[e];
    if (!index_.count(edge.from) || !index_.count(edge.to))
      throw Error(ErrorCode::kInvalidArgument,
                  "task edge references an unknown node");
    const TaskNode& parent = node(edge.from);
    const TaskNode& child = node(edge.to);
    std::set<int> expect = parent.blocks;
    if (!expect.insert(edge.block).second || expect != child.blocks)
      throw Error(ErrorCode::kInvalidArgument,
                  "task edge " + std::to_string(edge.from) + "->" +
                      std::to_string(edge.to) +
                      " does not insert exactly block " +
                      std::to_string(edge.block));
    for (int other : out_[edge.from])
      if (edges_[other].block == edge.block && edges_[other].to != edge.to)
        throw Error(ErrorCode::kInvalidArgument,
                    "node " + std::to_string(edge.from) +
                        " has two successors for block " +
                        std::to_string(edge.block));
    out_[edge.from].push_back(static_cast<int>(e));
    if (edge.group > 0) {
      auto [it, fresh] = block_surface_.emplace(edge.block, edge.group);
      if (!fresh && it->second != edge.group)
        throw Error(ErrorCode::kInvalidArgument,
                    "block " + std::to_string(edge.block) +
                        " appears in two connector groups");
    }
  }

  // Block sets grow strictly along edges, so the graph is acyclic; depth is
  // the BFS distance and every node must be reachable from the root.
  std::deque<int> frontier{root_};
  depth_[root_] = 0;
  while (!frontier.empty()) {
    const int n = frontier.front();
    frontier.pop_front();
    for (int e : out_[n]) {
      const int child = edges_[e].to;
      if (!depth_.count(child)) {
        depth_[child] = depth_[n] + 1;
        frontier.push_back(child);
      }
    }
  }
  if (depth_.size() != nodes_.size())
    throw Error(ErrorCode::kInvalidArgument,
                "task graph has nodes unreachable from the root");

  const std::set<int> everything = all_blocks();
  for (const TaskNode& n : nodes_) {
    if (out_[n.id].empty() && n.blocks != everything)
      throw Error(ErrorCode::kInvalidArgument,
                  "task node " + std::to_string(n.id) +
                      " is a dead end before assembly completes");
  }
}

const TaskNode& TaskGraph::node(int id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw Error(ErrorCode::kInvalidArgument,
                "unknown task node " + std::to_string(id));
  return nodes_[it->second];
}

std::vector<int> TaskGraph::terminals() const {
  std::vector<int> out;
  for (const TaskNode& n : nodes_)
    if (out_.at(n.id).empty()) out.push_back(n.id);
  return out;
}

const std::vector<int>& TaskGraph::out_edges(int node_id) const {
  auto it = out_.find(node_id);
  if (it == out_.end())
    throw Error(ErrorCode::kInvalidArgument,
                "unknown task node " + std::to_string(node_id));
  return it->second;
}

std::set<int> TaskGraph::levels() const {
  std::set<int> out;
  for (const TaskNode& n : nodes_) out.insert(n.level);
  return out;
}

std::set<int> TaskGraph::all_blocks() const {
  std::set<int> out;
  for (const TaskEdge& e : edges_) out.insert(e.block);
  return out;
}

int TaskGraph::surface_of_block(int block) const {
  auto it = block_surface_.find(block);
  return it == block_surface_.end() ? 0 : it->second;
}

TaskGraph build_surface_graph(int surfaces, int blocks_per_surface) {
  if (surfaces < 1 || blocks_per_surface < 1 ||
      surfaces * blocks_per_surface > 30)
    throw Error(ErrorCode::kInvalidArgument, "unsupported graph dimensions");

  const int total = surfaces * blocks_per_surface;
  auto surface_of = [&](int block) {
    return (block - 1) / blocks_per_surface + 1;
  };
  auto surface_mask = [&](int s) {
    unsigned m = 0;
    for (int k = 0; k < blocks_per_surface; ++k)
      m |= 1u << ((s - 1) * blocks_per_surface + k);
    return m;
  };
  // The active surface is the one partially filled, if any.
  auto active_of = [&](unsigned mask) {
    for (int s = 1; s <= surfaces; ++s) {
      const unsigned part = mask & surface_mask(s);
      if (part != 0 && part != surface_mask(s)) return s;
    }
    return 0;
  };

  std::map<unsigned, int> ids;
  std::vector<TaskNode> nodes;
  std::vector<TaskEdge> edges;
  std::deque<unsigned> frontier;

  auto intern = [&](unsigned mask) {
    auto it = ids.find(mask);
    if (it != ids.end()) return it->second;
    TaskNode n;
    n.id = static_cast<int>(nodes.size());
    for (int b = 1; b <= total; ++b)
      if (mask & (1u << (b - 1))) n.blocks.insert(b);
    n.surface = active_of(mask);
    if (n.surface != 0) {
      n.level = std::popcount(mask & surface_mask(n.surface));
    } else {
      n.level = mask == 0 ? 0 : blocks_per_surface;
    }
    ids.emplace(mask, n.id);
    nodes.push_back(n);
    frontier.push_back(mask);
    return n.id;
  };

  intern(0u);
  while (!frontier.empty()) {
    const unsigned mask = frontier.front();
    frontier.pop_front();
    const int from = ids.at(mask);
    const int active = active_of(mask);
    for (int b = 1; b <= total; ++b) {
      if (mask & (1u << (b - 1))) continue;
      const int s = surface_of(b);
      if (active != 0 && s != active) continue;
      const int to = intern(mask | (1u << (b - 1)));
      edges.push_back({from, to, b, Connector::kAnd, s});
    }
  }
  return TaskGraph(std::move(nodes), std::move(edges), 0);
}

TaskState state_of(const TaskGraph& graph, int node_id) {
  const TaskNode& n = graph.node(node_id);
  return {n.id, n.blocks, n.surface};
}

ProgressEstimate infer_progress(const TaskGraph& graph,
                                const ObservationSeq& obs,
                                const NodePrior& prior) {
  std::set<int> current{graph.root()};
  for (size_t i = 0; i < obs.size(); ++i) {
    std::set<int> next;
    for (int n : current)
      for (int e : graph.out_edges(n))
        if (graph.edges()[e].block == obs[i].block)
          next.insert(graph.edges()[e].to);
    if (next.empty())
      throw InconsistentObservation(
          "insertion of block " + std::to_string(obs[i].block) + " at event " +
              std::to_string(i) + " is not consistent with the task graph",
          static_cast<int>(i), {current.begin(), current.end()});
    current = std::move(next);
  }

  auto weight = [&](int id) {
    if (prior.empty()) return 1.0;
    auto it = prior.find(id);
    return it == prior.end() ? 0.0 : it->second;
  };
  double total = 0.0;
  for (int n : current) total += weight(n);

  int best = -1;
  double best_w = -1.0;
  for (int n : current) {
    const double w = weight(n);
    const bool better =
        best < 0 || w > best_w ||
        (w == best_w && (graph.depth(n) > graph.depth(best) ||
                         (graph.depth(n) == graph.depth(best) && n < best)));
    if (better) {
      best = n;
      best_w = w;
    }
  }
  ProgressEstimate out;
  out.state = state_of(graph, best);
  out.posterior = total > 0.0 ? best_w / total : 0.0;
  out.consistent_nodes.assign(current.begin(), current.end());
  return out;
}

std::set<int> valid_next_blocks(const TaskGraph& graph,
                                const TaskState& state) {
  std::set<int> out;
  for (int e : graph.out_edges(state.node)) out.insert(graph.edges()[e].block);
  return out;
}

std::set<IntentionLabel> valid_next_intentions(const TaskGraph& graph,
                                               const TaskState& state) {
  std::set<IntentionLabel> out;
  for (int b : valid_next_blocks(graph, state))
    out.insert(IntentionLabel::reach(b));
  return out;
}

TaskState advance(const TaskGraph& graph, const TaskState& state,
                  const InsertionEvent& event) {
  for (int e : graph.out_edges(state.node)) {
    if (graph.edges()[e].block == event.block)
      return state_of(graph, graph.edges()[e].to);
  }
  throw Error(ErrorCode::kInadmissibleEvent,
              "block " + std::to_string(event.block) +
                  " cannot be inserted from task node " +
                  std::to_string(state.node));
}

}  // namespace hrc
