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

#ifndef HRC_TASK_GRAPH_HPP_
#define HRC_TASK_GRAPH_HPP_

#include <map>
#include <set>
#include <vector>

#include "hrc/error.hpp"
#include "hrc/intention_label.hpp"

namespace hrc {

enum class Connector { kAnd, kOr };

// A node is an assembly state: the blocks inserted so far and the surface
// currently being filled (0 when between surfaces). `level` is the position
// in the surface cycle used by the collaboration policy.
struct TaskNode {
  int id = 0;
  int level = 0;
  std::set<int> blocks;
  int surface = 0;
};

// Edges are insertions. AND edges leaving a node with the same group id are
// conjunctive: once one is taken, every block of the group has to be
// inserted before another group can start. Distinct groups, and OR edges,
// are alternatives.
struct TaskEdge {
  int from = 0;
  int to = 0;
  int block = 0;
  Connector connector = Connector::kOr;
  int group = 0;
};

class TaskGraph {
 public:
  TaskGraph() = default;
  TaskGraph(std::vector<TaskNode> nodes, std::vector<TaskEdge> edges,
            int root);

  const std::vector<TaskNode>& nodes() const { return nodes_; }
  const std::vector<TaskEdge>& edges() const { return edges_; }
  const TaskNode& node(int id) const;
  int root() const { return root_; }
  std::vector<int> terminals() const;
  const std::vector<int>& out_edges(int node_id) const;
  int depth(int node_id) const { return depth_.at(node_id); }
  std::set<int> levels() const;
  std::set<int> all_blocks() const;
  int surface_of_block(int block) const;

 private:
  void validate();

  std::vector<TaskNode> nodes_;
  std::vector<TaskEdge> edges_;
  int root_ = 0;
  std::map<int, int> index_;                // node id -> position in nodes_
  std::map<int, std::vector<int>> out_;     // node id -> edge indices
  std::map<int, int> depth_;                // shortest root distance
  std::map<int, int> block_surface_;
};

// Surfaces are taken one at a time in any order; the blocks of a surface are
// inserted in any order and all of them close the surface. Blocks are
// numbered surface-major starting at 1.
TaskGraph build_surface_graph(int surfaces, int blocks_per_surface);

struct TaskState {
  int node = 0;
  std::set<int> completed;
  int active_surface = 0;  // 0 = none
};

TaskState state_of(const TaskGraph& graph, int node_id);

struct InsertionEvent {
  int block = 0;
  double time = 0.0;
};

using ObservationSeq = std::vector<InsertionEvent>;

struct ProgressEstimate {
  TaskState state;
  double posterior = 0.0;
  std::vector<int> consistent_nodes;
};

// Unnormalized prior per node; uniform when empty.
using NodePrior = std::map<int, double>;

ProgressEstimate infer_progress(const TaskGraph& graph,
                                const ObservationSeq& obs,
                                const NodePrior& prior = {});

class InconsistentObservation : public Error {
 public:
  InconsistentObservation(const std::string& what, int prefix_length,
                          std::vector<int> prefix_nodes)
      : Error(ErrorCode::kInconsistentObservation, what),
        prefix_length_(prefix_length),
        prefix_nodes_(std::move(prefix_nodes)) {}
  // Number of leading events that some root path explains.
  int prefix_length() const { return prefix_length_; }
  const std::vector<int>& prefix_nodes() const { return prefix_nodes_; }

 private:
  int prefix_length_;
  std::vector<int> prefix_nodes_;
};

std::set<int> valid_next_blocks(const TaskGraph& graph, const TaskState& state);
std::set<IntentionLabel> valid_next_intentions(const TaskGraph& graph,
                                               const TaskState& state);

TaskState advance(const TaskGraph& graph, const TaskState& state,
                  const InsertionEvent& event);

}  // namespace hrc

#endif  // HRC_TASK_GRAPH_HPP_
