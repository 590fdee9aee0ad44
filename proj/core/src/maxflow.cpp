#include "spmrf/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace spmrf {

FlowGraph::FlowGraph(std::uint32_t node_count)
    : source_cap_(node_count, 0.0), sink_cap_(node_count, 0.0) {}

void FlowGraph::add_terminal(std::uint32_t node, double source_cap, double sink_cap) {
  if (node >= node_count()) throw DimensionError("terminal node out of range");
  if (!(source_cap >= 0.0) || !(sink_cap >= 0.0) || !std::isfinite(source_cap) ||
      !std::isfinite(sink_cap)) {
    throw DimensionError("terminal capacities must be finite and non-negative");
  }
  source_cap_[node] += source_cap;
  sink_cap_[node] += sink_cap;
}

void FlowGraph::add_arc(std::uint32_t from, std::uint32_t to, double capacity,
                        double reverse_capacity) {
  if (from >= node_count() || to >= node_count() || from == to) {
    throw DimensionError("arc endpoints invalid");
  }
  if (!(capacity >= 0.0) || !(reverse_capacity >= 0.0) || !std::isfinite(capacity) ||
      !std::isfinite(reverse_capacity)) {
    throw DimensionError("arc capacities must be finite and non-negative");
  }
  arcs_.push_back({from, to, capacity, reverse_capacity});
}

namespace {

constexpr std::uint32_t kNoArc = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kTerminal = kNoArc - 1;
constexpr std::uint32_t kOrphan = kNoArc - 2;
constexpr std::uint32_t kInfiniteDist = std::numeric_limits<std::uint32_t>::max();

enum class Tree : std::uint8_t { kFree, kSource, kSink };

class BkSolver {
 public:
  explicit BkSolver(const FlowGraph& g) : n_(g.node_count()) {
    const auto& arcs = g.arcs();
    const std::size_t m = 2 * arcs.size();
    first_.assign(n_ + 1, 0);
    for (const auto& a : arcs) {
      ++first_[a.from + 1];
      ++first_[a.to + 1];
    }
    for (std::uint32_t i = 0; i < n_; ++i) first_[i + 1] += first_[i];
    head_.resize(m);
    sister_.resize(m);
    rcap_.resize(m);
    std::vector<std::uint32_t> fill(first_.begin(), first_.end() - 1);
    for (const auto& a : arcs) {
      const std::uint32_t fwd = fill[a.from]++;
      const std::uint32_t rev = fill[a.to]++;
      head_[fwd] = a.to;
      head_[rev] = a.from;
      sister_[fwd] = rev;
      sister_[rev] = fwd;
      rcap_[fwd] = a.capacity;
      rcap_[rev] = a.reverse_capacity;
    }

    tr_cap_.resize(n_);
    parent_.assign(n_, kNoArc);
    tree_.assign(n_, Tree::kFree);
    ts_.assign(n_, 0);
    dist_.assign(n_, 0);
    active_.assign(n_, 0);
    for (std::uint32_t i = 0; i < n_; ++i) {
      const double s = g.source_capacity(i);
      const double t = g.sink_capacity(i);
      flow_ += std::min(s, t);
      tr_cap_[i] = s - t;
      if (tr_cap_[i] > 0.0) {
        tree_[i] = Tree::kSource;
      } else if (tr_cap_[i] < 0.0) {
        tree_[i] = Tree::kSink;
      } else {
        continue;
      }
      parent_[i] = kTerminal;
      dist_[i] = 1;
      activate(i);
    }
  }

  MaxFlowResult run() {
    std::uint32_t current = kNoArc;
    for (;;) {
      if (current == kNoArc || tree_[current] == Tree::kFree) {
        current = next_active();
        if (current == kNoArc) break;
      }
      const std::uint32_t middle = grow(current);
      if (middle == kNoArc) {
        current = kNoArc;
        continue;
      }
      ++time_;
      augment(middle);
      adopt_orphans();
    }
    return {flow_, residual_sink_side(), augmentations_};
  }

 private:
  [[nodiscard]] std::uint32_t tail(std::uint32_t a) const { return head_[sister_[a]]; }

  void activate(std::uint32_t i) {
    if (!active_[i]) {
      active_[i] = 1;
      queue_.push_back(i);
    }
  }

  std::uint32_t next_active() {
    while (!queue_.empty()) {
      const std::uint32_t i = queue_.front();
      queue_.pop_front();
      active_[i] = 0;
      if (tree_[i] != Tree::kFree) return i;
    }
    return kNoArc;
  }

  // Expands the tree of node i by one layer. Returns the arc (source-tree node
  // -> sink-tree node) closing an augmenting path, or kNoArc.
  std::uint32_t grow(std::uint32_t i) {
    const bool from_source = tree_[i] == Tree::kSource;
    for (std::uint32_t a = first_[i]; a < first_[i + 1]; ++a) {
      // Residual arc pointing away from the terminal of i's tree.
      const std::uint32_t step = from_source ? a : sister_[a];
      if (rcap_[step] <= 0.0) continue;
      const std::uint32_t j = head_[a];
      if (tree_[j] == Tree::kFree) {
        tree_[j] = tree_[i];
        parent_[j] = step;
        ts_[j] = ts_[i];
        dist_[j] = dist_[i] + 1;
        activate(j);
      } else if (tree_[j] != tree_[i]) {
        return step;
      } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
        parent_[j] = step;
        ts_[j] = ts_[i];
        dist_[j] = dist_[i] + 1;
      }
    }
    return kNoArc;
  }

  void make_orphan(std::uint32_t i) {
    parent_[i] = kOrphan;
    orphans_.push_back(i);
  }

  void augment(std::uint32_t middle) {
    const std::uint32_t s_end = tail(middle);
    const std::uint32_t t_end = head_[middle];
    double bottleneck = rcap_[middle];
    std::uint32_t i = s_end;
    for (std::uint32_t a = parent_[i]; a != kTerminal; a = parent_[i]) {
      bottleneck = std::min(bottleneck, rcap_[a]);
      i = tail(a);
    }
    bottleneck = std::min(bottleneck, tr_cap_[i]);
    i = t_end;
    for (std::uint32_t a = parent_[i]; a != kTerminal; a = parent_[i]) {
      bottleneck = std::min(bottleneck, rcap_[a]);
      i = head_[a];
    }
    bottleneck = std::min(bottleneck, -tr_cap_[i]);

    rcap_[middle] -= bottleneck;
    rcap_[sister_[middle]] += bottleneck;
    i = s_end;
    for (std::uint32_t a = parent_[i]; a != kTerminal; a = parent_[i]) {
      rcap_[a] -= bottleneck;
      rcap_[sister_[a]] += bottleneck;
      const std::uint32_t up = tail(a);
      if (rcap_[a] <= 0.0) make_orphan(i);
      i = up;
    }
    tr_cap_[i] -= bottleneck;
    if (tr_cap_[i] <= 0.0) make_orphan(i);
    i = t_end;
    for (std::uint32_t a = parent_[i]; a != kTerminal; a = parent_[i]) {
      rcap_[a] -= bottleneck;
      rcap_[sister_[a]] += bottleneck;
      const std::uint32_t up = head_[a];
      if (rcap_[a] <= 0.0) make_orphan(i);
      i = up;
    }
    tr_cap_[i] += bottleneck;
    if (tr_cap_[i] >= 0.0) make_orphan(i);

    flow_ += bottleneck;
    ++augmentations_;
  }

  // Distance from j to its tree's terminal if its chain of parents is intact,
  // kInfiniteDist if it hits an orphan. Marks visited nodes with the current
  // time stamp so later checks stop early.
  std::uint32_t origin_distance(std::uint32_t j, bool source_tree) {
    std::uint32_t d = 0;
    std::uint32_t k = j;
    for (;;) {
      if (ts_[k] == time_) {
        d += dist_[k];
        break;
      }
      const std::uint32_t a = parent_[k];
      ++d;
      if (a == kTerminal) {
        ts_[k] = time_;
        dist_[k] = 1;
        break;
      }
      if (a == kOrphan || a == kNoArc) return kInfiniteDist;
      k = source_tree ? tail(a) : head_[a];
    }
    for (k = j; ts_[k] != time_; k = source_tree ? tail(parent_[k]) : head_[parent_[k]]) {
      ts_[k] = time_;
      dist_[k] = d--;
    }
    return dist_[j];
  }

  void adopt_orphans() {
    while (!orphans_.empty()) {
      const std::uint32_t i = orphans_.front();
      orphans_.pop_front();
      const bool source_tree = tree_[i] == Tree::kSource;

      std::uint32_t best_arc = kNoArc;
      std::uint32_t best_dist = kInfiniteDist;
      for (std::uint32_t a = first_[i]; a < first_[i + 1]; ++a) {
        // Candidate parent j must still have residual capacity towards i
        // (source tree) or from i (sink tree).
        const std::uint32_t link = source_tree ? sister_[a] : a;
        if (rcap_[link] <= 0.0) continue;
        const std::uint32_t j = head_[a];
        if (tree_[j] != tree_[i]) continue;
        const std::uint32_t d = origin_distance(j, source_tree);
        if (d != kInfiniteDist && d < best_dist) {
          best_dist = d;
          best_arc = link;
        }
      }
      if (best_arc != kNoArc) {
        parent_[i] = best_arc;
        ts_[i] = time_;
        dist_[i] = best_dist + 1;
        continue;
      }

      for (std::uint32_t a = first_[i]; a < first_[i + 1]; ++a) {
        const std::uint32_t j = head_[a];
        if (tree_[j] != tree_[i]) continue;
        const std::uint32_t link = source_tree ? sister_[a] : a;
        if (rcap_[link] > 0.0) activate(j);
        const std::uint32_t pa = parent_[j];
        if (pa != kTerminal && pa != kOrphan && pa != kNoArc &&
            (source_tree ? tail(pa) : head_[pa]) == i) {
          make_orphan(j);
        }
      }
      tree_[i] = Tree::kFree;
      parent_[i] = kNoArc;
    }
  }

  Labeling residual_sink_side() const {
    Labeling side(n_);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (tr_cap_[i] < 0.0) {
        side.set(i, true);
        stack.push_back(i);
      }
    }
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      for (std::uint32_t a = first_[v]; a < first_[v + 1]; ++a) {
        const std::uint32_t u = head_[a];
        if (!side[u] && rcap_[sister_[a]] > 0.0) {
          side.set(u, true);
          stack.push_back(u);
        }
      }
    }
    return side;
  }

  std::uint32_t n_;
  std::vector<std::uint32_t> first_;
  std::vector<std::uint32_t> head_;
  std::vector<std::uint32_t> sister_;
  std::vector<double> rcap_;
  std::vector<double> tr_cap_;  // > 0: residual to source, < 0: residual to sink
  std::vector<std::uint32_t> parent_;
  std::vector<Tree> tree_;
  std::vector<std::uint32_t> ts_;
  std::vector<std::uint32_t> dist_;
  std::vector<std::uint8_t> active_;
  std::deque<std::uint32_t> queue_;
  std::deque<std::uint32_t> orphans_;
  std::uint32_t time_ = 0;
  double flow_ = 0.0;
  std::uint64_t augmentations_ = 0;
};

}  // namespace

MaxFlowResult max_flow(const FlowGraph& graph) { return BkSolver(graph).run(); }

double cut_capacity(const FlowGraph& graph, const Labeling& sink_side) {
  if (sink_side.size() != graph.node_count()) throw DimensionError("cut labeling length mismatch");
  double cut = 0.0;
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    cut += sink_side[i] ? graph.source_capacity(i) : graph.sink_capacity(i);
  }
  for (const auto& a : graph.arcs()) {
    if (!sink_side[a.from] && sink_side[a.to]) cut += a.capacity;
    if (sink_side[a.from] && !sink_side[a.to]) cut += a.reverse_capacity;
  }
  return cut;
}

std::string to_dimacs(const FlowGraph& graph) {
  const std::uint64_t n = graph.node_count();
  std::uint64_t m = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    m += graph.source_capacity(i) > 0.0;
    m += graph.sink_capacity(i) > 0.0;
  }
  for (const auto& a : graph.arcs()) m += (a.capacity > 0.0) + (a.reverse_capacity > 0.0);
  std::ostringstream os;
  os.precision(17);
  os << "c binary MRF s-t graph\n";
  os << "p max " << n + 2 << ' ' << m << '\n';
  os << "n " << n + 1 << " s\n";
  os << "n " << n + 2 << " t\n";
  for (std::uint32_t i = 0; i < n; ++i) {
    if (graph.source_capacity(i) > 0.0) os << "a " << n + 1 << ' ' << i + 1 << ' ' << graph.source_capacity(i) << '\n';
    if (graph.sink_capacity(i) > 0.0) os << "a " << i + 1 << ' ' << n + 2 << ' ' << graph.sink_capacity(i) << '\n';
  }
  for (const auto& a : graph.arcs()) {
    if (a.capacity > 0.0) os << "a " << a.from + 1 << ' ' << a.to + 1 << ' ' << a.capacity << '\n';
    if (a.reverse_capacity > 0.0) os << "a " << a.to + 1 << ' ' << a.from + 1 << ' ' << a.reverse_capacity << '\n';
  }
  return os.str();
}

}  // namespace spmrf
