#include "spinbound/traversal.hpp"

#include <algorithm>
#include <bit>
#include <vector>

namespace spinbound {

std::optional<NodeCursor> skip_subtree(NodeCursor c, int n) {
  if (c.depth <= 0 || c.depth > n) return std::nullopt;
  if (c.x.add_bit(n - c.depth)) return std::nullopt;  // wrapped: exhausted
  c.depth = n - c.x.lowest_set_bit();
  return c;
}

ValueTable ValueTable::from_fields(const IsingInstance& inst) {
  ValueTable t;
  t.first.resize(static_cast<std::size_t>(inst.num_vars()));
  for (int i = 0; i < inst.num_vars(); ++i)
    t.first[static_cast<std::size_t>(i)] = value_order(inst.field(i)).first;
  return t;
}

Assignment cursor_assignment(const NodeCursor& c, int n, const ValueTable& values) {
  Assignment s(static_cast<std::size_t>(c.depth));
  for (int p = 0; p < c.depth; ++p) s[static_cast<std::size_t>(p)] = values.spin(p, c.x.bit(n - 1 - p));
  return s;
}

namespace {

constexpr std::uint64_t kCheckMask = (1u << 14) - 1;

void add_pruned_mass(SearchStats& st, int n, int d) {
  if (n - d < 64) st.pruned_leaf_mass += std::uint64_t{1} << (n - d);
}

}  // namespace

SearchStats dfs_region(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                       const ValueTable& values, NodeCursor cur, BoundState state, Assignment path,
                       SharedIncumbent& incumbent, const SearchLimits& limits,
                       const EngineOptions& opts) {
  const int n = inst.num_vars();
  const int root_depth = cur.depth;
  SearchStats st;
  path.resize(static_cast<std::size_t>(n));
  std::vector<energy_t> path_bound(static_cast<std::size_t>(n) + 1, kEnergyInf);

  int d = cur.depth;
  bool counted_root = false;
  for (;;) {
    const energy_t b = state.bound();
    path_bound[static_cast<std::size_t>(d)] = b;
    if (counted_root || opts.count_root) ++st.nodes;
    counted_root = true;
    if ((st.nodes & kCheckMask) == 0 && limits.expired()) {
      st.completed = false;
      st.open_dual = *std::min_element(path_bound.begin() + root_depth, path_bound.begin() + d + 1);
      return st;
    }

    bool skip = true;
    if (d == n) {
      ++st.leaves;
      if (b < incumbent.value()) incumbent.offer(b, path);
    } else if (opts.prune && b >= incumbent.value()) {
      add_pruned_mass(st, n, d);
    } else {
      path[static_cast<std::size_t>(d)] = values.spin(d, false);
      state.descend(path[static_cast<std::size_t>(d)]);
      ++d;
      skip = false;
    }
    if (!skip) continue;

    if (d == root_depth) return st;
    if (cur.x.add_bit(n - d)) return st;  // wrapped: tree exhausted
    const int nd = n - cur.x.lowest_set_bit();
    if (nd <= root_depth) return st;  // left the region
    for (int p = d - 1; p >= nd - 1; --p) state.backtrack(path[static_cast<std::size_t>(p)]);
    path[static_cast<std::size_t>(nd - 1)] = values.spin(nd - 1, true);
    state.descend(path[static_cast<std::size_t>(nd - 1)]);
    d = nd;
  }
}

namespace {

struct FrontierEntry {
  NodeCursor cur;
  BoundState state;
  energy_t key;
};

// pop order: smallest key, then deepest, then smallest x
struct FrontierCmp {
  bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
    if (a.key != b.key) return a.key > b.key;
    if (a.cur.depth != b.cur.depth) return a.cur.depth < b.cur.depth;
    return b.cur.x < a.cur.x;
  }
};

}  // namespace

SearchStats hybrid_region(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                          const ValueTable& values, NodeCursor cur, BoundState state, Assignment path,
                          SharedIncumbent& incumbent, const SearchLimits& limits,
                          std::size_t frontier_limit, const EngineOptions& opts) {
  (void)path;
  const int n = inst.num_vars();
  SearchStats st;
  frontier_limit = std::max<std::size_t>(frontier_limit, 1);

  if (opts.count_root) ++st.nodes;
  const energy_t root_bound = state.bound();
  if (cur.depth == n) {
    ++st.leaves;
    if (root_bound < incumbent.value()) incumbent.offer(root_bound, cursor_assignment(cur, n, values));
    return st;
  }
  if (opts.prune && root_bound >= incumbent.value()) {
    add_pruned_mass(st, n, cur.depth);
    return st;
  }

  std::vector<FrontierEntry> heap;
  const FrontierCmp cmp;
  heap.push_back({cur, std::move(state), root_bound});

  energy_t reported_dual = -kEnergyInf;
  auto report_dual = [&](energy_t candidate) {
    if (!opts.on_dual) return;
    candidate = std::min(candidate, incumbent.value());
    if (candidate > reported_dual) {
      reported_dual = candidate;
      opts.on_dual(reported_dual);
    }
  };

  while (!heap.empty()) {
    if (limits.expired()) {
      st.completed = false;
      st.open_dual = std::min(st.open_dual, heap.front().key);
      return st;
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    FrontierEntry e = std::move(heap.back());
    heap.pop_back();

    report_dual(e.key);
    if (opts.prune && e.key >= incumbent.value()) {
      add_pruned_mass(st, n, e.cur.depth);
      continue;
    }

    if (heap.size() >= frontier_limit) {
      // frontier full: exhaust the cheapest subtree depth-first
      EngineOptions dfs_opts;
      dfs_opts.prune = opts.prune;
      dfs_opts.count_root = false;
      SearchStats sub = dfs_region(inst, table, mode, values, e.cur, std::move(e.state),
                                   cursor_assignment(e.cur, n, values), incumbent, limits, dfs_opts);
      st.merge(sub);
      if (!st.completed) {
        if (!heap.empty()) st.open_dual = std::min(st.open_dual, heap.front().key);
        return st;
      }
      continue;
    }

    const int p = e.cur.depth;
    for (const bool second : {false, true}) {
      BoundState child_state = second ? std::move(e.state) : e.state;
      child_state.descend(values.spin(p, second));
      NodeCursor cc = e.cur;
      cc.depth = p + 1;
      if (second) cc.x.add_bit(n - 1 - p);
      ++st.nodes;
      const energy_t b = child_state.bound();
      if (cc.depth == n) {
        ++st.leaves;
        if (b < incumbent.value()) incumbent.offer(b, cursor_assignment(cc, n, values));
        continue;
      }
      if (opts.prune && b >= incumbent.value()) {
        add_pruned_mass(st, n, cc.depth);
        continue;
      }
      heap.push_back({std::move(cc), std::move(child_state), std::max(b, e.key)});
      std::push_heap(heap.begin(), heap.end(), cmp);
    }
  }
  report_dual(kEnergyInf);
  return st;
}

namespace {

RegionSolveResult run_root(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                           const SearchLimits& limits, std::size_t frontier_limit, bool hybrid,
                           energy_t initial_incumbent, const Assignment* initial_assignment,
                           const std::function<void(energy_t)>& on_dual) {
  const int n = inst.num_vars();
  SharedIncumbent cell(initial_assignment == nullptr ? initial_incumbent : kEnergyInf);
  if (initial_assignment != nullptr) cell.offer(initial_incumbent, *initial_assignment);

  const ValueTable values = ValueTable::from_fields(inst);
  BoundState state(inst, table, mode);
  EngineOptions opts;
  opts.on_dual = on_dual;
  RegionSolveResult r;
  if (hybrid)
    r.stats = hybrid_region(inst, table, mode, values, root_cursor(n), std::move(state), {}, cell,
                            limits, frontier_limit, opts);
  else
    r.stats = dfs_region(inst, table, mode, values, root_cursor(n), std::move(state), {}, cell,
                         limits, opts);
  auto [best, assignment] = cell.snapshot();
  r.best = best;
  r.assignment = std::move(assignment);
  return r;
}

}  // namespace

RegionSolveResult dfs_solve(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                            const SearchLimits& limits, energy_t initial_incumbent,
                            const Assignment* initial_assignment) {
  return run_root(inst, table, mode, limits, 1, false, initial_incumbent, initial_assignment, {});
}

RegionSolveResult bfs_hybrid_solve(const IsingInstance& inst, const SubproblemTable& table,
                                   FieldMode mode, const SearchLimits& limits,
                                   std::size_t frontier_limit, energy_t initial_incumbent,
                                   const Assignment* initial_assignment,
                                   const std::function<void(energy_t)>& on_dual) {
  return run_root(inst, table, mode, limits, frontier_limit, true, initial_incumbent,
                  initial_assignment, on_dual);
}

}  // namespace spinbound
