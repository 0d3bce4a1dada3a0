#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>

#include "spinbound/bounds.hpp"
#include "spinbound/instance.hpp"
#include "spinbound/ordering.hpp"

namespace spinbound {

constexpr int kMaxVars = 512;
constexpr energy_t kEnergyInf = std::numeric_limits<energy_t>::max();

// n-bit counter over the leaves of the branching tree. Branching variable at
// position p (0-based) owns bit n-1-p, so the first variable is the most
// significant bit and skipping a subtree is a plain binary add with natural
// carry. Bits below the current depth stay zero.
class BitCounter {
 public:
  BitCounter() = default;
  explicit BitCounter(int nbits) : nbits_(nbits) {
    if (nbits < 0 || nbits > kMaxVars) throw std::invalid_argument("unsupported variable count");
  }

  int nbits() const { return nbits_; }

  bool bit(int pos) const { return (w_[static_cast<std::size_t>(pos >> 6)] >> (pos & 63)) & 1; }

  // x += 2^pos; returns true if the counter wrapped to zero
  bool add_bit(int pos) {
    std::size_t word = static_cast<std::size_t>(pos >> 6);
    std::uint64_t carry = std::uint64_t{1} << (pos & 63);
    const std::size_t nwords = static_cast<std::size_t>((nbits_ + 63) >> 6);
    while (carry != 0 && word < nwords) {
      const std::uint64_t before = w_[word];
      w_[word] += carry;
      carry = w_[word] < before ? 1 : 0;
      ++word;
    }
    if (nbits_ == 0) return true;
    // mask off anything past the top bit
    const int top = (nbits_ - 1) & 63;
    std::uint64_t& last = w_[static_cast<std::size_t>((nbits_ - 1) >> 6)];
    if (top != 63) last &= (std::uint64_t{1} << (top + 1)) - 1;
    return is_zero();
  }

  bool is_zero() const {
    for (std::uint64_t v : w_)
      if (v != 0) return false;
    return true;
  }

  int lowest_set_bit() const {
    const std::size_t nwords = static_cast<std::size_t>((nbits_ + 63) >> 6);
    for (std::size_t k = 0; k < nwords; ++k)
      if (w_[k] != 0) return static_cast<int>(k) * 64 + std::countr_zero(w_[k]);
    return -1;
  }

  bool operator==(const BitCounter& o) const { return nbits_ == o.nbits_ && w_ == o.w_; }

  // lexicographic by numeric value
  bool operator<(const BitCounter& o) const {
    for (std::size_t k = w_.size(); k-- > 0;)
      if (w_[k] != o.w_[k]) return w_[k] < o.w_[k];
    return false;
  }

 private:
  int nbits_ = 0;
  std::array<std::uint64_t, kMaxVars / 64> w_{};
};

// B&B tree node: depth variables assigned, encoded in the top bits of x.
struct NodeCursor {
  BitCounter x;
  int depth = 0;
};

inline NodeCursor root_cursor(int n) { return NodeCursor{BitCounter(n), 0}; }

// Advances past the subtree rooted at c (which covers 2^(n-depth) leaves):
// adds 2^(n-d) to x and rereads the depth from the lowest set bit. Returns
// nothing once the counter wraps, i.e. the tree is exhausted.
std::optional<NodeCursor> skip_subtree(NodeCursor c, int n);

// Per-position first/second branch values (global value ordering).
struct ValueTable {
  std::vector<spin_t> first;

  static ValueTable plain(int n) { return ValueTable{std::vector<spin_t>(static_cast<std::size_t>(n), 1)}; }
  static ValueTable from_fields(const IsingInstance& inst);

  spin_t spin(int pos, bool second_branch) const {
    const spin_t f = first[static_cast<std::size_t>(pos)];
    return second_branch ? static_cast<spin_t>(-f) : f;
  }
};

// assignment view of a cursor (positions below depth)
Assignment cursor_assignment(const NodeCursor& c, int n, const ValueTable& values);

// Monotone best-solution cell shared between workers. Readers may see a
// stale (higher) value; updates only ever lower it.
class SharedIncumbent {
 public:
  explicit SharedIncumbent(energy_t init = kEnergyInf) : value_(init) {}

  energy_t value() const { return value_.load(std::memory_order_relaxed); }

  bool offer(energy_t e, const Assignment& s) {
    if (e >= value()) return false;
    std::lock_guard<std::mutex> lock(m_);
    if (e >= value_.load(std::memory_order_relaxed)) return false;
    best_ = s;
    value_.store(e, std::memory_order_relaxed);
    return true;
  }

  std::pair<energy_t, Assignment> snapshot() const {
    std::lock_guard<std::mutex> lock(m_);
    return {value_.load(std::memory_order_relaxed), best_};
  }

 private:
  std::atomic<energy_t> value_;
  mutable std::mutex m_;
  Assignment best_;
};

struct SearchLimits {
  std::chrono::steady_clock::time_point deadline{};  // zero: none
  bool has_deadline = false;

  bool expired() const {
    return has_deadline && std::chrono::steady_clock::now() >= deadline;
  }
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
  std::uint64_t pruned_leaf_mass = 0;  // sum over pruned nodes of 2^(n-d); meaningful for n <= 63
  bool completed = true;
  energy_t open_dual = kEnergyInf;  // valid bound on everything left unexplored (timeout only)

  void merge(const SearchStats& o) {
    nodes += o.nodes;
    leaves += o.leaves;
    pruned_leaf_mass += o.pruned_leaf_mass;
    completed = completed && o.completed;
    open_dual = std::min(open_dual, o.open_dual);
  }
};

struct EngineOptions {
  bool prune = true;
  bool count_root = true;
  std::function<void(energy_t)> on_dual;  // hybrid: non-decreasing popped keys
};

// Exhausts the subtree rooted at `cur` depth-first. `state` must be
// positioned at `cur`; `path` holds the spins of the assigned prefix (length
// >= depth). Pruning compares the node bound against the shared incumbent
// (bound >= incumbent prunes).
SearchStats dfs_region(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                       const ValueTable& values, NodeCursor cur, BoundState state, Assignment path,
                       SharedIncumbent& incumbent, const SearchLimits& limits,
                       const EngineOptions& opts = {});

// Best-first search keyed by the node bound, falling back to DFS excursions
// on the cheapest node whenever the frontier would outgrow frontier_limit.
SearchStats hybrid_region(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                          const ValueTable& values, NodeCursor cur, BoundState state, Assignment path,
                          SharedIncumbent& incumbent, const SearchLimits& limits,
                          std::size_t frontier_limit, const EngineOptions& opts = {});

// convenience wrappers over a whole instance (used by subproblem solves and
// tests); initial_incumbent preloads the cell
struct RegionSolveResult {
  energy_t best = kEnergyInf;
  Assignment assignment;
  SearchStats stats;
};

RegionSolveResult dfs_solve(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode,
                            const SearchLimits& limits, energy_t initial_incumbent = kEnergyInf,
                            const Assignment* initial_assignment = nullptr);

RegionSolveResult bfs_hybrid_solve(const IsingInstance& inst, const SubproblemTable& table,
                                   FieldMode mode, const SearchLimits& limits,
                                   std::size_t frontier_limit,
                                   energy_t initial_incumbent = kEnergyInf,
                                   const Assignment* initial_assignment = nullptr,
                                   const std::function<void(energy_t)>& on_dual = {});

}  // namespace spinbound
