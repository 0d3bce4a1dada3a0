#pragma once

#include <cstdlib>
#include <vector>

#include "spinbound/instance.hpp"

namespace spinbound {

// Treatment of the external field term in the recursive bound: either the
// trailing subproblems are solved field-free and unassigned fields enter the
// absolute-value sum (mode 1), or fields stay inside the subproblems and only
// the assigned-spin energy carries them (mode 2).
enum class FieldMode { omit_in_subproblems, keep_in_subproblems };

// Optimal values E_l of the nested trailing subproblems (raw energies, no
// offset). Slots above `exact` are filled with the KH root bound of the same
// subproblem, which is a valid stand-in for E_l. value[0] = 0 and value[1]
// follow the conventions below so every search depth has a defined entry.
struct SubproblemTable {
  int n = 0;
  std::vector<energy_t> value;          // size n + 1, indexed by dimension l
  std::vector<std::uint8_t> exact;      // value[l] is the true optimum
  energy_t lookup(int l) const { return value[static_cast<std::size_t>(l)]; }
};

// E_1 of the trailing one-variable problem: -|h_{n-1}| when fields stay in
// subproblems, 0 when they are omitted.
energy_t subproblem_e1(const IsingInstance& inst, FieldMode mode);

// Table with every l >= 2 filled by the KH fallback (exact entries are added
// later by the precompute phase).
SubproblemTable make_fallback_table(const IsingInstance& inst, FieldMode mode);

// Root bound of the trailing subproblem {from..n-1}:
//   -sum_{from<=i<j} |J_ij|  (- sum_{i>=from} |h_i| when fields are counted)
energy_t kh_root(const IsingInstance& inst, int from, bool include_fields);

// One branching step of the KH recursion: the parent bound plus
// 2 sum_{i<=k} |J_{i,k+1}| [J_{i,k+1} s_i s_{k+1} > 0] (and the analogous
// field correction when fields are counted). prefix holds s_0..s_{k-1}.
energy_t kh_child(energy_t parent_bound, const IsingInstance& inst, const Assignment& prefix,
                  spin_t s_next, bool include_fields);

// From-scratch evaluation of the recursive bound at a node with the given
// prefix assigned (raw, no offset):
//   sum_{i<j<=k} J_ij s_i s_j + sum_{i<=k} h_i s_i
//   - sum_{j>k} |sigma_j (+ h_j in mode 1)| + E_{n-k}
energy_t hdk_bound_direct(const IsingInstance& inst, const Assignment& prefix,
                          const SubproblemTable& table, FieldMode mode);

// Lifts a bound on the trailing (n-k)-dimensional subproblem to a bound on
// the full problem: every coupling touching the excluded k-variable prefix
// surrenders its magnitude, as does every excluded field (in mode 1 the
// trailing fields too, since the subproblem bound was field-free).
energy_t extrapolate_global_bound(energy_t b_sub, const IsingInstance& inst, int k, FieldMode mode);

// Incrementally maintained node bound. A node at depth k stores the partial
// energy of assigned spins, the accumulators sigma_j = sum_{i<=k} J_ij s_i
// for the unassigned j, and the running absolute-value sum, so that a
// parent-to-child update touches only the forward neighbors of the branching
// variable. descend/backtrack are exact inverses (integer arithmetic).
class BoundState {
 public:
  BoundState(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode);

  void descend(spin_t s);    // assign the variable at the current depth
  void backtrack(spin_t s);  // undo the last descend (s = the spin it assigned)

  int depth() const { return depth_; }
  energy_t partial_energy() const { return pe_; }
  energy_t sigma(int j) const { return sigma_[static_cast<std::size_t>(j)]; }
  energy_t bound() const { return pe_ - abs_sum_ + table_->lookup(n_ - depth_); }

  bool operator==(const BoundState& o) const {
    return depth_ == o.depth_ && pe_ == o.pe_ && abs_sum_ == o.abs_sum_ && sigma_ == o.sigma_;
  }

 private:
  const IsingInstance* inst_;
  const SubproblemTable* table_;
  int n_;
  int depth_ = 0;
  energy_t pe_ = 0;
  energy_t abs_sum_ = 0;
  std::vector<energy_t> sigma_;
  std::vector<energy_t> mh_;  // h in mode 1, zeros in mode 2
};

}  // namespace spinbound
