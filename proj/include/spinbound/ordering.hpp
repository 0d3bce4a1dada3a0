#pragma once

#include <utility>
#include <vector>

#include "spinbound/instance.hpp"
#include "spinbound/primal.hpp"

namespace spinbound {

// Global branching order: position p (0-based, 0 = top of the tree) holds
// original variable perm[p].
struct VariableOrder {
  std::vector<int> perm;
  std::vector<int> inverse;
};

VariableOrder identity_order(int n);
VariableOrder make_order(std::vector<int> perm);

// Branch on -1 first when h_i >= 0, else on +1 first.
std::pair<spin_t, spin_t> value_order(energy_t h);

// Reordering scores on a candidate subproblem. s_star assigns every variable
// of `sub`; E_i(s_star) = s_i h_i + sum_{j != i} J_ij s_i s_j counts each
// coupling incident to i once.
energy_t score_h1(const IsingInstance& sub, int i, const Assignment& s_star);
energy_t score_h2(const IsingInstance& sub, int i, const Assignment& s_star);

// Builds the order bottom-up: the variable chosen at dimension step i joins
// the deep (trailing) block at position n-i. Steps below n-2*k_min pick the
// smallest H1, later steps the smallest H2 (ties: lowest original index).
// Each step refreshes a working assignment with a very short anneal on the
// chosen block; candidate spins come from that persistent assignment, seeded
// by one short full-problem anneal up front.
VariableOrder build_order(const IsingInstance& inst, int k_min, const AnnealSchedule& sched);

// pulls a solved assignment in branching-position space back to original
// variable numbering
Assignment unpermute_assignment(const Assignment& by_position, const VariableOrder& order);

}  // namespace spinbound
