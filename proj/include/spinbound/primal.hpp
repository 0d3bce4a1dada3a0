#pragma once

#include <cstdint>

#include "spinbound/instance.hpp"

namespace spinbound {

struct AnnealSchedule {
  int sweeps = 1000;
  double t_start = 0;  // <= 0: auto, max_i (sum_j |J_ij| + |h_i|)
  double t_end = 0.01;
  int restarts = 4;
  std::uint64_t rng_seed = 0;
};

// Extends an assignment of the trailing `partial.size()` variables to a full
// one: repeatedly assign the unassigned spin with the largest |local field|
// to the value that lowers the energy (ties: lowest index, zero field: -1).
Assignment greedy_extend(const IsingInstance& inst, const Assignment& partial);

// Single-spin-flip Metropolis annealing with a geometric temperature ramp and
// incremental energy deltas. Returns the best assignment seen across all
// restarts, including `init` itself when given. Deterministic for a fixed
// schedule; restart r uses seed rng_seed + r.
Assignment simulated_annealing(const IsingInstance& inst, const Assignment* init,
                               const AnnealSchedule& sched);

}  // namespace spinbound
