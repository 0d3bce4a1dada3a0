#pragma once

#include "spinbound/instance.hpp"

namespace spinbound {

struct BruteForceResult {
  energy_t raw_min = 0;  // no offset
  Assignment assignment;
};

// Exhaustive minimum over all 2^n assignments via Gray-code enumeration with
// incremental local-field updates, optionally partitioned over fixed prefixes
// across threads. Guarded to n <= 26.
BruteForceResult brute_force_min(const IsingInstance& inst, int threads = 1);

}  // namespace spinbound
