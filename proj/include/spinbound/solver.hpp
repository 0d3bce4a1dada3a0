#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spinbound/bounds.hpp"
#include "spinbound/instance.hpp"
#include "spinbound/ordering.hpp"
#include "spinbound/primal.hpp"
#include "spinbound/traversal.hpp"

namespace spinbound {

enum class BoundRule { hdk, kh_only };

struct SolverConfig {
  int k_min = 20;                       // levels served by the KH fallback
  std::size_t frontier_limit = 100000;  // max best-first frontier entries
  int threads = 1;                      // power of two; workers partition x-prefixes
  FieldMode field_mode = FieldMode::keep_in_subproblems;
  BoundRule bound_rule = BoundRule::hdk;
  bool reorder = true;
  double time_limit_s = 0;  // <= 0: unlimited
  std::uint64_t seed = 0;
  AnnealSchedule sa_full{1000, 0, 0.01, 4, 0};
  AnnealSchedule sa_sub{100, 0, 0.01, 1, 0};
  AnnealSchedule sa_order{10, 0, 0.01, 1, 0};
  std::size_t frontier_memory_cap = std::size_t{2} << 30;  // bytes, all workers together
  bool dump_etable = false;
};

enum class SolveStatus { optimal, timeout, infeasible_config };
const char* status_name(SolveStatus s);

struct DualTracePoint {
  std::string phase;
  double value;  // restored units
};

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible_config;
  std::string message;

  // restored to the source problem's units (offset added, scale divided out);
  // objective follows the published-table convention per kind: minimization
  // value for qubo/ising, cut value for maxcut
  double objective = 0;
  bool objective_integral = false;
  std::int64_t objective_int = 0;
  double energy = 0;  // ising energy, restored
  double dual_bound = 0;
  double gap = 0;
  std::int64_t cut_value = 0;  // scaled out only when integral

  std::vector<int> assignment_spins;   // original variable order, -1/+1
  std::vector<int> assignment_binary;  // x_i = (1 - s_i)/2
  std::vector<int> cut_set;            // maxcut: 1-based vertices on the +1 side

  std::uint64_t nodes_total = 0, nodes_precompute = 0, nodes_search = 0, leaves = 0;
  double t_order_s = 0, t_precompute_s = 0, t_search_s = 0, t_total_s = 0;
  std::vector<int> permutation;   // 1-based original variable per branching position
  std::vector<energy_t> etable;   // raw scaled E values (when requested)
  std::vector<DualTracePoint> dual_trace;
  int threads = 1;
  std::uint64_t seed = 0;

  // exact internal values (scaled units) for tests and the verify command
  energy_t internal_optimum = 0;  // raw + offset
  energy_t internal_dual = 0;
  bool complete = false;
};

// gap = (primal - dual) / max(|dual|, 1); zero certifies optimality
double compute_gap(double primal, double dual);

struct PrecomputeResult {
  SubproblemTable table;
  SearchStats stats;
  energy_t global_dual_raw = -kEnergyInf;  // best extrapolated bound, raw
  bool completed = true;
};

// Solves the nested trailing subproblems of the already-permuted instance in
// ascending dimension (each warm-started by annealing and the greedy
// extension of the previous optimum), fills KH fallback entries above the
// cutoff, raises the extrapolated global dual after every completed level,
// and feeds full-problem incumbents back into `incumbent`.
PrecomputeResult precompute_table(const IsingInstance& ordered, const SolverConfig& cfg,
                                  const SearchLimits& limits, SharedIncumbent& incumbent,
                                  std::vector<std::pair<std::string, energy_t>>* trace_raw);

SolveReport solve(const Problem& problem, const SolverConfig& cfg);
SolveReport solve(const IsingInstance& inst, const SolverConfig& cfg);

std::string report_to_json(const SolveReport& rep);
std::string report_summary(const SolveReport& rep);

}  // namespace spinbound
