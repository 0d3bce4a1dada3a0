#include "spinbound/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace spinbound {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::timeout:
      return "timeout";
    case SolveStatus::infeasible_config:
      return "infeasible-config";
  }
  return "?";
}

double compute_gap(double primal, double dual) {
  if (primal == dual) return 0.0;
  return (primal - dual) / std::max(std::abs(dual), 1.0);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

spin_t one_var_optimum(energy_t h) { return h >= 0 ? spin_t{-1} : spin_t{1}; }

}  // namespace

PrecomputeResult precompute_table(const IsingInstance& ordered, const SolverConfig& cfg,
                                  const SearchLimits& limits, SharedIncumbent& incumbent,
                                  std::vector<std::pair<std::string, energy_t>>* trace_raw) {
  const int n = ordered.num_vars();
  const FieldMode mode = cfg.field_mode;
  PrecomputeResult out;
  out.table = make_fallback_table(ordered, mode);

  auto raise_dual = [&](energy_t d, const std::string& phase) {
    if (d > out.global_dual_raw) {
      out.global_dual_raw = d;
      if (trace_raw != nullptr) trace_raw->emplace_back(phase, d);
    }
  };
  // root KH bound extrapolates trivially (k = 0)
  raise_dual(extrapolate_global_bound(kh_root(ordered, 0, mode == FieldMode::keep_in_subproblems), ordered,
                                      0, mode),
             "root");

  const int k_min_eff = std::max(0, std::min(cfg.k_min, n - 2));
  const int exact_upto = cfg.bound_rule == BoundRule::kh_only ? 1 : n - k_min_eff - 1;

  // optimum of the deepest one-variable subproblem seeds the warm-start chain
  Assignment prev{one_var_optimum(mode == FieldMode::keep_in_subproblems ? ordered.field(n - 1) : 0)};

  for (int l = 2; l <= exact_upto; ++l) {
    if (limits.expired()) {
      out.completed = false;
      return out;
    }
    const IsingInstance sub = ordered.trailing_subinstance(l, mode == FieldMode::omit_in_subproblems);

    Assignment greedy = greedy_extend(sub, prev);
    AnnealSchedule sched = cfg.sa_sub;
    sched.rng_seed = cfg.seed + static_cast<std::uint64_t>(l);
    Assignment annealed = simulated_annealing(sub, &greedy, sched);
    const Assignment* warm = &annealed;
    if (sub.raw_energy(greedy) < sub.raw_energy(annealed)) warm = &greedy;

    RegionSolveResult r = dfs_solve(sub, out.table, mode, limits, sub.raw_energy(*warm), warm);
    out.stats.merge(r.stats);
    if (!r.stats.completed) {
      out.completed = false;
      return out;
    }
    out.table.value[static_cast<std::size_t>(l)] = r.best;
    out.table.exact[static_cast<std::size_t>(l)] = 1;

    raise_dual(extrapolate_global_bound(r.best, ordered, n - l, mode), "E" + std::to_string(l));

    // lift the subproblem optimum to a full-problem incumbent
    Assignment full = greedy_extend(ordered, r.assignment);
    incumbent.offer(ordered.raw_energy(full), full);
    prev = std::move(r.assignment);
  }
  return out;
}

namespace {

struct DualAggregator {
  std::mutex m;
  std::vector<energy_t> worker_dual;
  energy_t base = -kEnergyInf;      // best extrapolated bound from precompute
  energy_t reported = -kEnergyInf;  // monotone max
  std::vector<std::pair<std::string, energy_t>>* trace = nullptr;
  SharedIncumbent* incumbent = nullptr;

  void update(int w, energy_t v) {
    std::lock_guard<std::mutex> lock(m);
    worker_dual[static_cast<std::size_t>(w)] = std::max(worker_dual[static_cast<std::size_t>(w)], v);
    energy_t cand = kEnergyInf;
    for (energy_t d : worker_dual) cand = std::min(cand, d);
    cand = std::max(cand, base);
    cand = std::min(cand, incumbent->value());
    if (cand > reported) {
      reported = cand;
      if (trace != nullptr) trace->emplace_back("search", cand);
    }
  }
};

struct RestoredValue {
  double value;
  bool integral;
  std::int64_t as_int;
};

RestoredValue restore(energy_t scaled, energy_t scale) {
  RestoredValue r;
  r.integral = scaled % scale == 0;
  r.as_int = r.integral ? scaled / scale : 0;
  r.value = static_cast<double>(scaled) / static_cast<double>(scale);
  if (r.integral) r.value = static_cast<double>(r.as_int);
  return r;
}

}  // namespace

SolveReport solve(const Problem& problem, const SolverConfig& cfg) {
  const IsingInstance& inst = problem.ising;
  const int n = inst.num_vars();
  const auto t_start = Clock::now();

  SolveReport rep;
  rep.threads = cfg.threads;
  rep.seed = cfg.seed;
  auto fail = [&rep](const std::string& msg) {
    rep.status = SolveStatus::infeasible_config;
    rep.message = msg;
    return rep;
  };

  if (n < 1) return fail("empty instance");
  if (n > kMaxVars) return fail("instance exceeds the supported variable count");
  if (cfg.threads < 1 || (cfg.threads & (cfg.threads - 1)) != 0)
    return fail("thread count must be a power of two");
  const int k_t = std::countr_zero(static_cast<unsigned>(cfg.threads));
  if (k_t > n) return fail("more thread prefixes than variables");
  if (cfg.frontier_limit < 1) return fail("frontier limit must be at least 1");
  if (cfg.k_min < 0) return fail("k_min must be non-negative");
  const std::size_t entry_bytes = sizeof(BoundState) + sizeof(NodeCursor) + 16 +
                                  2 * sizeof(energy_t) * static_cast<std::size_t>(n);
  if (cfg.frontier_limit > cfg.frontier_memory_cap / entry_bytes)
    return fail("frontier limit exceeds the memory cap (" +
                std::to_string(cfg.frontier_memory_cap >> 20) + " MiB)");

  SearchLimits limits;
  if (cfg.time_limit_s > 0) {
    limits.has_deadline = true;
    limits.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                         std::chrono::duration<double>(cfg.time_limit_s));
  }

  // phase 1: global variable order
  VariableOrder order;
  {
    const int k_min_eff = std::max(0, std::min(cfg.k_min, n - 2));
    if (cfg.reorder && n >= 3) {
      AnnealSchedule sched = cfg.sa_order;
      sched.rng_seed = cfg.seed;
      order = build_order(inst, k_min_eff, sched);
    } else {
      order = identity_order(n);
    }
  }
  const IsingInstance ordered = inst.permuted(order.perm);
  rep.permutation.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) rep.permutation[static_cast<std::size_t>(p)] = order.perm[static_cast<std::size_t>(p)] + 1;
  rep.t_order_s = seconds_since(t_start);

  // phase 2: incumbent seed + subproblem precompute
  std::vector<std::pair<std::string, energy_t>> trace_raw;
  SharedIncumbent incumbent;
  {
    AnnealSchedule sched = cfg.sa_full;
    sched.rng_seed = cfg.seed;
    Assignment sa = simulated_annealing(ordered, nullptr, sched);
    incumbent.offer(ordered.raw_energy(sa), sa);
  }
  const auto t_pre = Clock::now();
  PrecomputeResult pre = precompute_table(ordered, cfg, limits, incumbent, &trace_raw);
  rep.t_precompute_s = seconds_since(t_pre);
  rep.nodes_precompute = pre.stats.nodes;
  if (cfg.dump_etable) rep.etable = pre.table.value;

  // phase 3: prefix-partitioned search
  const auto t_search = Clock::now();
  SearchStats search_stats;
  bool search_ran = pre.completed;
  if (pre.completed) {
    const int n_t = cfg.threads;
    const std::size_t worker_frontier = std::max<std::size_t>(1, cfg.frontier_limit / static_cast<std::size_t>(n_t));
    const ValueTable values = ValueTable::from_fields(ordered);

    DualAggregator agg;
    agg.worker_dual.assign(static_cast<std::size_t>(n_t), -kEnergyInf);
    agg.base = pre.global_dual_raw;
    agg.trace = &trace_raw;
    agg.incumbent = &incumbent;

    std::vector<SearchStats> wstats(static_cast<std::size_t>(n_t));
    std::vector<std::exception_ptr> werr(static_cast<std::size_t>(n_t));
    auto run_worker = [&](int w) {
      try {
        NodeCursor cur = root_cursor(n);
        cur.depth = k_t;
        BoundState state(ordered, pre.table, cfg.field_mode);
        for (int j = 0; j < k_t; ++j) {
          const bool second = (w >> (k_t - 1 - j)) & 1;
          if (second) cur.x.add_bit(n - 1 - j);
          state.descend(values.spin(j, second));
        }
        EngineOptions opts;
        opts.on_dual = [&agg, w](energy_t v) { agg.update(w, v); };
        wstats[static_cast<std::size_t>(w)] =
            hybrid_region(ordered, pre.table, cfg.field_mode, values, cur, std::move(state),
                          cursor_assignment(cur, n, values), incumbent, limits, worker_frontier, opts);
      } catch (...) {
        werr[static_cast<std::size_t>(w)] = std::current_exception();
      }
    };

    if (n_t == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(n_t));
      for (int w = 0; w < n_t; ++w) pool.emplace_back(run_worker, w);
      for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : werr)
      if (e) std::rethrow_exception(e);
    for (const SearchStats& s : wstats) search_stats.merge(s);
  }
  rep.t_search_s = search_ran ? seconds_since(t_search) : 0;
  rep.nodes_search = search_stats.nodes;
  rep.nodes_total = rep.nodes_precompute + rep.nodes_search;
  rep.leaves = search_stats.leaves;

  // assemble and re-verify
  auto [best_raw, best_by_pos] = incumbent.snapshot();
  if (best_by_pos.empty()) throw std::logic_error("no incumbent produced");
  if (ordered.raw_energy(best_by_pos) != best_raw)
    throw std::logic_error("incumbent failed energy re-verification");
  const Assignment best_orig = unpermute_assignment(best_by_pos, order);
  if (inst.raw_energy(best_orig) != best_raw)
    throw std::logic_error("assignment failed re-verification after unpermuting");

  rep.complete = pre.completed && search_stats.completed;
  rep.status = rep.complete ? SolveStatus::optimal : SolveStatus::timeout;
  rep.internal_optimum = best_raw + inst.offset();
  energy_t dual_raw;
  if (rep.complete) {
    dual_raw = best_raw;
  } else if (search_ran) {
    dual_raw = std::max(pre.global_dual_raw, std::min(search_stats.open_dual, best_raw));
  } else {
    dual_raw = pre.global_dual_raw;  // precompute timed out; only the extrapolation is proven
  }
  rep.internal_dual = dual_raw + inst.offset();

  const energy_t scale = inst.scale();
  const RestoredValue energy = restore(rep.internal_optimum, scale);
  rep.energy = energy.value;
  const RestoredValue dual = restore(rep.internal_dual, scale);
  rep.dual_bound = dual.value;
  rep.gap = compute_gap(rep.energy, rep.dual_bound);

  rep.assignment_spins.assign(best_orig.begin(), best_orig.end());
  rep.assignment_binary = spins_to_binary(best_orig);
  if (problem.kind == Kind::maxcut) {
    const energy_t cut_scaled = (problem.maxcut_total_w - rep.internal_optimum) / 2;
    const RestoredValue cut = restore(cut_scaled, scale);
    rep.objective = cut.value;
    rep.objective_integral = cut.integral;
    rep.objective_int = cut.as_int;
    rep.cut_value = cut.integral ? cut.as_int : cut_scaled;
    for (int i = 0; i < n; ++i)
      if (best_orig[static_cast<std::size_t>(i)] > 0) rep.cut_set.push_back(i + 1);
  } else {
    rep.objective = energy.value;
    rep.objective_integral = energy.integral;
    rep.objective_int = energy.as_int;
  }

  rep.dual_trace.reserve(trace_raw.size());
  for (const auto& [phase, v] : trace_raw)
    rep.dual_trace.push_back({phase, restore(v + inst.offset(), scale).value});

  rep.t_total_s = seconds_since(t_start);
  return rep;
}

SolveReport solve(const IsingInstance& inst, const SolverConfig& cfg) {
  return solve(ising_problem(inst), cfg);
}

std::string report_to_json(const SolveReport& rep) {
  nlohmann::json j;
  j["status"] = status_name(rep.status);
  if (!rep.message.empty()) j["message"] = rep.message;
  if (rep.status == SolveStatus::infeasible_config) return j.dump(2);
  if (rep.objective_integral)
    j["objective"] = rep.objective_int;
  else
    j["objective"] = rep.objective;
  j["energy"] = rep.energy;
  j["dual_bound"] = rep.dual_bound;
  j["gap"] = rep.gap;
  j["assignment"] = {{"spins", rep.assignment_spins}, {"binary", rep.assignment_binary}};
  if (!rep.cut_set.empty() || rep.cut_value != 0) {
    j["cut_value"] = rep.cut_value;
    j["assignment"]["cut_set"] = rep.cut_set;
  }
  j["nodes_total"] = rep.nodes_total;
  j["nodes_precompute"] = rep.nodes_precompute;
  j["nodes_search"] = rep.nodes_search;
  j["times"] = {{"order_s", rep.t_order_s},
                {"precompute_s", rep.t_precompute_s},
                {"search_s", rep.t_search_s},
                {"total_s", rep.t_total_s}};
  j["permutation"] = rep.permutation;
  if (!rep.etable.empty()) j["etable"] = rep.etable;
  auto& tr = j["dual_trace"] = nlohmann::json::array();
  for (const DualTracePoint& p : rep.dual_trace) tr.push_back({{"phase", p.phase}, {"dual", p.value}});
  j["threads"] = rep.threads;
  j["seed"] = rep.seed;
  return j.dump(2);
}

std::string report_summary(const SolveReport& rep) {
  if (rep.status == SolveStatus::infeasible_config)
    return std::string("status=infeasible-config (") + rep.message + ")";
  std::ostringstream os;
  os << "status=" << status_name(rep.status) << " objective=" << rep.objective;
  if (rep.cut_value != 0 || !rep.cut_set.empty()) os << " cut=" << rep.cut_value;
  os << " dual=" << rep.dual_bound << " gap=" << rep.gap << " nodes=" << rep.nodes_total
     << " (precompute " << rep.nodes_precompute << ") time=" << rep.t_total_s << "s threads="
     << rep.threads;
  return os.str();
}

}  // namespace spinbound
