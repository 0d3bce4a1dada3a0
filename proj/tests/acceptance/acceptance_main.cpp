// Acceptance suite: one criterion per function, one pass/fail line each.
// Criteria 1-3 need the BiqMac instance files under data/biqmac (see
// tools/fetch_biqmac.sh); everything else is self-contained.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "spinbound/bench.hpp"
#include "spinbound/brute_force.hpp"
#include "spinbound/rng.hpp"
#include "spinbound/solver.hpp"

using namespace spinbound;

namespace {

#ifndef SPINBOUND_DATA_DIR
#define SPINBOUND_DATA_DIR "data/biqmac"
#endif

std::string data_dir() {
  if (const char* env = std::getenv("SPINBOUND_DATA_DIR")) return env;
  return SPINBOUND_DATA_DIR;
}

struct CriterionResult {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct GoldenCase {
  std::string file;
  std::int64_t optimum;
};

// solves one published instance and checks the exact table value
void run_golden(CriterionResult& r, const GoldenCase& g, int threads, double cap_s) {
  const std::string path = data_dir() + "/" + g.file;
  if (!std::ifstream(path)) {
    r.fail(g.file + ": missing data file (run tools/fetch_biqmac.sh)");
    return;
  }
  SolverConfig cfg;
  cfg.threads = threads;
  cfg.time_limit_s = cap_s;
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  try {
    rep = solve(load_problem_file(path, Kind::qubo, Sense::maximize), cfg);
  } catch (const std::exception& e) {
    r.fail(g.file + ": " + e.what());
    return;
  }
  const double dt = seconds(t0);
  if (rep.status != SolveStatus::optimal) {
    r.fail(g.file + ": status " + status_name(rep.status) + " after " + std::to_string(dt) + "s");
    return;
  }
  if (!rep.objective_integral || rep.objective_int != g.optimum) {
    r.fail(g.file + ": got " + std::to_string(rep.objective_int) + ", expected " +
           std::to_string(g.optimum));
    return;
  }
  if (dt > cap_s) r.fail(g.file + ": took " + std::to_string(dt) + "s (cap " + std::to_string(cap_s) + ")");
}

CriterionResult c1_bqp50() {
  const std::vector<GoldenCase> cases = {
      {"bqp50-1.sparse", -2098},  {"bqp50-2.sparse", -3702}, {"bqp50-3.sparse", -4626},
      {"bqp50-4.sparse", -3544},  {"bqp50-5.sparse", -4012}, {"bqp50-6.sparse", -3693},
      {"bqp50-7.sparse", -4520},  {"bqp50-8.sparse", -4216}, {"bqp50-9.sparse", -3780},
      {"bqp50-10.sparse", -3507},
  };
  CriterionResult r;
  for (const GoldenCase& g : cases) run_golden(r, g, 1, 60.0);
  if (r.pass) r.note("10/10 bqp50 optima exact, single-threaded");
  return r;
}

CriterionResult c2_bqp100() {
  const std::vector<GoldenCase> cases = {
      {"bqp100-1.sparse", -7970},   {"bqp100-2.sparse", -11036}, {"bqp100-3.sparse", -12723},
      {"bqp100-4.sparse", -10368},  {"bqp100-5.sparse", -9083},  {"bqp100-6.sparse", -10210},
      {"bqp100-7.sparse", -10125},  {"bqp100-8.sparse", -11435}, {"bqp100-9.sparse", -11455},
      {"bqp100-10.sparse", -12565},
  };
  CriterionResult r;
  for (const GoldenCase& g : cases) run_golden(r, g, 8, 1800.0);
  if (r.pass) r.note("10/10 bqp100 optima exact, 8 threads");
  return r;
}

CriterionResult c3_gka() {
  const std::vector<GoldenCase> cases = {
      {"gka1a.sparse", -3414}, {"gka2a.sparse", -6063}, {"gka3a.sparse", -6037},
      {"gka1b.sparse", -133},  {"gka1c.sparse", -5058}, {"gka1d.sparse", -6333},
  };
  CriterionResult r;
  for (const GoldenCase& g : cases) run_golden(r, g, 8, 1800.0);
  if (r.pass) r.note("6/6 gka optima exact");
  return r;
}

CriterionResult c4_oracle_equivalence() {
  CriterionResult r;
  std::uint64_t runs = 0;
  const GenParams uniform{GenClass::uniform, -100, 100, 1.0};
  const GenParams sk{GenClass::sk};
  const GenParams grid{GenClass::grid2d};
  struct ClassSpec {
    const char* name;
    GenParams params;
    std::vector<int> sizes;
  };
  const std::vector<ClassSpec> classes = {
      {"uniform", uniform, {8, 10, 12, 14, 16, 18}},
      {"sk", sk, {8, 10, 12, 14, 16, 18}},
      {"grid2d", grid, {9, 16}},
  };
  for (const ClassSpec& cls : classes) {
    for (int i = 0; i < 200; ++i) {
      const int n = cls.sizes[static_cast<std::size_t>(i) % cls.sizes.size()];
      const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
      const IsingInstance inst = generate_random(n, cls.params, seed);
      const energy_t truth = brute_force_min(inst).raw_min;
      for (const FieldMode mode :
           {FieldMode::keep_in_subproblems, FieldMode::omit_in_subproblems}) {
        for (const int threads : {1, 4}) {
          SolverConfig cfg;
          cfg.threads = threads;
          cfg.field_mode = mode;
          cfg.k_min = i % 2 == 0 ? 20 : 4;  // all-fallback and deep E-table paths
          cfg.seed = seed;
          const SolveReport rep = solve(inst, cfg);
          ++runs;
          if (rep.status != SolveStatus::optimal || rep.internal_optimum != truth) {
            r.fail(std::string(cls.name) + " n=" + std::to_string(n) + " seed=" +
                   std::to_string(seed) + ": solver " + std::to_string(rep.internal_optimum) +
                   " vs brute force " + std::to_string(truth));
            if (!r.pass) return r;
          }
        }
      }
    }
  }
  r.note(std::to_string(runs) + " solves matched brute force exactly");
  return r;
}

CriterionResult c5_tree_scaling() {
  CriterionResult r;
  std::vector<BenchRow> rows;
  const auto t0 = std::chrono::steady_clock::now();
  for (const int n : {20, 24, 28, 32}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const IsingInstance inst = generate_random(n, {GenClass::sk}, 300 + seed);
      SolverConfig cfg;
      cfg.seed = seed;
      cfg.k_min = 0;  // the full recursion: exact E at every level
      const SolveReport rep = solve(inst, cfg);
      if (rep.status != SolveStatus::optimal) {
        r.fail("sk n=" + std::to_string(n) + " seed=" + std::to_string(seed) + " not optimal");
        return r;
      }
      BenchRow row;
      row.cls = "sk";
      row.status = "optimal";
      row.n = n;
      row.nodes = rep.nodes_total;
      rows.push_back(row);
    }
  }
  const double alpha = fit_exponent(rows);
  const double dt = seconds(t0);
  std::ostringstream os;
  os << "fitted exponent alpha=" << alpha << " over sk n in {20,24,28,32}, 10 seeds each, "
     << dt << "s total";
  r.note(os.str());
  if (!(alpha >= 0.29 && alpha <= 0.45)) r.fail("alpha outside [0.29, 0.45]");
  if (dt > 1800) r.fail("bench exceeded 30 minutes");
  return r;
}

CriterionResult c6_kh_vs_hdk() {
  CriterionResult r;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  double kh_time_32 = 0, hdk_time_32 = 0;
  for (const int n : {20, 24, 28, 32}) {
    std::vector<double> kh_nodes, hdk_nodes, kh_time, hdk_time;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const IsingInstance inst =
          generate_random(n, {GenClass::uniform, -100, 100, 1.0}, 400 + seed);
      for (const BoundRule rule : {BoundRule::kh_only, BoundRule::hdk}) {
        SolverConfig cfg;
        cfg.bound_rule = rule;
        if (rule == BoundRule::hdk) cfg.k_min = 0;
        cfg.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        const SolveReport rep = solve(inst, cfg);
        const double dt = seconds(t0);
        if (rep.status != SolveStatus::optimal) {
          r.fail("n=" + std::to_string(n) + " seed=" + std::to_string(seed) + " not optimal");
          return r;
        }
        if (rule == BoundRule::kh_only) {
          kh_nodes.push_back(static_cast<double>(rep.nodes_total));
          kh_time.push_back(dt);
        } else {
          hdk_nodes.push_back(static_cast<double>(rep.nodes_total));
          hdk_time.push_back(dt);
        }
      }
    }
    const double mk = median(kh_nodes), mh = median(hdk_nodes);
    std::ostringstream os;
    os << "n=" << n << " median nodes kh=" << mk << " hdk=" << mh;
    r.note(os.str());
    if (!(mk > mh)) r.fail("kh tree not larger at n=" + std::to_string(n));
    if (n == 32) {
      kh_time_32 = median(kh_time);
      hdk_time_32 = median(hdk_time);
    }
  }
  if (!(kh_time_32 > hdk_time_32)) r.fail("kh-only not slower at n=32");
  return r;
}

CriterionResult c7_sk50() {
  CriterionResult r;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const IsingInstance inst = generate_random(50, {GenClass::sk}, seed);
    SolverConfig cfg;
    cfg.threads = 8;
    cfg.time_limit_s = 60;
    cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport rep = solve(inst, cfg);
    const double dt = seconds(t0);
    if (rep.status != SolveStatus::optimal)
      r.fail("seed " + std::to_string(seed) + ": not proven optimal within 60s");
    else if (rep.internal_dual != rep.internal_optimum)
      r.fail("seed " + std::to_string(seed) + ": dual does not certify the optimum");
    else
      r.note("seed " + std::to_string(seed) + ": optimum " +
             std::to_string(rep.internal_optimum) + " in " + std::to_string(dt) + "s");
  }
  return r;
}

// compact re-run of the property suites
CriterionResult c8_properties() {
  CriterionResult r;

  // bound soundness + incremental == direct, full tree, both modes
  for (const FieldMode mode : {FieldMode::keep_in_subproblems, FieldMode::omit_in_subproblems}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const IsingInstance inst = generate_random(12, {GenClass::uniform, -100, 100, 0.9}, seed);
      SubproblemTable table = make_fallback_table(inst, mode);
      BoundState st(inst, table, mode);
      Assignment prefix;
      std::function<energy_t()> walk = [&]() -> energy_t {
        const energy_t b = st.bound();
        if (b != hdk_bound_direct(inst, prefix, table, mode)) {
          r.fail("incremental bound != direct evaluation");
          return 0;
        }
        if (static_cast<int>(prefix.size()) == 12) return st.partial_energy();
        energy_t best = kEnergyInf;
        for (const spin_t s : {spin_t{-1}, spin_t{1}}) {
          st.descend(s);
          prefix.push_back(s);
          best = std::min(best, walk());
          prefix.pop_back();
          st.backtrack(s);
        }
        if (b > best) r.fail("bound above the exhaustive completion minimum");
        return best;
      };
      const energy_t tree_min = walk();
      if (tree_min != brute_force_min(inst).raw_min) r.fail("tree walk missed the optimum");
      if (!r.pass) return r;
    }
  }
  r.note("bound soundness and incremental/direct equality hold on full trees");

  // descend/backtrack reversibility walk
  {
    const IsingInstance inst = generate_random(16, {GenClass::uniform, -100, 100, 1.0}, 77);
    SubproblemTable table = make_fallback_table(inst, FieldMode::keep_in_subproblems);
    BoundState st(inst, table, FieldMode::keep_in_subproblems);
    const BoundState fresh = st;
    Rng rng(5);
    std::vector<spin_t> stack;
    for (int i = 0; i < 1000; ++i) {
      const bool down = stack.empty() || (stack.size() < 16 && rng.bernoulli(0.55));
      if (down) {
        stack.push_back(rng.bernoulli(0.5) ? spin_t{1} : spin_t{-1});
        st.descend(stack.back());
      } else {
        st.backtrack(stack.back());
        stack.pop_back();
      }
    }
    while (!stack.empty()) {
      st.backtrack(stack.back());
      stack.pop_back();
    }
    if (!(st == fresh)) r.fail("descend/backtrack walk did not return to the root state");
  }

  // complete enumeration with pruning disabled
  {
    const IsingInstance inst = generate_random(12, {GenClass::uniform, -100, 100, 1.0}, 13);
    SubproblemTable table = make_fallback_table(inst, FieldMode::keep_in_subproblems);
    SharedIncumbent inc;
    EngineOptions opts;
    opts.prune = false;
    const SearchStats st = dfs_region(inst, table, FieldMode::keep_in_subproblems,
                                      ValueTable::from_fields(inst), root_cursor(12),
                                      BoundState(inst, table, FieldMode::keep_in_subproblems), {},
                                      inc, {}, opts);
    if (st.leaves != (1u << 12)) r.fail("prune-free enumeration missed leaves");
  }

  // permutation invariance of the optimum
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const IsingInstance inst = generate_random(14, {GenClass::uniform, -100, 100, 0.8}, 500 + seed);
    SolverConfig with, without;
    without.reorder = false;
    with.seed = without.seed = seed;
    const SolveReport a = solve(inst, with);
    const SolveReport b = solve(inst, without);
    const energy_t truth = brute_force_min(inst).raw_min;
    if (a.internal_optimum != truth || b.internal_optimum != truth) {
      r.fail("reordered and plain optima disagree with brute force");
      return r;
    }
  }

  // thread-count invariance + monotone dual trace
  {
    const IsingInstance inst = generate_random(20, {GenClass::sk}, 21);
    energy_t ref = 0;
    bool first = true;
    for (const int threads : {1, 2, 4, 8}) {
      SolverConfig cfg;
      cfg.threads = threads;
      const SolveReport rep = solve(inst, cfg);
      if (rep.status != SolveStatus::optimal) r.fail("sk-20 not solved");
      if (first) {
        ref = rep.internal_optimum;
        first = false;
      } else if (rep.internal_optimum != ref) {
        r.fail("optimum changed with the thread count");
      }
      for (std::size_t i = 1; i < rep.dual_trace.size(); ++i)
        if (rep.dual_trace[i].value < rep.dual_trace[i - 1].value) r.fail("dual trace decreased");
    }
  }
  if (r.pass && r.detail.empty()) r.note("all property suites hold");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  const std::vector<std::pair<std::string, std::function<CriterionResult()>>> criteria = {
      {"C1 bqp50 golden optima", c1_bqp50},
      {"C2 bqp100 golden optima", c2_bqp100},
      {"C3 gka golden optima", c3_gka},
      {"C4 oracle equivalence", c4_oracle_equivalence},
      {"C5 tree-size scaling", c5_tree_scaling},
      {"C6 kh vs hdk", c6_kh_vs_hdk},
      {"C7 sk-50 proven optimality", c7_sk50},
      {"C8 property suites", c8_properties},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i) + 1) continue;
    const CriterionResult res = criteria[i].second();
    std::cout << (res.pass ? "PASS " : "FAIL ") << criteria[i].first;
    if (!res.detail.empty()) std::cout << " -- " << res.detail;
    std::cout << "\n";
    if (!res.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
