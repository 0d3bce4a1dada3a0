#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spinbound/bench.hpp"
#include "spinbound/brute_force.hpp"
#include "spinbound/solver.hpp"

namespace {

using namespace spinbound;

struct InstanceFlags {
  std::string path;
  std::string kind = "qubo";
  std::string sense = "max";
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& f) {
  cmd->add_option("path", f.path, "instance file (BiqMac-style sparse)")->required();
  cmd->add_option("--kind", f.kind, "qubo|maxcut|ising")
      ->check(CLI::IsMember({"qubo", "maxcut", "ising"}));
  cmd->add_option("--sense", f.sense,
                  "min|max: objective sense of a qubo file (biqmac bqp files maximize)")
      ->check(CLI::IsMember({"min", "max"}));
}

struct SolveFlags {
  SolverConfig cfg;
  bool no_reorder = false;
  std::string field_mode = "keep";
  std::string bound = "hdk";
  bool json = false;
  bool dump_order = false;
  bool dump_etable = false;
  bool seed_given = false;
};

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--threads", f.cfg.threads, "worker count (power of two)");
  cmd->add_option("--kmin", f.cfg.k_min, "levels served by the KH fallback");
  cmd->add_option("--frontier-limit", f.cfg.frontier_limit, "max best-first frontier size");
  cmd->add_option("--time-limit", f.cfg.time_limit_s, "wall-clock limit in seconds");
  cmd->add_flag("--no-reorder", f.no_reorder, "disable the global variable reordering");
  cmd->add_option("--field-mode", f.field_mode, "keep|omit fields in subproblems")
      ->check(CLI::IsMember({"keep", "omit"}));
  cmd->add_option("--bound", f.bound, "hdk|kh bounding rule")->check(CLI::IsMember({"hdk", "kh"}));
  cmd->add_option("--seed", f.cfg.seed, "rng seed (SPINBOUND_SEED as fallback)")
      ->each([&f](const std::string&) { f.seed_given = true; });
  cmd->add_option("--sa-sweeps", f.cfg.sa_full.sweeps, "full-problem annealing sweeps");
  cmd->add_option("--sa-restarts", f.cfg.sa_full.restarts, "full-problem annealing restarts");
  cmd->add_option("--sa-sub-sweeps", f.cfg.sa_sub.sweeps, "per-subproblem annealing sweeps");
  cmd->add_option("--sa-order-sweeps", f.cfg.sa_order.sweeps, "reordering annealing sweeps");
  cmd->add_option("--sa-tstart", f.cfg.sa_full.t_start, "annealing start temperature (0 = auto)");
  cmd->add_option("--sa-tend", f.cfg.sa_full.t_end, "annealing end temperature");
}

SolverConfig finalize_config(SolveFlags& f) {
  f.cfg.reorder = !f.no_reorder;
  f.cfg.field_mode =
      f.field_mode == "omit" ? FieldMode::omit_in_subproblems : FieldMode::keep_in_subproblems;
  f.cfg.bound_rule = f.bound == "kh" ? BoundRule::kh_only : BoundRule::hdk;
  f.cfg.dump_etable = f.dump_etable;
  if (!f.seed_given) {
    if (const char* env = std::getenv("SPINBOUND_SEED")) f.cfg.seed = std::strtoull(env, nullptr, 10);
  }
  f.cfg.sa_sub.t_end = f.cfg.sa_full.t_end;
  f.cfg.sa_order.t_end = f.cfg.sa_full.t_end;
  return f.cfg;
}

Problem load(const InstanceFlags& f) {
  Kind kind = Kind::qubo;
  if (f.kind == "maxcut") kind = Kind::maxcut;
  if (f.kind == "ising") kind = Kind::ising;
  const Sense sense = f.sense == "min" ? Sense::minimize : Sense::maximize;
  return load_problem_file(f.path, kind, sense);
}

int cmd_solve(const InstanceFlags& inst_flags, SolveFlags& flags) {
  const SolverConfig cfg = finalize_config(flags);
  const Problem p = load(inst_flags);
  const SolveReport rep = solve(p, cfg);
  if (flags.json) {
    std::cout << report_to_json(rep) << "\n";
  } else {
    std::cout << report_summary(rep) << "\n";
    if (flags.dump_order) {
      std::cout << "order:";
      for (int v : rep.permutation) std::cout << ' ' << v;
      std::cout << "\n";
    }
  }
  switch (rep.status) {
    case SolveStatus::optimal:
      return 0;
    case SolveStatus::timeout:
      return 2;
    case SolveStatus::infeasible_config:
      return 1;
  }
  return 1;
}

int cmd_verify(const InstanceFlags& inst_flags, SolveFlags& flags) {
  const SolverConfig cfg = finalize_config(flags);
  const Problem p = load(inst_flags);
  if (p.ising.num_vars() > 26) {
    std::cerr << "verify: n = " << p.ising.num_vars() << " exceeds the exhaustive guard (26)\n";
    return 1;
  }
  const BruteForceResult bf = brute_force_min(p.ising, cfg.threads);
  const SolveReport rep = solve(p, cfg);
  const energy_t truth = bf.raw_min + p.ising.offset();
  std::cout << "brute-force optimum (scaled internal): " << truth << "\n";
  std::cout << "solver optimum (scaled internal): " << rep.internal_optimum << " ["
            << status_name(rep.status) << "]\n";
  if (rep.status == SolveStatus::optimal && rep.internal_optimum == truth) {
    std::cout << "agree\n";
    return 0;
  }
  std::cout << "MISMATCH\n";
  return 1;
}

int cmd_convert(const InstanceFlags& inst_flags, const std::string& to, const std::string& out_path) {
  const Problem p = load(inst_flags);
  std::string text;
  if (to == "json")
    text = instance_to_json(p.ising);
  else
    text = print_ising(p.ising);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << text;
  }
  return 0;
}

int cmd_generate(const std::string& cls, int n, double density, std::uint64_t seed, std::int64_t lo,
                 std::int64_t hi, const std::string& out_path) {
  GenParams params;
  params.density = density;
  params.lo = lo;
  params.hi = hi;
  if (cls == "sk")
    params.cls = GenClass::sk;
  else if (cls == "uniform")
    params.cls = GenClass::uniform;
  else if (cls == "grid2d")
    params.cls = GenClass::grid2d;
  else if (cls == "grid3d")
    params.cls = GenClass::grid3d;
  else
    throw std::runtime_error("unknown class '" + cls + "'");
  const IsingInstance inst = generate_random(n, params, seed);
  std::ostringstream os;
  os << "# " << cls << " n=" << n << " density=" << density << " seed=" << seed << "\n"
     << print_ising(inst);
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << os.str();
  }
  return 0;
}

int cmd_bench(const std::string& manifest_path, SolveFlags& flags, int parallel_instances,
              bool fit, const std::string& csv_path, const std::string& json_path) {
  BenchOptions opts;
  opts.cfg = finalize_config(flags);
  opts.parallel_instances = parallel_instances;
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::vector<BenchRow> rows = run_bench(buf.str(), opts);

  const std::string csv = bench_csv(rows);
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path);
    out << csv;
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << bench_json(rows);
  }
  if (fit) std::cout << "fitted_exponent " << fit_exponent(rows) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinbound: exact branch-and-bound solver for QUBO / Ising / MaxCut"};
  app.require_subcommand(1);

  InstanceFlags inst_flags;
  SolveFlags solve_flags;
  std::string convert_to = "json", out_path;
  std::string gen_class = "uniform";
  int gen_n = 20;
  double gen_density = 1.0;
  std::uint64_t gen_seed = 0;
  std::int64_t gen_lo = -100, gen_hi = 100;
  std::string manifest_path, bench_csv_path, bench_json_path;
  int parallel_instances = 1;
  bool fit = false;

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve an instance to proven optimality");
  add_instance_flags(solve_cmd, inst_flags);
  add_solver_flags(solve_cmd, solve_flags);
  solve_cmd->add_flag("--json", solve_flags.json, "emit the full report as JSON");
  solve_cmd->add_flag("--dump-order", solve_flags.dump_order, "print the variable order used");
  solve_cmd->add_flag("--dump-etable", solve_flags.dump_etable, "include the E table in the report");

  CLI::App* verify_cmd = app.add_subcommand("verify", "cross-check the solver against brute force");
  add_instance_flags(verify_cmd, inst_flags);
  add_solver_flags(verify_cmd, solve_flags);

  CLI::App* convert_cmd = app.add_subcommand("convert", "convert an instance to json/ising form");
  add_instance_flags(convert_cmd, inst_flags);
  convert_cmd->add_option("--to", convert_to, "json|ising")->check(CLI::IsMember({"json", "ising"}));
  convert_cmd->add_option("-o,--out", out_path, "output file (default: stdout)");

  CLI::App* gen_cmd = app.add_subcommand("generate", "write a random instance file");
  gen_cmd->add_option("--class", gen_class, "sk|uniform|grid2d|grid3d")
      ->check(CLI::IsMember({"sk", "uniform", "grid2d", "grid3d"}));
  gen_cmd->add_option("--n", gen_n, "variable count")->required();
  gen_cmd->add_option("--density", gen_density, "pair keep probability (uniform class)");
  gen_cmd->add_option("--seed", gen_seed, "rng seed");
  gen_cmd->add_option("--lo", gen_lo, "open interval lower end");
  gen_cmd->add_option("--hi", gen_hi, "open interval upper end");
  gen_cmd->add_option("-o,--out", out_path, "output file (default: stdout)");

  CLI::App* bench_cmd = app.add_subcommand("bench", "run a manifest of instances, emit CSV/JSON");
  bench_cmd->add_option("manifest", manifest_path, "manifest json file")->required();
  add_solver_flags(bench_cmd, solve_flags);
  bench_cmd->add_option("--parallel-instances", parallel_instances, "run k instances concurrently");
  bench_cmd->add_flag("--fit-exponent", fit, "fit log2(nodes) ~ alpha*n and print the slope");
  bench_cmd->add_option("--csv", bench_csv_path, "write the CSV table here");
  bench_cmd->add_option("--json-out", bench_json_path, "write the JSON rows here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(inst_flags, solve_flags);
    if (verify_cmd->parsed()) return cmd_verify(inst_flags, solve_flags);
    if (convert_cmd->parsed()) return cmd_convert(inst_flags, convert_to, out_path);
    if (gen_cmd->parsed())
      return cmd_generate(gen_class, gen_n, gen_density, gen_seed, gen_lo, gen_hi, out_path);
    if (bench_cmd->parsed())
      return cmd_bench(manifest_path, solve_flags, parallel_instances, fit, bench_csv_path,
                       bench_json_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
