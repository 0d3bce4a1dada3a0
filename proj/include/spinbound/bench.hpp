#pragma once

#include <string>
#include <vector>

#include "spinbound/solver.hpp"

namespace spinbound {

// One (instance, config) run. CSV column order is frozen:
// instance,n,class,optimum,dual,gap,status,nodes,wall_s,threads,config_hash,note
struct BenchRow {
  std::string instance;
  int n = 0;
  std::string cls;  // generator class, or "file"
  double optimum = 0;
  bool optimum_integral = false;
  std::int64_t optimum_int = 0;
  double dual = 0;
  double gap = 0;
  std::string status;
  std::uint64_t nodes = 0;
  double wall_s = 0;
  int threads = 1;
  std::string config_hash;
  std::string note;  // error text for failed runs
};

Problem load_problem_file(const std::string& path, Kind kind, Sense sense);

struct BenchOptions {
  SolverConfig cfg;
  int parallel_instances = 1;
};

// Manifest: {"runs": [{"name", "path", "kind", "sense"} |
//                     {"name", "generate": {"class","n","seed","density","lo","hi"}}]}
std::vector<BenchRow> run_bench(const std::string& manifest_json, const BenchOptions& opts);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows);

// least-squares slope of log2(nodes) against n, over the sk rows when any
// exist (otherwise all rows); the 2^(alpha n) scaling exponent
double fit_exponent(const std::vector<BenchRow>& rows);

std::string config_hash(const SolverConfig& cfg);

}  // namespace spinbound
