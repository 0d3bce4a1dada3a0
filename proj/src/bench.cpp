#include "spinbound/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace spinbound {

Problem load_problem_file(const std::string& path, Kind kind, Sense sense) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  ParsedInstance parsed = parse_instance(in, kind, sense);
  if (auto* q = std::get_if<QuboInstance>(&parsed)) return qubo_to_ising(*q);
  if (auto* g = std::get_if<MaxCutInstance>(&parsed)) return maxcut_to_ising(*g);
  return ising_problem(std::get<IsingInstance>(std::move(parsed)));
}

namespace {

Kind kind_from_name(const std::string& s) {
  if (s == "qubo") return Kind::qubo;
  if (s == "maxcut") return Kind::maxcut;
  if (s == "ising") return Kind::ising;
  throw std::runtime_error("unknown kind '" + s + "'");
}

GenClass gen_class_from_name(const std::string& s) {
  if (s == "sk") return GenClass::sk;
  if (s == "uniform") return GenClass::uniform;
  if (s == "grid2d") return GenClass::grid2d;
  if (s == "grid3d") return GenClass::grid3d;
  throw std::runtime_error("unknown generator class '" + s + "'");
}

struct RunSpec {
  std::string name;
  std::string cls;
  // either a file...
  std::string path;
  Kind kind = Kind::qubo;
  Sense sense = Sense::maximize;
  // ...or a generator
  bool generated = false;
  int n = 0;
  GenParams params;
  std::uint64_t seed = 0;
};

std::vector<RunSpec> parse_manifest(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  std::vector<RunSpec> specs;
  if (!j.contains("runs")) return specs;
  for (const nlohmann::json& r : j.at("runs")) {
    RunSpec s;
    s.name = r.value("name", "");
    if (r.contains("generate")) {
      const nlohmann::json& g = r.at("generate");
      s.generated = true;
      s.params.cls = gen_class_from_name(g.value("class", "uniform"));
      s.n = g.at("n").get<int>();
      s.seed = g.value("seed", std::uint64_t{0});
      s.params.density = g.value("density", 1.0);
      s.params.lo = g.value("lo", std::int64_t{-100});
      s.params.hi = g.value("hi", std::int64_t{100});
      s.cls = gen_class_name(s.params.cls);
      if (s.name.empty())
        s.name = s.cls + "-n" + std::to_string(s.n) + "-s" + std::to_string(s.seed);
    } else {
      s.path = r.at("path").get<std::string>();
      s.kind = kind_from_name(r.value("kind", "qubo"));
      s.sense = r.value("sense", std::string("max")) == "min" ? Sense::minimize : Sense::maximize;
      s.cls = "file";
      if (s.name.empty()) s.name = s.path;
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

BenchRow run_one(const RunSpec& spec, const SolverConfig& cfg, const std::string& hash) {
  BenchRow row;
  row.instance = spec.name;
  row.cls = spec.cls;
  row.threads = cfg.threads;
  row.config_hash = hash;
  try {
    Problem p = spec.generated
                    ? ising_problem(generate_random(spec.n, spec.params, spec.seed))
                    : load_problem_file(spec.path, spec.kind, spec.sense);
    row.n = p.ising.num_vars();
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport rep = solve(p, cfg);
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.status = status_name(rep.status);
    if (rep.status == SolveStatus::infeasible_config) {
      row.note = rep.message;
      return row;
    }
    row.optimum = rep.objective;
    row.optimum_integral = rep.objective_integral;
    row.optimum_int = rep.objective_int;
    row.dual = rep.dual_bound;
    row.gap = rep.gap;
    row.nodes = rep.nodes_total;
  } catch (const std::exception& e) {
    row.status = "error";
    row.note = e.what();
  }
  return row;
}

std::string csv_escape(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string format_value(double v, bool integral, std::int64_t as_int) {
  if (integral) return std::to_string(as_int);
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<BenchRow> run_bench(const std::string& manifest_json, const BenchOptions& opts) {
  const std::vector<RunSpec> specs = parse_manifest(manifest_json);
  const std::string hash = config_hash(opts.cfg);
  std::vector<BenchRow> rows(specs.size());
  const int par = std::max(1, opts.parallel_instances);
  if (par == 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) rows[i] = run_one(specs[i], opts.cfg, hash);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= specs.size()) return;
        rows[i] = run_one(specs[i], opts.cfg, hash);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < par; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "instance,n,class,optimum,dual,gap,status,nodes,wall_s,threads,config_hash,note\n";
  for (const BenchRow& r : rows) {
    os << csv_escape(r.instance) << ',' << r.n << ',' << r.cls << ','
       << format_value(r.optimum, r.optimum_integral, r.optimum_int) << ',' << r.dual << ','
       << r.gap << ',' << r.status << ',' << r.nodes << ',' << r.wall_s << ',' << r.threads << ','
       << r.config_hash << ',' << csv_escape(r.note) << '\n';
  }
  return os.str();
}

std::string bench_json(const std::vector<BenchRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchRow& r : rows) {
    nlohmann::json j;
    j["instance"] = r.instance;
    j["n"] = r.n;
    j["class"] = r.cls;
    if (r.optimum_integral)
      j["optimum"] = r.optimum_int;
    else
      j["optimum"] = r.optimum;
    j["dual"] = r.dual;
    j["gap"] = r.gap;
    j["status"] = r.status;
    j["nodes"] = r.nodes;
    j["wall_s"] = r.wall_s;
    j["threads"] = r.threads;
    j["config_hash"] = r.config_hash;
    j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

double fit_exponent(const std::vector<BenchRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (bool sk_only : {true, false}) {
    pts.clear();
    for (const BenchRow& r : rows) {
      if (r.status != "optimal" || r.nodes == 0) continue;
      if (sk_only && r.cls != "sk") continue;
      pts.emplace_back(static_cast<double>(r.n), std::log2(static_cast<double>(r.nodes)));
    }
    if (!pts.empty()) break;
  }
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0) return 0.0;
  return (m * sxy - sx * sy) / denom;
}

std::string config_hash(const SolverConfig& cfg) {
  std::ostringstream os;
  os << cfg.k_min << '|' << cfg.frontier_limit << '|' << cfg.threads << '|'
     << (cfg.field_mode == FieldMode::keep_in_subproblems ? "keep" : "omit") << '|'
     << (cfg.bound_rule == BoundRule::hdk ? "hdk" : "kh") << '|' << cfg.reorder << '|'
     << cfg.time_limit_s << '|' << cfg.seed << '|' << cfg.sa_full.sweeps << '|'
     << cfg.sa_full.restarts << '|' << cfg.sa_sub.sweeps << '|' << cfg.sa_order.sweeps;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : os.str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

}  // namespace spinbound
