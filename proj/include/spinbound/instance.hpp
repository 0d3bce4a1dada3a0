#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace spinbound {

using energy_t = std::int64_t;
using spin_t = std::int8_t;

// Full spin assignment, entries in {-1, +1}.
using Assignment = std::vector<spin_t>;

enum class Sense { minimize, maximize };
enum class Kind { qubo, maxcut, ising };

// All public interfaces (files, JSON, reports) use 1-based variable indices;
// everything below this module boundary is 0-based.

struct QuboEntry {
  int i, j;        // 0-based, i <= j; diagonal entries are linear terms
  energy_t value;  // original coefficient times `scale`
};

struct QuboInstance {
  int n = 0;
  Sense sense = Sense::minimize;
  energy_t scale = 1;  // stored values = original * scale
  std::vector<QuboEntry> entries;

  // objective in scaled units; x entries in {0,1}
  energy_t objective(const std::vector<int>& x) const;
};

struct MaxCutEdge {
  int i, j;  // 0-based, i < j
  energy_t w;
};

struct MaxCutInstance {
  int n = 0;
  energy_t scale = 1;
  std::vector<MaxCutEdge> edges;

  energy_t total_weight() const;
  // weight of edges crossing the partition (side entries in {-1,+1}), scaled units
  energy_t cut_value(const Assignment& side) const;
};

struct Coupling {
  int i, j;  // 0-based, i < j
  energy_t w;
};

struct AdjEdge {
  int j;
  energy_t w;
};

// Canonical internal problem form:
//   energy(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + offset
// over s in {-1,+1}^n, minimized. Couplings are kept sorted and deduplicated,
// which makes equality comparison structural. Immutable after construction;
// safe to share across threads.
class IsingInstance {
 public:
  IsingInstance() = default;
  IsingInstance(int n, std::vector<Coupling> couplings, std::vector<energy_t> fields,
                energy_t offset = 0, energy_t scale = 1);

  int num_vars() const { return n_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  const std::vector<energy_t>& fields() const { return h_; }
  energy_t field(int i) const { return h_[static_cast<std::size_t>(i)]; }
  energy_t offset() const { return offset_; }
  energy_t scale() const { return scale_; }

  energy_t energy(const Assignment& s) const;      // includes offset
  energy_t raw_energy(const Assignment& s) const;  // excludes offset

  // neighbors j > i (branching order); the bound update walks these
  const AdjEdge* fwd_begin(int i) const { return fwd_.data() + fwd_off_[static_cast<std::size_t>(i)]; }
  const AdjEdge* fwd_end(int i) const { return fwd_.data() + fwd_off_[static_cast<std::size_t>(i) + 1]; }
  // all neighbors (heuristics)
  const AdjEdge* adj_begin(int i) const { return adj_.data() + adj_off_[static_cast<std::size_t>(i)]; }
  const AdjEdge* adj_end(int i) const { return adj_.data() + adj_off_[static_cast<std::size_t>(i) + 1]; }

  // sum_{from <= i < j} |J_ij| over the trailing subproblem {from..n-1}
  energy_t abs_coupling_sum_tail(int from) const { return tail_abs_j_[static_cast<std::size_t>(from)]; }
  // sum_{i >= from} |h_i|
  energy_t abs_field_sum_tail(int from) const { return tail_abs_h_[static_cast<std::size_t>(from)]; }

  // |root KH bound| = sum|J| + sum|h|; every bound and partial energy the
  // search manipulates has magnitude <= this value.
  energy_t kh_magnitude() const { return abs_coupling_sum_tail(0) + abs_field_sum_tail(0); }

  // trailing subproblem on variables {n-l .. n-1}, remapped to {0 .. l-1}
  IsingInstance trailing_subinstance(int l, bool zero_fields) const;
  // induced subproblem on an arbitrary variable subset (position p <- vars[p])
  IsingInstance induced(const std::vector<int>& vars, bool zero_fields = false) const;
  // permuted copy: position p holds original variable perm[p]
  IsingInstance permuted(const std::vector<int>& perm) const;

  bool operator==(const IsingInstance& o) const {
    return n_ == o.n_ && couplings_ == o.couplings_ && h_ == o.h_ && offset_ == o.offset_ &&
           scale_ == o.scale_;
  }

 private:
  int n_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<energy_t> h_;
  energy_t offset_ = 0;
  energy_t scale_ = 1;
  std::vector<std::uint32_t> fwd_off_;
  std::vector<AdjEdge> fwd_;
  std::vector<std::uint32_t> adj_off_;
  std::vector<AdjEdge> adj_;
  std::vector<energy_t> tail_abs_j_;  // size n+1
  std::vector<energy_t> tail_abs_h_;  // size n+1
};

inline bool operator==(const Coupling& a, const Coupling& b) {
  return a.i == b.i && a.j == b.j && a.w == b.w;
}

// Solver-facing problem: internal minimization Ising form plus what is
// needed to report results in the source problem's terms.
struct Problem {
  IsingInstance ising;
  Kind kind = Kind::ising;
  bool negated_from_max = false;  // qubo parsed under the maximize convention
  energy_t maxcut_total_w = 0;    // scaled units; valid when kind == maxcut
};

// ---- conversions ------------------------------------------------------

// Exact conversion via s_i = 1 - 2 x_i. Maximization input is negated into
// the internal minimization form (negated_from_max records the flip); the
// published tables report that negated optimum, and so do we.
Problem qubo_to_ising(const QuboInstance& q);

// J_ij = w_ij, h = 0; cut(partition) = (W - energy(s)) / 2.
Problem maxcut_to_ising(const MaxCutInstance& g);

Problem ising_problem(IsingInstance inst);

// binary <-> spin views: s_i = 1 - 2 x_i
std::vector<int> spins_to_binary(const Assignment& s);
Assignment binary_to_spins(const std::vector<int>& x);

// ---- parsing / printing ----------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// BiqMac-style sparse format: optional '#' comment lines, then "n m",
// then m lines "i j value" (1-based, decimal integer or decimal fraction).
// Rational values are scaled away by the LCM of denominators; the scale is
// recorded on the instance.
QuboInstance parse_qubo(std::istream& in, Sense sense);
MaxCutInstance parse_maxcut(std::istream& in);
// Same triple format; "i i v" rows are field terms h_i, "i j v" couplings.
IsingInstance parse_ising(std::istream& in);

using ParsedInstance = std::variant<QuboInstance, MaxCutInstance, IsingInstance>;
ParsedInstance parse_instance(std::istream& in, Kind kind, Sense sense);

std::string print_qubo(const QuboInstance& q);
std::string print_maxcut(const MaxCutInstance& g);
std::string print_ising(const IsingInstance& inst);  // requires offset == 0

// debugging export; field names: n, couplings, fields, offset, sense (+scale)
std::string instance_to_json(const IsingInstance& inst);

// ---- random instances --------------------------------------------------

enum class GenClass { sk, uniform, grid2d, grid3d };

struct GenParams {
  GenClass cls = GenClass::uniform;
  std::int64_t lo = -100, hi = 100;  // open interval for `uniform`
  double density = 1.0;
};

const char* gen_class_name(GenClass c);

// Deterministic in (n, params, seed). sk: complete graph, J in {-1,+1};
// uniform: pairs kept with probability `density`, couplings and fields
// integers from (lo,hi)\{0}; grid2d/grid3d: nearest-neighbor +-1 couplings
// on an open-boundary lattice (n must be a perfect square / cube).
IsingInstance generate_random(int n, const GenParams& params, std::uint64_t seed);

}  // namespace spinbound
