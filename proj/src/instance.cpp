#include "spinbound/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "spinbound/rng.hpp"

namespace spinbound {

namespace {

constexpr energy_t kMagnitudeGuard = energy_t{1} << 62;

energy_t checked_narrow(__int128 v, const char* what) {
  if (v > kMagnitudeGuard || v < -kMagnitudeGuard)
    throw std::overflow_error(std::string(what) + " exceeds the exact-arithmetic guard (2^62)");
  return static_cast<energy_t>(v);
}

}  // namespace

// ---- IsingInstance -----------------------------------------------------

IsingInstance::IsingInstance(int n, std::vector<Coupling> couplings, std::vector<energy_t> fields,
                             energy_t offset, energy_t scale)
    : n_(n), couplings_(std::move(couplings)), h_(std::move(fields)), offset_(offset), scale_(scale) {
  if (n_ < 0) throw std::invalid_argument("negative variable count");
  if (static_cast<int>(h_.size()) != n_) throw std::invalid_argument("field vector length mismatch");
  if (scale_ <= 0) throw std::invalid_argument("scale must be positive");

  for (const Coupling& c : couplings_) {
    if (c.i < 0 || c.j >= n_) throw std::invalid_argument("coupling index out of range");
    if (c.i >= c.j) throw std::invalid_argument("couplings must have i < j (no self-couplings)");
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  for (std::size_t k = 1; k < couplings_.size(); ++k)
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
      throw std::invalid_argument("duplicate coupling");
  std::erase_if(couplings_, [](const Coupling& c) { return c.w == 0; });

  const auto un = static_cast<std::size_t>(n_);
  fwd_off_.assign(un + 1, 0);
  adj_off_.assign(un + 1, 0);
  for (const Coupling& c : couplings_) {
    ++fwd_off_[static_cast<std::size_t>(c.i) + 1];
    ++adj_off_[static_cast<std::size_t>(c.i) + 1];
    ++adj_off_[static_cast<std::size_t>(c.j) + 1];
  }
  for (std::size_t i = 0; i < un; ++i) {
    fwd_off_[i + 1] += fwd_off_[i];
    adj_off_[i + 1] += adj_off_[i];
  }
  fwd_.resize(couplings_.size());
  adj_.resize(couplings_.size() * 2);
  {
    std::vector<std::uint32_t> fpos(fwd_off_.begin(), fwd_off_.end() - 1);
    std::vector<std::uint32_t> apos(adj_off_.begin(), adj_off_.end() - 1);
    for (const Coupling& c : couplings_) {
      fwd_[fpos[static_cast<std::size_t>(c.i)]++] = {c.j, c.w};
      adj_[apos[static_cast<std::size_t>(c.i)]++] = {c.j, c.w};
      adj_[apos[static_cast<std::size_t>(c.j)]++] = {c.i, c.w};
    }
  }

  tail_abs_j_.assign(un + 1, 0);
  tail_abs_h_.assign(un + 1, 0);
  {
    std::vector<__int128> row(un, 0);
    for (const Coupling& c : couplings_) row[static_cast<std::size_t>(c.i)] += std::llabs(c.w);
    __int128 accj = 0, acch = 0;
    for (int i = n_ - 1; i >= 0; --i) {
      accj += row[static_cast<std::size_t>(i)];
      acch += std::llabs(h_[static_cast<std::size_t>(i)]);
      tail_abs_j_[static_cast<std::size_t>(i)] = checked_narrow(accj, "coupling magnitude sum");
      tail_abs_h_[static_cast<std::size_t>(i)] = checked_narrow(acch, "field magnitude sum");
    }
    checked_narrow(accj + acch, "root bound magnitude");
  }
}

energy_t IsingInstance::raw_energy(const Assignment& s) const {
  if (static_cast<int>(s.size()) != n_) throw std::invalid_argument("assignment length mismatch");
  for (spin_t v : s)
    if (v != 1 && v != -1) throw std::invalid_argument("assignment entries must be -1 or +1");
  energy_t e = 0;
  for (const Coupling& c : couplings_)
    e += c.w * s[static_cast<std::size_t>(c.i)] * s[static_cast<std::size_t>(c.j)];
  for (int i = 0; i < n_; ++i) e += h_[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(i)];
  return e;
}

energy_t IsingInstance::energy(const Assignment& s) const { return raw_energy(s) + offset_; }

IsingInstance IsingInstance::trailing_subinstance(int l, bool zero_fields) const {
  if (l < 0 || l > n_) throw std::invalid_argument("bad subproblem dimension");
  const int base = n_ - l;
  std::vector<Coupling> cs;
  for (const Coupling& c : couplings_)
    if (c.i >= base) cs.push_back({c.i - base, c.j - base, c.w});
  std::vector<energy_t> h(static_cast<std::size_t>(l), 0);
  if (!zero_fields)
    for (int i = 0; i < l; ++i) h[static_cast<std::size_t>(i)] = h_[static_cast<std::size_t>(base + i)];
  return IsingInstance(l, std::move(cs), std::move(h), 0, scale_);
}

IsingInstance IsingInstance::induced(const std::vector<int>& vars, bool zero_fields) const {
  std::vector<int> pos(static_cast<std::size_t>(n_), -1);
  for (std::size_t p = 0; p < vars.size(); ++p) {
    if (vars[p] < 0 || vars[p] >= n_) throw std::invalid_argument("induced: variable out of range");
    if (pos[static_cast<std::size_t>(vars[p])] != -1) throw std::invalid_argument("induced: repeated variable");
    pos[static_cast<std::size_t>(vars[p])] = static_cast<int>(p);
  }
  std::vector<Coupling> cs;
  for (const Coupling& c : couplings_) {
    int pi = pos[static_cast<std::size_t>(c.i)], pj = pos[static_cast<std::size_t>(c.j)];
    if (pi < 0 || pj < 0) continue;
    if (pi > pj) std::swap(pi, pj);
    cs.push_back({pi, pj, c.w});
  }
  std::vector<energy_t> h(vars.size(), 0);
  if (!zero_fields)
    for (std::size_t p = 0; p < vars.size(); ++p) h[p] = h_[static_cast<std::size_t>(vars[p])];
  return IsingInstance(static_cast<int>(vars.size()), std::move(cs), std::move(h), 0, scale_);
}

IsingInstance IsingInstance::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw std::invalid_argument("permutation length mismatch");
  IsingInstance out = induced(perm, false);
  // induced drops offset; a full permutation must keep it
  return IsingInstance(n_, out.couplings_, out.h_, offset_, scale_);
}

// ---- objective helpers ---------------------------------------------------

energy_t QuboInstance::objective(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("assignment length mismatch");
  energy_t v = 0;
  for (const QuboEntry& e : entries)
    v += e.value * x[static_cast<std::size_t>(e.i)] * x[static_cast<std::size_t>(e.j)];
  return v;
}

energy_t MaxCutInstance::total_weight() const {
  energy_t w = 0;
  for (const MaxCutEdge& e : edges) w += e.w;
  return w;
}

energy_t MaxCutInstance::cut_value(const Assignment& side) const {
  if (static_cast<int>(side.size()) != n) throw std::invalid_argument("assignment length mismatch");
  energy_t w = 0;
  for (const MaxCutEdge& e : edges)
    if (side[static_cast<std::size_t>(e.i)] != side[static_cast<std::size_t>(e.j)]) w += e.w;
  return w;
}

std::vector<int> spins_to_binary(const Assignment& s) {
  std::vector<int> x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = (1 - s[i]) / 2;
  return x;
}

Assignment binary_to_spins(const std::vector<int>& x) {
  Assignment s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = static_cast<spin_t>(1 - 2 * x[i]);
  return s;
}

// ---- conversions ---------------------------------------------------------

Problem qubo_to_ising(const QuboInstance& q) {
  const bool negate = q.sense == Sense::maximize;
  const auto un = static_cast<std::size_t>(q.n);
  // work at 4x the objective so the substitution stays integral, then divide
  // out the common factor g | 4
  std::vector<__int128> h4(un, 0);
  __int128 off4 = 0;
  std::vector<Coupling> j4;
  j4.reserve(q.entries.size());
  for (const QuboEntry& e : q.entries) {
    const __int128 v = negate ? -__int128(e.value) : __int128(e.value);
    if (e.i == e.j) {
      h4[static_cast<std::size_t>(e.i)] -= 2 * v;
      off4 += 2 * v;
    } else {
      j4.push_back({e.i, e.j, checked_narrow(v, "qubo coefficient")});
      h4[static_cast<std::size_t>(e.i)] -= v;
      h4[static_cast<std::size_t>(e.j)] -= v;
      off4 += v;
    }
  }
  energy_t g = 4;
  auto fold = [&g](__int128 v) {
    const __int128 a = v < 0 ? -v : v;
    if (a != 0) g = std::gcd(g, checked_narrow(a, "qubo conversion value"));
  };
  for (const Coupling& c : j4) fold(c.w);
  for (__int128 v : h4) fold(v);
  fold(off4);

  std::vector<Coupling> js;
  js.reserve(j4.size());
  for (const Coupling& c : j4) js.push_back({c.i, c.j, c.w / g});
  std::vector<energy_t> h(un, 0);
  for (std::size_t i = 0; i < un; ++i) h[i] = checked_narrow(h4[i] / g, "field");
  const energy_t offset = checked_narrow(off4 / g, "offset");
  const energy_t scale = checked_narrow(__int128(q.scale) * (4 / g), "scale");

  Problem p;
  p.ising = IsingInstance(q.n, std::move(js), std::move(h), offset, scale);
  p.kind = Kind::qubo;
  p.negated_from_max = negate;
  return p;
}

Problem maxcut_to_ising(const MaxCutInstance& g) {
  std::vector<Coupling> js;
  js.reserve(g.edges.size());
  for (const MaxCutEdge& e : g.edges) js.push_back({e.i, e.j, e.w});
  Problem p;
  p.ising = IsingInstance(g.n, std::move(js), std::vector<energy_t>(static_cast<std::size_t>(g.n), 0),
                          0, g.scale);
  p.kind = Kind::maxcut;
  p.maxcut_total_w = g.total_weight();
  return p;
}

Problem ising_problem(IsingInstance inst) {
  Problem p;
  p.ising = std::move(inst);
  p.kind = Kind::ising;
  return p;
}

// ---- parsing ---------------------------------------------------------------

namespace {

struct Rat {
  std::int64_t num, den;
};

Rat parse_decimal_token(const std::string& tok, int lineno) {
  std::size_t p = 0;
  bool neg = false;
  if (p < tok.size() && (tok[p] == '+' || tok[p] == '-')) neg = tok[p++] == '-';
  __int128 digits = 0;
  int ndigits = 0, fracdigits = 0;
  bool seen_dot = false;
  for (; p < tok.size(); ++p) {
    const char c = tok[p];
    if (c == '.') {
      if (seen_dot) throw ParseError(lineno, "malformed value '" + tok + "'");
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw ParseError(lineno, "malformed value '" + tok + "'");
    if (ndigits >= 18) throw ParseError(lineno, "value '" + tok + "' has too many digits");
    digits = digits * 10 + (c - '0');
    ++ndigits;
    if (seen_dot) ++fracdigits;
  }
  if (ndigits == 0) throw ParseError(lineno, "malformed value '" + tok + "'");
  std::int64_t num = static_cast<std::int64_t>(digits);
  std::int64_t den = 1;
  for (int k = 0; k < fracdigits; ++k) den *= 10;
  if (neg) num = -num;
  const std::int64_t d = std::gcd(std::llabs(num), den);
  if (d > 1) {
    num /= d;
    den /= d;
  }
  return {num, den};
}

struct LineReader {
  std::istream& in;
  int lineno = 0;

  bool next(std::string& out) {
    std::string s;
    while (std::getline(in, s)) {
      ++lineno;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      const std::size_t p = s.find_first_not_of(" \t");
      if (p == std::string::npos || s[p] == '#') continue;
      out = s;
      return true;
    }
    return false;
  }
};

struct RawEntry {
  int i, j;
  Rat v;
  int lineno;
};

struct RawFile {
  int n = 0;
  std::vector<RawEntry> entries;
  std::int64_t lcm_den = 1;
};

// shared triple reader: header "n m", then m rows "i j value"
RawFile read_sparse(std::istream& in) {
  LineReader rd{in};
  std::string line;
  if (!rd.next(line)) throw ParseError(rd.lineno == 0 ? 1 : rd.lineno, "missing header");
  RawFile f;
  long long m = 0;
  {
    std::istringstream hs(line);
    long long nn = 0;
    std::string extra;
    if (!(hs >> nn >> m) || (hs >> extra) || nn < 1 || m < 0)
      throw ParseError(rd.lineno, "malformed header (expected 'n m')");
    if (nn > 1 << 20) throw ParseError(rd.lineno, "variable count too large");
    f.n = static_cast<int>(nn);
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  for (long long k = 0; k < m; ++k) {
    if (!rd.next(line))
      throw ParseError(rd.lineno + 1, "unexpected end of input: expected " + std::to_string(m) +
                                          " entries, got " + std::to_string(k));
    std::istringstream es(line);
    long long i = 0, j = 0;
    std::string vtok, extra;
    if (!(es >> i >> j >> vtok) || (es >> extra))
      throw ParseError(rd.lineno, "malformed entry (expected 'i j value')");
    if (i < 1 || i > f.n || j < 1 || j > f.n)
      throw ParseError(rd.lineno, "index " + std::to_string(i > f.n || i < 1 ? i : j) +
                                      " out of range for n=" + std::to_string(f.n));
    if (i > j) std::swap(i, j);
    const std::uint64_t key =
        static_cast<std::uint64_t>(i - 1) * static_cast<std::uint64_t>(f.n) + static_cast<std::uint64_t>(j - 1);
    if (!seen.insert(key).second)
      throw ParseError(rd.lineno, "duplicate entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    const Rat v = parse_decimal_token(vtok, rd.lineno);
    const __int128 l = __int128(f.lcm_den) / std::gcd(f.lcm_den, v.den) * v.den;
    f.lcm_den = checked_narrow(l, "denominator lcm");
    f.entries.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v, rd.lineno});
  }
  if (rd.next(line))
    throw ParseError(rd.lineno, "expected " + std::to_string(m) + " entries, found extra data");
  return f;
}

energy_t scaled_value(const RawEntry& e, std::int64_t lcm_den) {
  return checked_narrow(__int128(e.v.num) * (lcm_den / e.v.den), "coefficient");
}

}  // namespace

QuboInstance parse_qubo(std::istream& in, Sense sense) {
  const RawFile f = read_sparse(in);
  QuboInstance q;
  q.n = f.n;
  q.sense = sense;
  q.scale = f.lcm_den;
  q.entries.reserve(f.entries.size());
  for (const RawEntry& e : f.entries) q.entries.push_back({e.i, e.j, scaled_value(e, f.lcm_den)});
  return q;
}

MaxCutInstance parse_maxcut(std::istream& in) {
  const RawFile f = read_sparse(in);
  MaxCutInstance g;
  g.n = f.n;
  g.scale = f.lcm_den;
  g.edges.reserve(f.entries.size());
  for (const RawEntry& e : f.entries) {
    if (e.i == e.j) throw ParseError(e.lineno, "self-loop not allowed in a cut instance");
    g.edges.push_back({e.i, e.j, scaled_value(e, f.lcm_den)});
  }
  return g;
}

IsingInstance parse_ising(std::istream& in) {
  const RawFile f = read_sparse(in);
  std::vector<Coupling> js;
  std::vector<energy_t> h(static_cast<std::size_t>(f.n), 0);
  for (const RawEntry& e : f.entries) {
    const energy_t v = scaled_value(e, f.lcm_den);
    if (e.i == e.j)
      h[static_cast<std::size_t>(e.i)] = v;
    else
      js.push_back({e.i, e.j, v});
  }
  return IsingInstance(f.n, std::move(js), std::move(h), 0, f.lcm_den);
}

ParsedInstance parse_instance(std::istream& in, Kind kind, Sense sense) {
  switch (kind) {
    case Kind::qubo:
      return parse_qubo(in, sense);
    case Kind::maxcut:
      return parse_maxcut(in);
    case Kind::ising:
      return parse_ising(in);
  }
  throw std::invalid_argument("unknown instance kind");
}

// ---- printing ----------------------------------------------------------

std::string print_qubo(const QuboInstance& q) {
  std::ostringstream os;
  os << q.n << ' ' << q.entries.size() << '\n';
  for (const QuboEntry& e : q.entries) os << e.i + 1 << ' ' << e.j + 1 << ' ' << e.value << '\n';
  return os.str();
}

std::string print_maxcut(const MaxCutInstance& g) {
  std::ostringstream os;
  os << g.n << ' ' << g.edges.size() << '\n';
  for (const MaxCutEdge& e : g.edges) os << e.i + 1 << ' ' << e.j + 1 << ' ' << e.w << '\n';
  return os.str();
}

std::string print_ising(const IsingInstance& inst) {
  if (inst.offset() != 0)
    throw std::logic_error("instance with a constant offset is not representable as a sparse file");
  std::size_t m = inst.couplings().size();
  for (energy_t h : inst.fields())
    if (h != 0) ++m;
  std::ostringstream os;
  os << inst.num_vars() << ' ' << m << '\n';
  for (const Coupling& c : inst.couplings()) os << c.i + 1 << ' ' << c.j + 1 << ' ' << c.w << '\n';
  for (int i = 0; i < inst.num_vars(); ++i)
    if (inst.field(i) != 0) os << i + 1 << ' ' << i + 1 << ' ' << inst.field(i) << '\n';
  return os.str();
}

std::string instance_to_json(const IsingInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.num_vars();
  auto& cs = j["couplings"] = nlohmann::json::array();
  for (const Coupling& c : inst.couplings()) cs.push_back({c.i + 1, c.j + 1, c.w});
  j["fields"] = inst.fields();
  j["offset"] = inst.offset();
  j["scale"] = inst.scale();
  j["sense"] = "min";
  return j.dump(2);
}

// ---- generators ----------------------------------------------------------

const char* gen_class_name(GenClass c) {
  switch (c) {
    case GenClass::sk:
      return "sk";
    case GenClass::uniform:
      return "uniform";
    case GenClass::grid2d:
      return "grid2d";
    case GenClass::grid3d:
      return "grid3d";
  }
  return "?";
}

namespace {

int exact_root(int n, int p) {
  int r = static_cast<int>(std::round(std::pow(static_cast<double>(n), 1.0 / p)));
  for (int c = std::max(1, r - 1); c <= r + 1; ++c) {
    int v = 1;
    for (int k = 0; k < p; ++k) v *= c;
    if (v == n) return c;
  }
  return -1;
}

spin_t pm_one(Rng& rng) { return rng.uniform_int(0, 1) == 0 ? spin_t{-1} : spin_t{1}; }

}  // namespace

IsingInstance generate_random(int n, const GenParams& params, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generator requires n >= 2");
  Rng rng(seed);
  std::vector<Coupling> js;
  std::vector<energy_t> h(static_cast<std::size_t>(n), 0);

  switch (params.cls) {
    case GenClass::sk:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) js.push_back({i, j, pm_one(rng)});
      break;
    case GenClass::uniform: {
      if (params.lo >= params.hi || (params.lo >= -1 && params.hi <= 1))
        throw std::invalid_argument("uniform class requires an open interval containing a nonzero integer");
      if (params.density <= 0.0 || params.density > 1.0)
        throw std::invalid_argument("density must be in (0, 1]");
      const std::int64_t lo = params.lo + 1, hi = params.hi - 1;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (params.density >= 1.0 || rng.bernoulli(params.density))
            js.push_back({i, j, rng.uniform_nonzero(lo, hi)});
      for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = rng.uniform_nonzero(lo, hi);
      break;
    }
    case GenClass::grid2d: {
      const int side = exact_root(n, 2);
      if (side < 0) throw std::invalid_argument("grid2d requires n to be a perfect square");
      auto id = [side](int r, int c) { return r * side + c; };
      for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
          if (c + 1 < side) js.push_back({id(r, c), id(r, c + 1), pm_one(rng)});
          if (r + 1 < side) js.push_back({id(r, c), id(r + 1, c), pm_one(rng)});
        }
      break;
    }
    case GenClass::grid3d: {
      const int side = exact_root(n, 3);
      if (side < 0) throw std::invalid_argument("grid3d requires n to be a perfect cube");
      auto id = [side](int x, int y, int z) { return (x * side + y) * side + z; };
      for (int x = 0; x < side; ++x)
        for (int y = 0; y < side; ++y)
          for (int z = 0; z < side; ++z) {
            if (z + 1 < side) js.push_back({id(x, y, z), id(x, y, z + 1), pm_one(rng)});
            if (y + 1 < side) js.push_back({id(x, y, z), id(x, y + 1, z), pm_one(rng)});
            if (x + 1 < side) js.push_back({id(x, y, z), id(x + 1, y, z), pm_one(rng)});
          }
      break;
    }
  }
  return IsingInstance(n, std::move(js), std::move(h));
}

}  // namespace spinbound
