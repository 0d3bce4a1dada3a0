#include "spinbound/brute_force.hpp"

#include <bit>
#include <stdexcept>
#include <thread>
#include <vector>

namespace spinbound {

namespace {

// enumerates all completions of the first `prefix_len` spins of s
BruteForceResult enumerate_suffix(const IsingInstance& inst, Assignment s, int prefix_len) {
  const int n = inst.num_vars();
  std::vector<energy_t> f(static_cast<std::size_t>(n), 0);
  for (const Coupling& c : inst.couplings()) {
    f[static_cast<std::size_t>(c.i)] += c.w * s[static_cast<std::size_t>(c.j)];
    f[static_cast<std::size_t>(c.j)] += c.w * s[static_cast<std::size_t>(c.i)];
  }
  energy_t e = inst.raw_energy(s);
  BruteForceResult best{e, s};

  const int free_bits = n - prefix_len;
  const std::uint64_t count = std::uint64_t{1} << free_bits;
  for (std::uint64_t t = 1; t < count; ++t) {
    const int i = prefix_len + std::countr_zero(t);  // Gray code: flip the lowest set bit index
    const auto ui = static_cast<std::size_t>(i);
    e += -2 * s[ui] * (f[ui] + inst.field(i));
    s[ui] = static_cast<spin_t>(-s[ui]);
    for (const AdjEdge* a = inst.adj_begin(i); a != inst.adj_end(i); ++a)
      f[static_cast<std::size_t>(a->j)] += 2 * a->w * s[ui];
    if (e < best.raw_min) {
      best.raw_min = e;
      best.assignment = s;
    }
  }
  return best;
}

}  // namespace

BruteForceResult brute_force_min(const IsingInstance& inst, int threads) {
  const int n = inst.num_vars();
  if (n < 1) throw std::invalid_argument("empty instance");
  if (n > 26) throw std::invalid_argument("brute force is guarded to n <= 26");

  int prefix = 0;
  while ((1 << prefix) < threads && prefix < n) ++prefix;
  const int nworkers = 1 << prefix;

  std::vector<BruteForceResult> results(static_cast<std::size_t>(nworkers));
  auto work = [&](int w) {
    Assignment s(static_cast<std::size_t>(n), 1);
    for (int b = 0; b < prefix; ++b)
      if ((w >> (prefix - 1 - b)) & 1) s[static_cast<std::size_t>(b)] = -1;
    results[static_cast<std::size_t>(w)] = enumerate_suffix(inst, std::move(s), prefix);
  };

  if (nworkers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }

  BruteForceResult best = results[0];
  for (int w = 1; w < nworkers; ++w)
    if (results[static_cast<std::size_t>(w)].raw_min < best.raw_min) best = results[static_cast<std::size_t>(w)];
  return best;
}

}  // namespace spinbound
