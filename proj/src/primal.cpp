#include "spinbound/primal.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "spinbound/rng.hpp"

namespace spinbound {

namespace {

// sum_j J_ij s_j over assigned/current neighbors, plus h_i
std::vector<energy_t> local_fields(const IsingInstance& inst, const Assignment& s) {
  std::vector<energy_t> f(s.size(), 0);
  for (const Coupling& c : inst.couplings()) {
    f[static_cast<std::size_t>(c.i)] += c.w * s[static_cast<std::size_t>(c.j)];
    f[static_cast<std::size_t>(c.j)] += c.w * s[static_cast<std::size_t>(c.i)];
  }
  return f;
}

}  // namespace

Assignment greedy_extend(const IsingInstance& inst, const Assignment& partial) {
  const int n = inst.num_vars();
  const int l = static_cast<int>(partial.size());
  if (l > n) throw std::invalid_argument("partial assignment longer than instance");

  Assignment s(static_cast<std::size_t>(n), 0);
  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  std::vector<energy_t> field(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) field[static_cast<std::size_t>(i)] = inst.field(i);

  auto assign = [&](int i, spin_t v) {
    s[static_cast<std::size_t>(i)] = v;
    assigned[static_cast<std::size_t>(i)] = true;
    for (const AdjEdge* e = inst.adj_begin(i); e != inst.adj_end(i); ++e)
      if (!assigned[static_cast<std::size_t>(e->j)]) field[static_cast<std::size_t>(e->j)] += e->w * v;
  };

  for (int t = 0; t < l; ++t) assign(n - l + t, partial[static_cast<std::size_t>(t)]);

  for (int step = l; step < n; ++step) {
    int pick = -1;
    energy_t best = -1;
    for (int i = 0; i < n; ++i) {
      if (assigned[static_cast<std::size_t>(i)]) continue;
      const energy_t mag = std::llabs(field[static_cast<std::size_t>(i)]);
      if (mag > best) {
        best = mag;
        pick = i;
      }
    }
    assign(pick, field[static_cast<std::size_t>(pick)] >= 0 ? spin_t{-1} : spin_t{1});
  }
  return s;
}

Assignment simulated_annealing(const IsingInstance& inst, const Assignment* init,
                               const AnnealSchedule& sched) {
  const int n = inst.num_vars();
  if (sched.sweeps < 1 || sched.restarts < 1) throw std::invalid_argument("bad anneal schedule");
  if (sched.t_end <= 0) throw std::invalid_argument("t_end must be positive");

  double t0 = sched.t_start;
  if (t0 <= 0) {
    energy_t m = 0;
    for (int i = 0; i < n; ++i) {
      energy_t row = std::llabs(inst.field(i));
      for (const AdjEdge* e = inst.adj_begin(i); e != inst.adj_end(i); ++e) row += std::llabs(e->w);
      m = std::max(m, row);
    }
    t0 = static_cast<double>(m);
  }
  t0 = std::max(t0, sched.t_end);

  Assignment best;
  energy_t best_e = 0;
  bool have_best = false;
  auto consider = [&](const Assignment& s, energy_t e) {
    if (!have_best || e < best_e) {
      best = s;
      best_e = e;
      have_best = true;
    }
  };

  for (int r = 0; r < sched.restarts; ++r) {
    Rng rng(sched.rng_seed + static_cast<std::uint64_t>(r));
    Assignment s;
    if (r == 0 && init != nullptr) {
      s = *init;
      if (static_cast<int>(s.size()) != n) throw std::invalid_argument("init assignment length mismatch");
    } else {
      s.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        s[static_cast<std::size_t>(i)] = rng.uniform_int(0, 1) == 0 ? spin_t{-1} : spin_t{1};
    }
    std::vector<energy_t> f = local_fields(inst, s);
    energy_t e = inst.raw_energy(s);
    consider(s, e);

    for (int sweep = 0; sweep < sched.sweeps; ++sweep) {
      const double frac =
          sched.sweeps == 1 ? 1.0 : static_cast<double>(sweep) / static_cast<double>(sched.sweeps - 1);
      const double t = t0 * std::pow(sched.t_end / t0, frac);
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const energy_t de = -2 * s[ui] * (f[ui] + inst.field(i));
        if (de > 0 && rng.uniform01() >= std::exp(-static_cast<double>(de) / t)) continue;
        s[ui] = static_cast<spin_t>(-s[ui]);
        e += de;
        for (const AdjEdge* adj = inst.adj_begin(i); adj != inst.adj_end(i); ++adj)
          f[static_cast<std::size_t>(adj->j)] += 2 * adj->w * s[ui];
        if (e < best_e) consider(s, e);
      }
    }
  }
  return best;
}

}  // namespace spinbound
