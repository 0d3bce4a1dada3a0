#include "spinbound/ordering.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace spinbound {

VariableOrder identity_order(int n) {
  VariableOrder o;
  o.perm.resize(static_cast<std::size_t>(n));
  std::iota(o.perm.begin(), o.perm.end(), 0);
  o.inverse = o.perm;
  return o;
}

VariableOrder make_order(std::vector<int> perm) {
  VariableOrder o;
  o.inverse.assign(perm.size(), -1);
  for (std::size_t p = 0; p < perm.size(); ++p) {
    const int v = perm[p];
    if (v < 0 || v >= static_cast<int>(perm.size()) || o.inverse[static_cast<std::size_t>(v)] != -1)
      throw std::invalid_argument("not a permutation");
    o.inverse[static_cast<std::size_t>(v)] = static_cast<int>(p);
  }
  o.perm = std::move(perm);
  return o;
}

std::pair<spin_t, spin_t> value_order(energy_t h) {
  return h >= 0 ? std::pair<spin_t, spin_t>{-1, 1} : std::pair<spin_t, spin_t>{1, -1};
}

namespace {

energy_t row_abs_sum(const IsingInstance& sub, int i) {
  energy_t s = 0;
  for (const AdjEdge* e = sub.adj_begin(i); e != sub.adj_end(i); ++e) s += std::llabs(e->w);
  return s;
}

energy_t row_energy(const IsingInstance& sub, int i, const Assignment& s_star) {
  energy_t f = sub.field(i);
  for (const AdjEdge* e = sub.adj_begin(i); e != sub.adj_end(i); ++e)
    f += e->w * s_star[static_cast<std::size_t>(e->j)];
  return s_star[static_cast<std::size_t>(i)] * f;
}

}  // namespace

energy_t score_h1(const IsingInstance& sub, int i, const Assignment& s_star) {
  return row_abs_sum(sub, i) + std::llabs(row_energy(sub, i, s_star));
}

energy_t score_h2(const IsingInstance& sub, int i, const Assignment& s_star) {
  return row_abs_sum(sub, i) - row_energy(sub, i, s_star);
}

VariableOrder build_order(const IsingInstance& inst, int k_min, const AnnealSchedule& sched) {
  const int n = inst.num_vars();
  if (n < 2) return identity_order(n);

  // persistent working assignment; candidate spins are read from here so the
  // frustration signal in H2 survives (a greedy completion would always make
  // E_i non-positive and collapse H1 and H2)
  AnnealSchedule warm = sched;
  Assignment w = simulated_annealing(inst, nullptr, warm);

  std::vector<bool> in_block(static_cast<std::size_t>(n), false);
  std::vector<energy_t> block_abs_j(static_cast<std::size_t>(n), 0);  // sum_{j in block} |J_ij|
  std::vector<int> deep;  // chosen variables, deepest first
  deep.reserve(static_cast<std::size_t>(n));

  for (int step = 1; step <= n; ++step) {
    if (!deep.empty()) {
      // refresh w on the chosen block: greedy value for the newest member,
      // then a very short anneal over the block
      const int v_new = deep.back();
      energy_t f = inst.field(v_new);
      for (const AdjEdge* e = inst.adj_begin(v_new); e != inst.adj_end(v_new); ++e)
        if (in_block[static_cast<std::size_t>(e->j)]) f += e->w * w[static_cast<std::size_t>(e->j)];
      w[static_cast<std::size_t>(v_new)] = f >= 0 ? spin_t{-1} : spin_t{1};

      if (deep.size() >= 2) {
        const IsingInstance sub = inst.induced(deep);
        Assignment init(deep.size());
        for (std::size_t t = 0; t < deep.size(); ++t)
          init[t] = w[static_cast<std::size_t>(deep[t])];
        AnnealSchedule s = sched;
        s.rng_seed = sched.rng_seed + static_cast<std::uint64_t>(step);
        const Assignment refined = simulated_annealing(sub, &init, s);
        for (std::size_t t = 0; t < deep.size(); ++t)
          w[static_cast<std::size_t>(deep[t])] = refined[t];
      }
    }

    const bool use_h2 = step >= n - 2 * k_min;
    int pick = -1;
    energy_t pick_score = 0;
    for (int c = 0; c < n; ++c) {
      if (in_block[static_cast<std::size_t>(c)]) continue;
      energy_t f = inst.field(c);
      for (const AdjEdge* e = inst.adj_begin(c); e != inst.adj_end(c); ++e)
        if (in_block[static_cast<std::size_t>(e->j)]) f += e->w * w[static_cast<std::size_t>(e->j)];
      const energy_t e_row = w[static_cast<std::size_t>(c)] * f;
      const energy_t score =
          block_abs_j[static_cast<std::size_t>(c)] + (use_h2 ? -e_row : std::llabs(e_row));
      if (pick < 0 || score < pick_score) {
        pick = c;
        pick_score = score;
      }
    }

    in_block[static_cast<std::size_t>(pick)] = true;
    deep.push_back(pick);
    for (const AdjEdge* e = inst.adj_begin(pick); e != inst.adj_end(pick); ++e)
      block_abs_j[static_cast<std::size_t>(e->j)] += std::llabs(e->w);
  }

  // deep[0] is the deepest variable (last branching position)
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) perm[static_cast<std::size_t>(n - 1 - t)] = deep[static_cast<std::size_t>(t)];
  return make_order(std::move(perm));
}

Assignment unpermute_assignment(const Assignment& by_position, const VariableOrder& order) {
  Assignment s(by_position.size());
  for (std::size_t p = 0; p < by_position.size(); ++p)
    s[static_cast<std::size_t>(order.perm[p])] = by_position[p];
  return s;
}

}  // namespace spinbound
