#include "spinbound/bounds.hpp"

#include <stdexcept>

namespace spinbound {

energy_t subproblem_e1(const IsingInstance& inst, FieldMode mode) {
  if (inst.num_vars() == 0) return 0;
  return mode == FieldMode::keep_in_subproblems ? -std::llabs(inst.field(inst.num_vars() - 1)) : 0;
}

SubproblemTable make_fallback_table(const IsingInstance& inst, FieldMode mode) {
  const int n = inst.num_vars();
  SubproblemTable t;
  t.n = n;
  t.value.assign(static_cast<std::size_t>(n) + 1, 0);
  t.exact.assign(static_cast<std::size_t>(n) + 1, 0);
  if (n >= 1) {
    t.value[1] = subproblem_e1(inst, mode);
    t.exact[1] = 1;
  }
  t.exact[0] = 1;
  const bool fields = mode == FieldMode::keep_in_subproblems;
  for (int l = 2; l <= n; ++l) t.value[static_cast<std::size_t>(l)] = kh_root(inst, n - l, fields);
  return t;
}

energy_t kh_root(const IsingInstance& inst, int from, bool include_fields) {
  if (from < 0 || from > inst.num_vars()) throw std::invalid_argument("kh_root: bad start index");
  energy_t b = -inst.abs_coupling_sum_tail(from);
  if (include_fields) b -= inst.abs_field_sum_tail(from);
  return b;
}

energy_t kh_child(energy_t parent_bound, const IsingInstance& inst, const Assignment& prefix,
                  spin_t s_next, bool include_fields) {
  const int k = static_cast<int>(prefix.size());
  if (k >= inst.num_vars()) throw std::invalid_argument("kh_child: prefix already complete");
  energy_t b = parent_bound;
  for (const AdjEdge* e = inst.adj_begin(k); e != inst.adj_end(k); ++e) {
    if (e->j >= k) continue;
    if (e->w * prefix[static_cast<std::size_t>(e->j)] * s_next > 0) b += 2 * std::llabs(e->w);
  }
  if (include_fields && inst.field(k) * s_next > 0) b += 2 * std::llabs(inst.field(k));
  return b;
}

energy_t hdk_bound_direct(const IsingInstance& inst, const Assignment& prefix,
                          const SubproblemTable& table, FieldMode mode) {
  const int n = inst.num_vars();
  const int k = static_cast<int>(prefix.size());
  if (k > n) throw std::invalid_argument("hdk_bound_direct: prefix too long");
  if (static_cast<int>(table.value.size()) <= n) throw std::invalid_argument("subproblem table too small");

  energy_t pe = 0;
  std::vector<energy_t> sigma(static_cast<std::size_t>(n), 0);
  for (const Coupling& c : inst.couplings()) {
    if (c.j < k)
      pe += c.w * prefix[static_cast<std::size_t>(c.i)] * prefix[static_cast<std::size_t>(c.j)];
    else if (c.i < k)
      sigma[static_cast<std::size_t>(c.j)] += c.w * prefix[static_cast<std::size_t>(c.i)];
  }
  for (int i = 0; i < k; ++i) pe += inst.field(i) * prefix[static_cast<std::size_t>(i)];

  energy_t abs_sum = 0;
  const bool fields_in_abs = mode == FieldMode::omit_in_subproblems;
  for (int j = k; j < n; ++j)
    abs_sum += std::llabs(sigma[static_cast<std::size_t>(j)] + (fields_in_abs ? inst.field(j) : 0));

  return pe - abs_sum + table.lookup(n - k);
}

energy_t extrapolate_global_bound(energy_t b_sub, const IsingInstance& inst, int k, FieldMode mode) {
  const int n = inst.num_vars();
  if (k < 0 || k > n) throw std::invalid_argument("extrapolate_global_bound: bad prefix size");
  energy_t b = b_sub - (inst.abs_coupling_sum_tail(0) - inst.abs_coupling_sum_tail(k));
  b -= inst.abs_field_sum_tail(0) - inst.abs_field_sum_tail(k);
  if (mode == FieldMode::omit_in_subproblems) b -= inst.abs_field_sum_tail(k);
  return b;
}

BoundState::BoundState(const IsingInstance& inst, const SubproblemTable& table, FieldMode mode)
    : inst_(&inst), table_(&table), n_(inst.num_vars()) {
  if (static_cast<int>(table.value.size()) <= n_) throw std::invalid_argument("subproblem table too small");
  sigma_.assign(static_cast<std::size_t>(n_), 0);
  if (mode == FieldMode::omit_in_subproblems)
    mh_ = inst.fields();
  else
    mh_.assign(static_cast<std::size_t>(n_), 0);
  for (int j = 0; j < n_; ++j) abs_sum_ += std::llabs(mh_[static_cast<std::size_t>(j)]);
}

void BoundState::descend(spin_t s) {
  if (depth_ >= n_) throw std::out_of_range("descend past the last variable");
  const int p = depth_;
  pe_ += s * (sigma_[static_cast<std::size_t>(p)] + inst_->field(p));
  abs_sum_ -= std::llabs(sigma_[static_cast<std::size_t>(p)] + mh_[static_cast<std::size_t>(p)]);
  for (const AdjEdge* e = inst_->fwd_begin(p); e != inst_->fwd_end(p); ++e) {
    const auto j = static_cast<std::size_t>(e->j);
    abs_sum_ -= std::llabs(sigma_[j] + mh_[j]);
    sigma_[j] += e->w * s;
    abs_sum_ += std::llabs(sigma_[j] + mh_[j]);
  }
  ++depth_;
}

void BoundState::backtrack(spin_t s) {
  if (depth_ <= 0) throw std::out_of_range("backtrack below the root");
  const int p = --depth_;
  for (const AdjEdge* e = inst_->fwd_begin(p); e != inst_->fwd_end(p); ++e) {
    const auto j = static_cast<std::size_t>(e->j);
    abs_sum_ -= std::llabs(sigma_[j] + mh_[j]);
    sigma_[j] -= e->w * s;
    abs_sum_ += std::llabs(sigma_[j] + mh_[j]);
  }
  abs_sum_ += std::llabs(sigma_[static_cast<std::size_t>(p)] + mh_[static_cast<std::size_t>(p)]);
  pe_ -= s * (sigma_[static_cast<std::size_t>(p)] + inst_->field(p));
}

}  // namespace spinbound
