#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <limits>
#include <vector>

#include "doctest.h"
#include "spinbound/bounds.hpp"
#include "spinbound/brute_force.hpp"
#include "spinbound/rng.hpp"

using namespace spinbound;

namespace {

// independent closed form of the KH recursion: the root surrenders every
// magnitude; each satisfied pair/field among assigned spins pays it back twice
energy_t kh_closed_form(const IsingInstance& inst, const Assignment& prefix, bool fields) {
  const int k = static_cast<int>(prefix.size());
  energy_t b = -inst.abs_coupling_sum_tail(0);
  if (fields) b -= inst.abs_field_sum_tail(0);
  for (const Coupling& c : inst.couplings())
    if (c.j < k && c.w * prefix[static_cast<std::size_t>(c.i)] * prefix[static_cast<std::size_t>(c.j)] > 0)
      b += 2 * std::llabs(c.w);
  if (fields)
    for (int i = 0; i < k; ++i)
      if (inst.field(i) * prefix[static_cast<std::size_t>(i)] > 0) b += 2 * std::llabs(inst.field(i));
  return b;
}

// exact table: every trailing subproblem solved by exhaustive enumeration
SubproblemTable exact_table(const IsingInstance& inst, FieldMode mode) {
  const int n = inst.num_vars();
  SubproblemTable t = make_fallback_table(inst, mode);
  for (int l = 2; l <= n; ++l) {
    const IsingInstance sub = inst.trailing_subinstance(l, mode == FieldMode::omit_in_subproblems);
    t.value[static_cast<std::size_t>(l)] = brute_force_min(sub).raw_min;
    t.exact[static_cast<std::size_t>(l)] = 1;
  }
  return t;
}

struct TreeCheck {
  const IsingInstance& inst;
  const SubproblemTable& table;
  FieldMode mode;
  int checked_nodes = 0;

  // returns the exhaustive minimum over completions of `prefix`; checks the
  // incremental state, the direct formula, and the KH chain at every node
  energy_t run(BoundState& st, Assignment& prefix, energy_t kh_fields, energy_t kh_nofields) {
    ++checked_nodes;
    const int n = inst.num_vars();
    const int k = static_cast<int>(prefix.size());
    REQUIRE(st.bound() == hdk_bound_direct(inst, prefix, table, mode));
    REQUIRE(kh_fields == kh_closed_form(inst, prefix, true));
    REQUIRE(kh_nofields == kh_closed_form(inst, prefix, false));
    if (k == n) {
      REQUIRE(st.partial_energy() == inst.raw_energy(prefix));
      return st.partial_energy();
    }
    energy_t best = std::numeric_limits<energy_t>::max();
    for (const spin_t s : {spin_t{-1}, spin_t{1}}) {
      const energy_t child_f = kh_child(kh_fields, inst, prefix, s, true);
      const energy_t child_n = kh_child(kh_nofields, inst, prefix, s, false);
      REQUIRE(child_f >= kh_fields);  // Iverson term is non-negative
      REQUIRE(child_n >= kh_nofields);
      const BoundState before = st;
      st.descend(s);
      prefix.push_back(s);
      best = std::min(best, run(st, prefix, child_f, child_n));
      prefix.pop_back();
      st.backtrack(s);
      REQUIRE(st == before);  // exact inverse
    }
    REQUIRE(st.bound() <= best);  // HDK soundness
    REQUIRE(kh_fields <= best);   // KH soundness (fields counted)
    return best;
  }
};

IsingInstance random_instance(int n, std::uint64_t seed, bool with_fields) {
  GenParams p{GenClass::uniform, -100, 100, 0.8};
  IsingInstance inst = generate_random(n, p, seed);
  if (!with_fields)
    return IsingInstance(n, inst.couplings(), std::vector<energy_t>(static_cast<std::size_t>(n), 0));
  return inst;
}

}  // namespace

TEST_CASE("kh_root examples") {
  IsingInstance inst(3, {{0, 1, 3}, {0, 2, -2}, {1, 2, 5}}, {0, 0, 0});
  CHECK(kh_root(inst, 0, false) == -10);
  CHECK(kh_root(inst, 1, false) == -5);  // only the (2,3) pair remains
  IsingInstance withf(2, {{0, 1, 3}}, {2, -1});
  CHECK(kh_root(withf, 0, true) == -6);
}

TEST_CASE("kh_child examples") {
  IsingInstance inst(2, {{0, 1, 5}}, {0, 0});
  const energy_t root = kh_root(inst, 0, false);
  CHECK(root == -5);
  CHECK(kh_child(root, inst, {1}, 1, false) == 5);    // aligned pair pays 2|J|
  CHECK(kh_child(root, inst, {1}, -1, false) == -5);  // Iverson term zero
}

TEST_CASE("hdk_bound_direct: two-spin exact case") {
  IsingInstance inst(2, {{0, 1, -4}}, {0, 0});
  SubproblemTable t = make_fallback_table(inst, FieldMode::keep_in_subproblems);
  CHECK(t.value[2] == -4);  // KH root of the full problem is already exact here
  CHECK(hdk_bound_direct(inst, {}, t, FieldMode::keep_in_subproblems) == -4);
}

TEST_CASE("hdk modes coincide when no fields are present") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const IsingInstance inst = random_instance(9, seed, false);
    const SubproblemTable t1 = exact_table(inst, FieldMode::omit_in_subproblems);
    const SubproblemTable t2 = exact_table(inst, FieldMode::keep_in_subproblems);
    Rng rng(seed);
    Assignment prefix;
    for (int k = 0; k <= 9; ++k) {
      CHECK(hdk_bound_direct(inst, prefix, t1, FieldMode::omit_in_subproblems) ==
            hdk_bound_direct(inst, prefix, t2, FieldMode::keep_in_subproblems));
      if (k < 9) prefix.push_back(rng.bernoulli(0.5) ? spin_t{1} : spin_t{-1});
    }
  }
}

TEST_CASE("hdk_descend worked example") {
  IsingInstance inst(3, {{0, 1, 2}, {0, 2, -1}, {1, 2, 4}}, {0, 0, 0});
  SubproblemTable t = make_fallback_table(inst, FieldMode::keep_in_subproblems);
  BoundState st(inst, t, FieldMode::keep_in_subproblems);
  st.descend(1);
  st.descend(-1);
  CHECK(st.partial_energy() == -2);
  CHECK(st.sigma(2) == -5);
  CHECK(st.bound() == -7);  // E_1 = 0 with no field on the last spin
  CHECK(st.bound() == hdk_bound_direct(inst, {1, -1}, t, FieldMode::keep_in_subproblems));
}

TEST_CASE("full-tree property check: incremental == direct, bounds sound, KH chain exact") {
  for (const FieldMode mode : {FieldMode::keep_in_subproblems, FieldMode::omit_in_subproblems}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      for (const bool with_fields : {false, true}) {
        const IsingInstance inst = random_instance(8, seed, with_fields);
        const SubproblemTable exact = exact_table(inst, mode);
        const SubproblemTable fallback = make_fallback_table(inst, mode);
        for (const SubproblemTable* t : {&exact, &fallback}) {
          TreeCheck check{inst, *t, mode};
          BoundState st(inst, *t, mode);
          Assignment prefix;
          check.run(st, prefix, kh_closed_form(inst, {}, true), kh_closed_form(inst, {}, false));
          CHECK(check.checked_nodes == (1 << 9) - 1);
        }
      }
    }
  }
}

TEST_CASE("larger soundness sweep at n = 12") {
  const IsingInstance inst = random_instance(12, 42, true);
  const SubproblemTable t = exact_table(inst, FieldMode::keep_in_subproblems);
  TreeCheck check{inst, t, FieldMode::keep_in_subproblems};
  BoundState st(inst, t, FieldMode::keep_in_subproblems);
  Assignment prefix;
  check.run(st, prefix, kh_closed_form(inst, {}, true), kh_closed_form(inst, {}, false));
  CHECK(check.checked_nodes == (1 << 13) - 1);
}

TEST_CASE("descend/backtrack random walk returns to a fresh root state") {
  const IsingInstance inst = random_instance(16, 7, true);
  const SubproblemTable t = make_fallback_table(inst, FieldMode::keep_in_subproblems);
  BoundState st(inst, t, FieldMode::keep_in_subproblems);
  const BoundState fresh = st;
  Rng rng(99);
  std::vector<spin_t> stack;
  for (int step = 0; step < 1000; ++step) {
    const bool can_down = static_cast<int>(stack.size()) < 16;
    const bool go_down = !stack.empty() && can_down ? rng.bernoulli(0.55) : can_down;
    if (go_down) {
      const spin_t s = rng.bernoulli(0.5) ? spin_t{1} : spin_t{-1};
      st.descend(s);
      stack.push_back(s);
    } else {
      st.backtrack(stack.back());
      stack.pop_back();
    }
  }
  while (!stack.empty()) {
    st.backtrack(stack.back());
    stack.pop_back();
  }
  CHECK(st == fresh);
}

TEST_CASE("extrapolation: identity at k = 0 and soundness for all prefixes") {
  SUBCASE("k = 0 is the identity when subproblems keep fields") {
    const IsingInstance inst = random_instance(8, 3, true);
    CHECK(extrapolate_global_bound(-123, inst, 0, FieldMode::keep_in_subproblems) == -123);
  }
  for (const FieldMode mode : {FieldMode::keep_in_subproblems, FieldMode::omit_in_subproblems}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const IsingInstance inst = random_instance(10, seed, true);
      const energy_t full_min = brute_force_min(inst).raw_min;
      for (int k = 0; k <= 8; ++k) {
        const IsingInstance sub =
            inst.trailing_subinstance(10 - k, mode == FieldMode::omit_in_subproblems);
        const energy_t e_sub = brute_force_min(sub).raw_min;
        CHECK(extrapolate_global_bound(e_sub, inst, k, mode) <= full_min);
      }
    }
  }
}

TEST_CASE("extrapolating the exact E_2 stays below the optimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const IsingInstance inst = random_instance(10, seed + 50, true);
    const IsingInstance tail2 = inst.trailing_subinstance(2, false);
    const energy_t e2 = brute_force_min(tail2).raw_min;
    CHECK(extrapolate_global_bound(e2, inst, 8, FieldMode::keep_in_subproblems) <=
          brute_force_min(inst).raw_min);
  }
}

TEST_CASE("fallback entries never exceed the exact subproblem optima") {
  for (const FieldMode mode : {FieldMode::keep_in_subproblems, FieldMode::omit_in_subproblems}) {
    const IsingInstance inst = random_instance(11, 4, true);
    const SubproblemTable fb = make_fallback_table(inst, mode);
    const SubproblemTable ex = exact_table(inst, mode);
    for (int l = 0; l <= 11; ++l)
      CHECK(fb.value[static_cast<std::size_t>(l)] <= ex.value[static_cast<std::size_t>(l)]);
  }
}

TEST_CASE("HDK root bound with the exact table dominates the KH root") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const IsingInstance inst = random_instance(10, seed + 20, true);
    const SubproblemTable t = exact_table(inst, FieldMode::keep_in_subproblems);
    CHECK(hdk_bound_direct(inst, {}, t, FieldMode::keep_in_subproblems) >= kh_root(inst, 0, true));
  }
}
