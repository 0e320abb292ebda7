#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cymono/core/domain.hpp"
#include "cymono/core/involution.hpp"
#include "cymono/core/kernels.hpp"
#include "cymono/core/sigma.hpp"
#include "cymono/core/tensor.hpp"
#include "cymono/rng.hpp"

using namespace cymono;
using core::ExecPolicy;
using core::Index;
using core::Rank;

TEST_CASE("apply_sigma rotates left") {
  std::vector<Index> t{1, 2, 3};
  CHECK(core::apply_sigma(t) == std::vector<Index>{2, 3, 1});
  std::vector<Index> diag{5, 5, 5};
  CHECK(core::apply_sigma(diag) == std::vector<Index>{5, 5, 5});
}

TEST_CASE("sigma applied N times is the identity") {
  std::vector<Index> t{1, 2, 3};
  std::vector<Index> cur = t;
  for (int k = 0; k < 3; ++k) cur = core::apply_sigma(cur);
  CHECK(cur == t);
}

TEST_CASE("sigma_rank matches apply_sigma exhaustively") {
  const Index m = 4;
  const int order = 3;
  const Rank tail = core::tail_size(m, order);
  std::vector<Index> tuple(order);
  for (Rank r = 0; r < core::checked_tensor_size(m, order); ++r) {
    core::unrank_tuple(r, m, order, tuple);
    const std::vector<Index> rotated = core::apply_sigma(tuple);
    CHECK(core::sigma_rank(r, m, tail) == core::tuple_rank(rotated, m));
    // sigma^N = identity at the rank level.
    Rank cur = r;
    for (int k = 0; k < order; ++k) cur = core::sigma_rank(cur, m, tail);
    CHECK(cur == r);
  }
}

TEST_CASE("rank round-trip") {
  const Index m = 5;
  const int order = 4;
  std::vector<Index> tuple(order);
  for (Rank r = 0; r < core::checked_tensor_size(m, order); ++r) {
    core::unrank_tuple(r, m, order, tuple);
    CHECK(core::tuple_rank(tuple, m) == r);
  }
}

TEST_CASE("tensor cap guard") {
  CHECK_THROWS_AS(core::checked_tensor_size(100, 5, 10'000'000), CapExceededError);
  CHECK(core::checked_tensor_size(10, 7, 10'000'000) == 10'000'000);
}

TEST_CASE("domain invariants") {
  CHECK_THROWS_AS(core::DiscreteDomain(1, {0.0, 0.0}), InvalidInputError);  // duplicate
  CHECK_THROWS_AS(core::DiscreteDomain(1, {0.0, 1.0}, {0.5, 0.6}), InvalidInputError);
  CHECK_THROWS_AS(core::DiscreteDomain(1, {0.0, 1.0}, {-0.1, 1.1}), InvalidInputError);
  CHECK_THROWS_AS(core::DiscreteDomain(2, {0.0, 1.0, 2.0}), InvalidInputError);  // ragged

  const core::DiscreteDomain domain(1, {0.0, 1.0, 2.0});
  CHECK(domain.size() == 3);
  CHECK(domain.uniform_weights());
  CHECK(domain.weight(0) == doctest::Approx(1.0 / 3.0));

  const core::DiscreteDomain weighted(1, {0.0, 1.0}, {0.25, 0.75});
  CHECK_FALSE(weighted.uniform_weights());

  double h = 0.0;
  const core::DiscreteDomain grid(1, {0.0, 0.5, 1.0, 1.5});
  CHECK(grid.regular_grid_1d(&h));
  CHECK(h == doctest::Approx(0.5));
  const core::DiscreteDomain irregular(1, {0.0, 0.5, 2.0});
  CHECK_FALSE(irregular.regular_grid_1d(&h));
}

TEST_CASE("field tuple shape checks") {
  CHECK_THROWS_AS(core::FieldTuple(1, 2, 1, {0.0, 0.0}), InvalidInputError);
  CHECK_THROWS_AS(core::FieldTuple(3, 2, 1, {0.0, 0.0, 0.0}), InvalidInputError);
  const core::FieldTuple fields(3, 2, 1, {1.0, 2.0, 3.0, 4.0});
  CHECK(fields.field_count() == 2);
  CHECK(fields.value(1, 0)[0] == 3.0);
}

TEST_CASE("index cycle validation") {
  CHECK_THROWS_AS(core::IndexCycle(3, {0, 1}, 2), InvalidInputError);
  CHECK_THROWS_AS(core::IndexCycle(2, {0, 5}, 2), InvalidInputError);
  const core::IndexCycle cycle(3, {0, 1, 0}, 2);
  CHECK(cycle.at(4) == 1);  // modular indexing
}

TEST_CASE("hamiltonian flag verification") {
  // diagonal_zero must hold exactly.
  CHECK_THROWS_AS(core::GridHamiltonian(2, 2, {1e-15, 0.0, 0.0, 0.0}, {.diagonal_zero = true}),
                  InvalidInputError);
  CHECK_NOTHROW(core::GridHamiltonian(2, 2, {0.0, 0.5, -0.5, 0.0},
                                      {.diagonal_zero = true, .sub_antisymmetric = true,
                                       .antisymmetric = true}));
  // A positive rotation sum fails the sub-antisymmetric claim.
  CHECK_THROWS_AS(core::GridHamiltonian(2, 2, {0.0, 0.5, 0.5, 0.0}, {.sub_antisymmetric = true}),
                  InvalidInputError);
  CHECK_NOTHROW(core::GridHamiltonian(2, 2, {0.0, 0.5, -0.7, 0.0}, {.sub_antisymmetric = true}));
  CHECK_THROWS_AS(core::GridHamiltonian(2, 2, {0.0, 0.5, -0.7, 0.0}, {.antisymmetric = true}),
                  InvalidInputError);
}

TEST_CASE("rotation sums by full scan") {
  // H(i,j) = g(i) - g(j) has zero rotation sums.
  const Index m = 3;
  std::vector<double> g{0.3, -1.2, 2.0};
  std::vector<double> values(m * m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) values[i * m + j] = g[i] - g[j];
  const core::GridHamiltonian h(2, m, values);
  CHECK(core::max_abs_rotation_sum(h) <= 1e-15);
}

TEST_CASE("sigma coupling invariants") {
  const std::vector<double> mu{0.5, 0.5};
  // Diagonal coupling is sigma-invariant with the right marginal.
  CHECK_NOTHROW(core::SigmaCoupling(2, 2, {0.5, 0.0, 0.0, 0.5}, mu));
  // Off-diagonal mass must be symmetric under sigma.
  CHECK_THROWS_AS(core::SigmaCoupling(2, 2, {0.25, 0.5, 0.0, 0.25}, mu), InvalidInputError);
  // Wrong total mass.
  CHECK_THROWS_AS(core::SigmaCoupling(2, 2, {0.3, 0.0, 0.0, 0.3}, mu), InvalidInputError);
  // Wrong first marginal.
  const std::vector<double> skew{0.3, 0.7};
  CHECK_THROWS_AS(core::SigmaCoupling(2, 2, {0.5, 0.0, 0.0, 0.5}, skew), InvalidInputError);
  // Negative entries are rejected.
  CHECK_THROWS_AS(core::SigmaCoupling(2, 2, {0.6, -0.1, -0.1, 0.6}, mu), InvalidInputError);
}

TEST_CASE("n-involution invariants") {
  CHECK_THROWS_AS(core::NInvolution(2, {0, 0}), InvalidInputError);       // not a bijection
  CHECK_THROWS_AS(core::NInvolution(2, {1, 2, 0}), InvalidInputError);    // 3-cycle, S^2 != I
  CHECK_NOTHROW(core::NInvolution(3, {1, 2, 0}));
  CHECK_NOTHROW(core::NInvolution(4, {1, 0, 3, 2}));
  const core::NInvolution s(3, {1, 2, 0});
  CHECK(s.apply_pow(0, 2) == 2);
  CHECK(s.apply_pow(0, 3) == 0);
  CHECK(s.cycles().size() == 1);
}

TEST_CASE("kernels: serial and parallel agree exactly") {
  const Rank n = 10'000;
  auto value_at = [](Rank i) {
    // A wiggly deterministic sequence with repeated minima.
    const double x = static_cast<double>(i % 97) - 48.0;
    return x * x - static_cast<double>(i % 13);
  };
  const core::ArgMin serial = core::scan_min(n, ExecPolicy::Serial, value_at);
  const core::ArgMin parallel = core::scan_min(n, ExecPolicy::Parallel, value_at);
  CHECK(serial.value == parallel.value);
  CHECK(serial.index == parallel.index);

  CHECK(core::scan_sum(n, ExecPolicy::Serial, value_at) ==
        core::scan_sum(n, ExecPolicy::Parallel, value_at));
  CHECK(core::scan_max_value(n, ExecPolicy::Serial, value_at) ==
        core::scan_max_value(n, ExecPolicy::Parallel, value_at));

  std::vector<double> a(n), b(n);
  core::fill_indexed(n, ExecPolicy::Serial, [&](Rank i) { a[i] = value_at(i); });
  core::fill_indexed(n, ExecPolicy::Parallel, [&](Rank i) { b[i] = value_at(i); });
  CHECK(a == b);
}

TEST_CASE("argmin reports the first index among ties") {
  auto value_at = [](Rank i) { return static_cast<double>((i * 7) % 10); };
  const core::ArgMin best = core::scan_min(1000, ExecPolicy::Parallel, value_at);
  CHECK(best.value == 0.0);
  CHECK(best.index == 0);
  auto tie_at_3 = [](Rank i) { return i % 4 == 3 ? -1.0 : 0.0; };
  CHECK(core::scan_min(1000, ExecPolicy::Parallel, tie_at_3).index == 3);
}

TEST_CASE("seed fan-out is stable") {
  const SeedSequence seeds(42);
  CHECK(seeds.stream("a") != seeds.stream("b"));
  CHECK(seeds.stream("a") == SeedSequence(42).stream("a"));
  Rng rng(seeds.stream("a"));
  const double first = rng.uniform01();
  CHECK(first >= 0.0);
  CHECK(first < 1.0);
  Rng again(seeds.stream("a"));
  CHECK(again.uniform01() == first);
}
