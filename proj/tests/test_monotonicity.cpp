#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cymono/cli/pipeline.hpp"
#include "cymono/monotonicity/monotonicity.hpp"
#include "cymono/rng.hpp"

using namespace cymono;
using namespace cymono::monotonicity;
using core::DiscreteDomain;
using core::FieldTuple;
using core::Index;
using core::IndexCycle;

namespace {

// (u, 0, ..., 0) of a given order from a single field.
FieldTuple embed_single(const DiscreteDomain& domain, std::span<const double> field, int order) {
  std::vector<double> values(static_cast<std::size_t>(order - 1) * field.size(), 0.0);
  std::copy(field.begin(), field.end(), values.begin());
  return FieldTuple(order, domain.size(), domain.dimension(), std::move(values));
}

// (u, u, ..., u) of a given order.
FieldTuple embed_repeated(const DiscreteDomain& domain, std::span<const double> field, int order) {
  std::vector<double> values;
  for (int l = 0; l < order - 1; ++l) values.insert(values.end(), field.begin(), field.end());
  return FieldTuple(order, domain.size(), domain.dimension(), std::move(values));
}

DiscreteDomain triangle() { return DiscreteDomain(2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0}); }

std::vector<double> rotation_field(const DiscreteDomain& domain) {
  std::vector<double> field(static_cast<std::size_t>(domain.size()) * 2);
  for (Index i = 0; i < domain.size(); ++i) {
    field[static_cast<std::size_t>(i * 2)] = -domain.point(i)[1];
    field[static_cast<std::size_t>(i * 2 + 1)] = domain.point(i)[0];
  }
  return field;
}

std::vector<double> identity_field(const DiscreteDomain& domain) {
  return std::vector<double>(domain.points_flat().begin(), domain.points_flat().end());
}

}  // namespace

TEST_CASE("cycle_defect hand values") {
  const DiscreteDomain two(1, {0.0, 1.0});
  const FieldTuple id2 = embed_single(two, identity_field(two), 2);
  CHECK(cycle_defect(two, id2, IndexCycle(2, {0, 1}, 2)) == doctest::Approx(1.0));

  const DiscreteDomain three(1, {0.0, 1.0, 2.0});
  const FieldTuple uu = embed_repeated(three, identity_field(three), 3);
  CHECK(cycle_defect(three, uu, IndexCycle(3, {0, 1, 2}, 3)) == doctest::Approx(6.0));

  const FieldTuple zero = FieldTuple::zeros(3, 3, 1);
  CHECK(cycle_defect(three, zero, IndexCycle(3, {2, 0, 1}, 3)) == 0.0);
}

TEST_CASE("single_cycle_defect hand values") {
  const DiscreteDomain tri = triangle();
  const std::vector<double> rot = rotation_field(tri);
  CHECK(single_cycle_defect(tri, rot, IndexCycle(3, {0, 1, 2}, 3), 1) == doctest::Approx(-1.0));

  // A rotation is (N, 2)-null for N = 4: pair terms cancel exactly.
  Rng rng(SeedSequence(2).stream("step2-cycles"));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Index> indices(4);
    for (Index& v : indices) v = rng.uniform_int(0, 2);
    CHECK(std::abs(single_cycle_defect(tri, rot, IndexCycle(4, std::move(indices), 3), 2)) <=
          1e-15);
  }

  const DiscreteDomain two(1, {0.0, 1.0});
  CHECK(single_cycle_defect(two, identity_field(two), IndexCycle(2, {0, 1}, 2), 1) ==
        doctest::Approx(1.0));

  CHECK_THROWS_AS(single_cycle_defect(two, identity_field(two), IndexCycle(2, {0, 1}, 2), 2),
                  InvalidInputError);
}

TEST_CASE("check_joint examples") {
  const DiscreteDomain grid(1, {-1.0, 0.0, 0.5, 1.0});
  // u = gradient of |x|^2 / 2 = identity, as (u, 0).
  const FieldTuple fields = embed_single(grid, identity_field(grid), 3);
  CHECK(check_joint(grid, fields).pass);

  const DiscreteDomain tri = triangle();
  const FieldTuple rot = embed_single(tri, rotation_field(tri), 3);
  const CheckOutcome outcome = check_joint(tri, rot);
  REQUIRE_FALSE(outcome.pass);
  REQUIRE(outcome.witness.has_value());
  CHECK(outcome.witness->defect == doctest::Approx(-1.0));
  CHECK(outcome.witness->kind == CycleKind::Joint);
  // Lexicographically first among the minimal tuples.
  CHECK(outcome.witness->cycle.indices == std::vector<Index>{0, 1, 2});
  // Recomputing from the stored cycle reproduces the defect exactly.
  CHECK(cycle_defect(tri, rot, outcome.witness->cycle) == outcome.witness->defect);
}

TEST_CASE("check_joint cap errors") {
  const DiscreteDomain grid(1, {0.0, 1.0, 2.0});
  const FieldTuple fields = FieldTuple::zeros(4, 3, 1);
  CheckOptions options;
  options.tuple_cap = 10;
  CHECK_THROWS_AS(check_joint(grid, fields, options), CapExceededError);
}

TEST_CASE("check_single examples and method agreement") {
  const DiscreteDomain tri = triangle();
  const std::vector<double> rot = rotation_field(tri);
  CHECK(check_single(tri, rot, 2, SingleMethod::Enumerate).pass);
  CHECK(check_single(tri, rot, 2, SingleMethod::NegativeCycle).pass);

  for (const SingleMethod method : {SingleMethod::Enumerate, SingleMethod::NegativeCycle}) {
    const CheckOutcome outcome = check_single(tri, rot, 3, method);
    REQUIRE_FALSE(outcome.pass);
    REQUIRE(outcome.witness.has_value());
    CHECK(outcome.witness->defect == doctest::Approx(-1.0));
    CHECK(single_cycle_defect(tri, rot, outcome.witness->cycle, 1) == outcome.witness->defect);
  }

  // Gradient selections stay monotone at every order.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const io::ProblemInput input =
        cli::generate_example({"gradient", 4, 1, 2, seed});
    for (int order = 2; order <= 5; ++order) {
      CHECK(check_single(input.domain, input.fields.field(0), order, SingleMethod::Enumerate)
                .pass);
      CHECK(check_single(input.domain, input.fields.field(0), order,
                         SingleMethod::NegativeCycle)
                .pass);
    }
  }
}

TEST_CASE("check_step examples") {
  // 2-monotone u, N=4, l=2 passes.
  const io::ProblemInput gradient = cli::generate_example({"gradient", 4, 2, 2, 7});
  CHECK(check_step(gradient.domain, gradient.fields.field(0), 4, 2).pass);

  const DiscreteDomain tri = triangle();
  const CheckOutcome outcome = check_step(tri, rotation_field(tri), 3, 1);
  REQUIRE_FALSE(outcome.pass);
  CHECK(outcome.witness->defect == doctest::Approx(-1.0));
  CHECK(outcome.witness->kind == CycleKind::Single);  // step 1 is the single check

  const std::vector<double> zero(static_cast<std::size_t>(tri.size()) * 2, 0.0);
  for (int order = 2; order <= 4; ++order)
    for (int step = 1; step < order; ++step) CHECK(check_step(tri, zero, order, step).pass);
}

TEST_CASE("check_all_orders examples") {
  const DiscreteDomain grid(1, {-1.0, 0.2, 0.9, 2.0});
  CHECK(check_all_orders(grid, identity_field(grid)).pass);

  const DiscreteDomain tri = triangle();
  const CheckOutcome rot = check_all_orders(tri, rotation_field(tri));
  REQUIRE_FALSE(rot.pass);
  REQUIRE(rot.witness.has_value());
  CHECK(rot.witness->defect <= -1.0 + 1e-12);

  const DiscreteDomain two(1, {0.0, 1.0});
  const std::vector<double> neg{0.0, -1.0};  // u(x) = -x
  const CheckOutcome outcome = check_all_orders(two, neg);
  REQUIRE_FALSE(outcome.pass);
  REQUIRE(outcome.witness.has_value());
  CHECK(outcome.witness->cycle.indices == std::vector<Index>{0, 1});
  CHECK(outcome.witness->defect == doctest::Approx(-1.0));
}

TEST_CASE("property: (u,0,...,0) joint iff single at order N") {
  Rng rng(SeedSequence(31).stream("joint-vs-single"));
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 2 + rng.uniform_int(0, 2);
    const int d = 1 + static_cast<int>(rng.uniform_int(0, 1));
    const int order = 2 + static_cast<int>(rng.uniform_int(0, 2));
    const io::ProblemInput base = cli::generate_example(
        {trial % 2 == 0 ? "random" : "gradient", m, d, 2, 1000 + static_cast<std::uint64_t>(trial)});
    const std::span<const double> u = base.fields.field(0);
    const FieldTuple embedded = embed_single(base.domain, u, order);
    const CheckOutcome joint = check_joint(base.domain, embedded);
    const CheckOutcome single = check_single(base.domain, u, order, SingleMethod::Enumerate);
    CHECK(joint.pass == single.pass);
    CHECK(joint.min_defect == single.min_defect);  // zero fields add exact zeros
  }
}

TEST_CASE("property: (u,...,u) joint iff 2-monotone") {
  Rng rng(SeedSequence(33).stream("repeated-vs-pair"));
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 2 + rng.uniform_int(0, 2);
    const int order = 3 + static_cast<int>(rng.uniform_int(0, 1));
    const io::ProblemInput base = cli::generate_example(
        {trial % 2 == 0 ? "random" : "gradient", m, 1, 2, 2000 + static_cast<std::uint64_t>(trial)});
    const std::span<const double> u = base.fields.field(0);
    const FieldTuple repeated = embed_repeated(base.domain, u, order);
    const CheckOutcome joint = check_joint(base.domain, repeated);
    const CheckOutcome pair = check_single(base.domain, u, 2, SingleMethod::Enumerate);
    CHECK(joint.pass == pair.pass);
  }
}

TEST_CASE("property: triplet with 2-monotone middle is jointly 4-monotone") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const io::ProblemInput input = cli::generate_example({"triplet4", 4, 2, 4, seed});
    CHECK(check_joint(input.domain, input.fields).pass);
  }
}

TEST_CASE("property: enumerate and negative-cycle agree on random fields") {
  Rng rng(SeedSequence(35).stream("method-agreement"));
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 2 + rng.uniform_int(0, 3);
    const int order = 2 + static_cast<int>(rng.uniform_int(0, 2));
    const io::ProblemInput base = cli::generate_example(
        {"random", m, 1 + static_cast<int>(rng.uniform_int(0, 1)), 2,
         3000 + static_cast<std::uint64_t>(trial)});
    const std::span<const double> u = base.fields.field(0);
    const CheckOutcome a = check_single(base.domain, u, order, SingleMethod::Enumerate);
    const CheckOutcome b = check_single(base.domain, u, order, SingleMethod::NegativeCycle);
    CHECK(a.pass == b.pass);
    if (!a.pass && !b.pass) {
      // Both witnesses must certify: defects below tolerance, reproducible.
      CHECK(single_cycle_defect(base.domain, u, a.witness->cycle, 1) == a.witness->defect);
      CHECK(single_cycle_defect(base.domain, u, b.witness->cycle, 1) == b.witness->defect);
    }
  }
}

TEST_CASE("property: defect equals the rotation sum of first-vertex costs") {
  Rng rng(SeedSequence(37).stream("defect-symmetrization"));
  const io::ProblemInput base = cli::generate_example({"random_monotone", 4, 2, 3, 99});
  const int order = base.fields.order();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Index> indices(static_cast<std::size_t>(order));
    for (Index& v : indices) v = rng.uniform_int(0, base.domain.size() - 1);
    const IndexCycle cycle(order, indices, base.domain.size());
    const double defect = cycle_defect(base.domain, base.fields, cycle);
    double rotated = 0.0;
    for (int k = 0; k < order; ++k) {
      // First-vertex cost of the k-th rotation.
      double f = 0.0;
      const Index x1 = cycle.at(k);
      for (int l = 1; l < order; ++l)
        f += core::dot_diff(base.fields.value(l - 1, x1), base.domain.point(x1),
                            base.domain.point(cycle.at(k + l)));
      rotated += f;
    }
    CHECK(defect == doctest::Approx(rotated).epsilon(1e-12));
  }
}

TEST_CASE("witnesses are deterministic across runs and policies") {
  const io::ProblemInput base = cli::generate_example({"random", 4, 2, 3, 4242});
  CheckOptions serial;
  serial.policy = core::ExecPolicy::Serial;
  const CheckOutcome a = check_joint(base.domain, base.fields);
  const CheckOutcome b = check_joint(base.domain, base.fields, serial);
  REQUIRE(a.pass == b.pass);
  CHECK(a.min_defect == b.min_defect);
  if (!a.pass) {
    CHECK(a.witness->cycle.indices == b.witness->cycle.indices);
    CHECK(a.witness->defect == b.witness->defect);
  }
}
