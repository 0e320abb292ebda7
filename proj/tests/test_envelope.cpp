#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cymono/cli/pipeline.hpp"
#include "cymono/envelope/envelope.hpp"
#include "cymono/hamiltonian/hamiltonian.hpp"
#include "cymono/rng.hpp"

using namespace cymono;
using namespace cymono::envelope;
using core::DiscreteDomain;
using core::FieldTuple;
using core::GridHamiltonian;
using core::Index;
using core::Rank;

TEST_CASE("one-dimensional hand envelopes") {
  const std::vector<double> points{0.0, 1.0, 2.0};

  SUBCASE("midpoint of two zeros") {
    const std::vector<double> values{0.0, 2.0, 0.0};
    const std::vector<double> query{1.0};
    const EnvelopeResult r = lower_convex_envelope(points, 1, values, query);
    CHECK(r.value == doctest::Approx(0.0));
    REQUIRE(r.coefficients.size() == 3);
    CHECK(r.coefficients[0] == doctest::Approx(0.5));
    CHECK(r.coefficients[1] == doctest::Approx(0.0));
    CHECK(r.coefficients[2] == doctest::Approx(0.5));
  }

  SUBCASE("already convex data is unchanged") {
    const std::vector<double> values{0.0, 1.0, 4.0};
    const std::vector<double> query{1.0};
    CHECK(lower_convex_envelope(points, 1, values, query).value == doctest::Approx(1.0));
  }

  SUBCASE("query outside the hull is infeasible") {
    const std::vector<double> values{0.0, 1.0, 4.0};
    const std::vector<double> query{3.0};
    CHECK_THROWS_AS(lower_convex_envelope(points, 1, values, query), InfeasibleError);
  }
}

TEST_CASE("envelope result invariants") {
  Rng rng(SeedSequence(5).stream("envelope-invariants"));
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_int(0, 1));
    const Index n = 4 + rng.uniform_int(0, 4);
    std::vector<double> points(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    for (double& c : points) c = rng.uniform(-1.0, 1.0);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = rng.uniform(-1.0, 1.0);
    // Query a sample point so feasibility is guaranteed.
    const Index q = rng.uniform_int(0, n - 1);
    const std::vector<double> query(points.begin() + q * d, points.begin() + (q + 1) * d);

    const EnvelopeResult r = lower_convex_envelope(points, d, values, query);
    double total = 0.0;
    std::vector<double> combo(static_cast<std::size_t>(d), 0.0);
    for (std::size_t k = 0; k < r.coefficients.size(); ++k) {
      const double lambda = r.coefficients[k];
      CHECK(lambda >= -1e-12);
      total += lambda;
      for (int c = 0; c < d; ++c)
        combo[static_cast<std::size_t>(c)] += lambda * points[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (int c = 0; c < d; ++c)
      CHECK(std::abs(combo[static_cast<std::size_t>(c)] - query[static_cast<std::size_t>(c)]) <= 1e-10);
    CHECK(r.value <= values[static_cast<std::size_t>(q)] + 1e-10);
    for (const Index s : r.support) CHECK(r.coefficients[static_cast<std::size_t>(s)] > 0.0);
  }
}

namespace {

GridHamiltonian random_tensor(const DiscreteDomain& domain, int order, Rng& rng) {
  const Rank size = core::checked_tensor_size(domain.size(), order);
  std::vector<double> values(static_cast<std::size_t>(size));
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  return GridHamiltonian(order, domain.size(), std::move(values));
}

double sup_diff(const GridHamiltonian& a, const GridHamiltonian& b) {
  double worst = 0.0;
  for (Rank r = 0; r < a.size(); ++r) worst = std::max(worst, std::abs(a[r] - b[r]));
  return worst;
}

}  // namespace

TEST_CASE("functions linear in the first variable are their own envelope") {
  // f(x1, x2) = <c, x1> + g(x2) is linear in x1.
  const io::ProblemInput base = cli::generate_example({"random", 5, 2, 2, 21});
  const DiscreteDomain& domain = base.domain;
  Rng rng(SeedSequence(23).stream("linear-first"));
  std::vector<double> g(static_cast<std::size_t>(domain.size()));
  for (double& v : g) v = rng.uniform(-1.0, 1.0);
  const std::vector<double> c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  std::vector<double> values;
  for (Index i = 0; i < domain.size(); ++i)
    for (Index j = 0; j < domain.size(); ++j)
      values.push_back(core::dot(c, domain.point(i)) + g[static_cast<std::size_t>(j)]);
  const GridHamiltonian h(2, domain.size(), std::move(values));
  const GridHamiltonian env = convexify_block(domain, h, Block::First, EnvelopeSign::Convexify);
  CHECK(sup_diff(env, h) <= 1e-10);
}

TEST_CASE("idempotence of blockwise envelopes") {
  Rng rng(SeedSequence(29).stream("idempotence"));
  const io::ProblemInput base = cli::generate_example({"random", 4, 2, 3, 31});
  const DiscreteDomain& domain = base.domain;
  for (const Block block : {Block::First, Block::Tail}) {
    const GridHamiltonian h = random_tensor(domain, 3, rng);
    const GridHamiltonian once = convexify_block(domain, h, block, EnvelopeSign::Convexify);
    const GridHamiltonian twice = convexify_block(domain, once, block, EnvelopeSign::Convexify);
    CHECK(sup_diff(once, twice) <= 1e-10);
    // The envelope never exceeds the function.
    for (Rank r = 0; r < h.size(); ++r) CHECK(once[r] <= h[r] + 1e-10);
  }
}

TEST_CASE("concavify is the negated envelope of the negation") {
  Rng rng(SeedSequence(41).stream("concavify"));
  const io::ProblemInput base = cli::generate_example({"random", 4, 1, 2, 43});
  const GridHamiltonian h = random_tensor(base.domain, 2, rng);
  const GridHamiltonian conc = convexify_block(base.domain, h, Block::First,
                                               EnvelopeSign::Concavify);
  std::vector<double> negated(h.values().begin(), h.values().end());
  for (double& v : negated) v = -v;
  const GridHamiltonian env =
      convexify_block(base.domain, GridHamiltonian(2, base.domain.size(), std::move(negated)),
                      Block::First, EnvelopeSign::Convexify);
  for (Rank r = 0; r < h.size(); ++r) {
    CHECK(conc[r] == doctest::Approx(-env[r]).epsilon(1e-12));
    CHECK(conc[r] >= h[r] - 1e-10);  // concave envelope dominates
  }
}

TEST_CASE("envelope operator is monotone") {
  Rng rng(SeedSequence(47).stream("monotone-operator"));
  const io::ProblemInput base = cli::generate_example({"random", 4, 1, 2, 53});
  const GridHamiltonian h1 = random_tensor(base.domain, 2, rng);
  std::vector<double> bumped(h1.values().begin(), h1.values().end());
  for (double& v : bumped) v += 0.25;
  const GridHamiltonian h2(2, base.domain.size(), std::move(bumped));
  const GridHamiltonian e1 = convexify_block(base.domain, h1, Block::First,
                                             EnvelopeSign::Convexify);
  const GridHamiltonian e2 = convexify_block(base.domain, h2, Block::First,
                                             EnvelopeSign::Convexify);
  for (Rank r = 0; r < e1.size(); ++r) CHECK(e1[r] <= e2[r] + 1e-10);
}

TEST_CASE("first-variable envelope matches per-query LP oracle") {
  // f(x, y) = <u(x), x - y> with u = identity on {0, 1, 2}.
  const DiscreteDomain domain(1, {0.0, 1.0, 2.0});
  std::vector<double> values;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      values.push_back(domain.point(i)[0] * (domain.point(i)[0] - domain.point(j)[0]));
  const GridHamiltonian f(2, 3, values);
  const GridHamiltonian ftilde = convexify_block(domain, f, Block::First,
                                                 EnvelopeSign::Convexify);
  for (Index j = 0; j < 3; ++j) {
    std::vector<double> column{values[static_cast<std::size_t>(0 * 3 + j)],
                               values[static_cast<std::size_t>(1 * 3 + j)],
                               values[static_cast<std::size_t>(2 * 3 + j)]};
    for (Index q = 0; q < 3; ++q) {
      const EnvelopeResult direct =
          lower_convex_envelope(domain.points_flat(), 1, column, domain.point(q));
      CHECK(ftilde[q * 3 + j] == doctest::Approx(direct.value).epsilon(1e-12));
    }
  }
  // Hand value at x = 1 for the tail y = 0: envelope of x(x - y) in x.
  // Data points: (0, 0), (1, 1), (2, 4): convex, so the value is 1.
  CHECK(ftilde[1 * 3 + 0] == doctest::Approx(1.0));
}

TEST_CASE("lemma properties of the first-variable envelope on monotone fields") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const io::ProblemInput input = cli::generate_example({"random_monotone", 3, 2, 3, seed});
    const GridHamiltonian f = hamiltonian::build_cost_f(input.domain, input.fields);
    const GridHamiltonian ftilde = convexify_block(input.domain, f, Block::First,
                                                   EnvelopeSign::Convexify);
    for (Rank r = 0; r < f.size(); ++r) CHECK(ftilde[r] <= f[r] + 1e-10);
    CHECK(core::max_abs_diagonal(ftilde) <= 1e-8);
    double worst = 0.0;
    for (Rank r = 0; r < ftilde.size(); ++r) worst = std::min(worst, ftilde.rotation_sum(r));
    CHECK(worst >= -1e-8);
  }
}

TEST_CASE("serial and parallel envelopes agree exactly") {
  Rng rng(SeedSequence(59).stream("envelope-policy"));
  const io::ProblemInput base = cli::generate_example({"random", 4, 2, 3, 61});
  const GridHamiltonian h = random_tensor(base.domain, 3, rng);
  EnvelopeOptions serial;
  serial.policy = core::ExecPolicy::Serial;
  for (const Block block : {Block::First, Block::Tail}) {
    const GridHamiltonian a = convexify_block(base.domain, h, block, EnvelopeSign::Convexify);
    const GridHamiltonian b =
        convexify_block(base.domain, h, block, EnvelopeSign::Convexify, serial);
    for (Rank r = 0; r < a.size(); ++r) CHECK(a[r] == b[r]);
  }
}

TEST_CASE("tensor cap propagates") {
  const io::ProblemInput base = cli::generate_example({"random", 4, 1, 3, 67});
  Rng rng(SeedSequence(71).stream("cap"));
  const GridHamiltonian h = random_tensor(base.domain, 3, rng);
  EnvelopeOptions options;
  options.tensor_cap = 10;
  CHECK_THROWS_AS(
      convexify_block(base.domain, h, Block::First, EnvelopeSign::Convexify, options),
      CapExceededError);
}
