#include "cymono/cli/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "cymono/hamiltonian/hamiltonian.hpp"
#include "cymono/rng.hpp"
#include "cymono/transport/transport.hpp"
#include "cymono/version.hpp"

namespace cymono::cli {

namespace {

using core::DiscreteDomain;
using core::FieldTuple;
using core::Index;

std::vector<double> random_points(Index m, int d, Rng& rng) {
  std::vector<double> points(static_cast<std::size_t>(m) * static_cast<std::size_t>(d));
  for (double& c : points) c = rng.uniform(-1.0, 1.0);
  return points;
}

// Subgradient selection of a random convex piecewise-linear function:
// u(x) = a_{argmax_j <a_j, x> + b_j}, ties to the smallest j.
struct PiecewiseGradient {
  std::vector<double> slopes;   // J x d
  std::vector<double> offsets;  // J
  int d;

  static PiecewiseGradient make(int d, Rng& rng) {
    PiecewiseGradient g;
    g.d = d;
    const int pieces = d + 3;
    g.slopes.resize(static_cast<std::size_t>(pieces * d));
    g.offsets.resize(static_cast<std::size_t>(pieces));
    for (double& s : g.slopes) s = rng.uniform(-1.0, 1.0);
    for (double& b : g.offsets) b = rng.uniform(-0.5, 0.5);
    return g;
  }

  void value_at(std::span<const double> x, std::span<double> out) const {
    const int pieces = static_cast<int>(offsets.size());
    int best = 0;
    double best_value = 0.0;
    for (int j = 0; j < pieces; ++j) {
      double v = offsets[static_cast<std::size_t>(j)];
      for (int c = 0; c < d; ++c)
        v += slopes[static_cast<std::size_t>(j * d + c)] * x[static_cast<std::size_t>(c)];
      if (j == 0 || v > best_value) {
        best_value = v;
        best = j;
      }
    }
    for (int c = 0; c < d; ++c)
      out[static_cast<std::size_t>(c)] = slopes[static_cast<std::size_t>(best * d + c)];
  }
};

void fill_gradient_field(const std::vector<double>& points, Index m, int d, Rng& rng,
                         std::span<double> out) {
  const PiecewiseGradient g = PiecewiseGradient::make(d, rng);
  for (Index i = 0; i < m; ++i) {
    const std::span<const double> x{points.data() + i * d, static_cast<std::size_t>(d)};
    g.value_at(x, out.subspan(static_cast<std::size_t>(i * d), static_cast<std::size_t>(d)));
  }
}

double min_pair_distance(const std::vector<double>& points, Index m, int d) {
  double best = -1.0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = points[static_cast<std::size_t>(i * d + c)] -
                            points[static_cast<std::size_t>(j * d + c)];
        s += diff * diff;
      }
      s = std::sqrt(s);
      if (best < 0.0 || s < best) best = s;
    }
  }
  return best;
}

}  // namespace

ProblemInput generate_example(const GenParams& params) {
  const Index m = params.m;
  const int d = params.dimension;
  const int order = params.order;
  if (m < 1 || d < 1 || order < 2) throw InvalidInputError("gen requires m >= 1, d >= 1, N >= 2");
  const SeedSequence seeds(params.seed);
  Rng rng(seeds.stream("gen-" + params.kind));

  if (params.kind == "rotation") {
    if (d != 2) throw InvalidInputError("rotation examples require d = 2");
    if (m < 3) throw InvalidInputError("rotation examples require m >= 3");
    std::vector<double> points{0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
    for (Index i = 3; i < m; ++i) {
      points.push_back(rng.uniform(-1.0, 1.0));
      points.push_back(rng.uniform(-1.0, 1.0));
    }
    DiscreteDomain domain(d, std::move(points));
    std::vector<double> values(static_cast<std::size_t>((order - 1) * m * d), 0.0);
    for (Index i = 0; i < m; ++i) {
      const std::span<const double> x = domain.point(i);
      values[static_cast<std::size_t>(i * d)] = -x[1];
      values[static_cast<std::size_t>(i * d + 1)] = x[0];
    }
    return ProblemInput{std::move(domain), FieldTuple(order, m, d, std::move(values))};
  }

  std::vector<double> points = random_points(m, d, rng);
  // Exact collisions are rejected by the domain constructor; retry a few
  // times on the (practically impossible) duplicate draw.
  for (int attempt = 0; attempt < 16; ++attempt) {
    try {
      DiscreteDomain probe(d, points);
      break;
    } catch (const InvalidInputError&) {
      points = random_points(m, d, rng);
    }
  }
  DiscreteDomain domain(d, points);

  std::vector<double> values(static_cast<std::size_t>((order - 1) * m * d), 0.0);
  const std::size_t field_size = static_cast<std::size_t>(m) * static_cast<std::size_t>(d);

  if (params.kind == "gradient") {
    fill_gradient_field(points, m, d, rng, {values.data(), field_size});
  } else if (params.kind == "random_monotone") {
    for (int l = 0; l < order - 1; ++l)
      fill_gradient_field(points, m, d, rng,
                          {values.data() + static_cast<std::size_t>(l) * field_size, field_size});
  } else if (params.kind == "triplet4") {
    if (order != 4) throw InvalidInputError("triplet4 examples require N = 4");
    // u1 = x + gradient (strongly monotone), u2 = gradient, u3 = u1 - s
    // with |s| below the smallest pair distance.
    std::vector<double> grad1(field_size);
    fill_gradient_field(points, m, d, rng, grad1);
    for (Index i = 0; i < m; ++i)
      for (int c = 0; c < d; ++c)
        values[static_cast<std::size_t>(i * d + c)] =
            points[static_cast<std::size_t>(i * d + c)] + grad1[static_cast<std::size_t>(i * d + c)];
    fill_gradient_field(points, m, d, rng,
                        {values.data() + field_size, field_size});
    std::vector<double> shift(static_cast<std::size_t>(d));
    double norm = 0.0;
    for (double& s : shift) {
      s = rng.uniform(-1.0, 1.0);
      norm += s * s;
    }
    norm = std::sqrt(norm);
    const double scale = norm > 0.0 ? 0.9 * min_pair_distance(points, m, d) / norm : 0.0;
    for (Index i = 0; i < m; ++i)
      for (int c = 0; c < d; ++c)
        values[2 * field_size + static_cast<std::size_t>(i * d + c)] =
            values[static_cast<std::size_t>(i * d + c)] - scale * shift[static_cast<std::size_t>(c)];
  } else if (params.kind == "random") {
    for (double& v : values) v = rng.uniform(-1.0, 1.0);
  } else {
    throw InvalidInputError("unknown example kind: " + params.kind);
  }

  FieldTuple fields(order, m, d, std::move(values));

  if (params.kind == "triplet4") {
    // Generation-time exhaustive checks: the pair condition and joint
    // 4-monotonicity.
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) {
          const double diff = domain.point(a)[static_cast<std::size_t>(c)] -
                              domain.point(b)[static_cast<std::size_t>(c)];
          s += (fields.value(0, a)[static_cast<std::size_t>(c)] -
                fields.value(2, b)[static_cast<std::size_t>(c)]) *
               diff;
        }
        if (s < -1e-12) throw Error("triplet4 pair condition failed at generation");
      }
    }
    if (!monotonicity::check_joint(domain, fields, {}).pass)
      throw Error("triplet4 joint check failed at generation");
  }

  return ProblemInput{std::move(domain), std::move(fields)};
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(json& timing) : timing_(timing) {}
  template <typename Fn>
  auto run(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish(name, start);
    } else {
      auto out = fn();
      finish(name, start);
      return out;
    }
  }

 private:
  void finish(const std::string& name, std::chrono::steady_clock::time_point start) {
    const auto stop = std::chrono::steady_clock::now();
    timing_[name] =
        std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count() / 1000.0;
  }
  json& timing_;
};

}  // namespace

PipelineResult run_pipeline(const ProblemInput& input, const PipelineOptions& options,
                            const std::string& command_echo, const std::string& input_digest) {
  const DiscreteDomain& domain = input.domain;
  const FieldTuple& fields = input.fields;
  const int order = fields.order();

  json report;
  report["tool"] = "cymono";
  report["version"] = kVersion;
  report["command"] = command_echo;
  report["input_digest"] = input_digest;
  report["order"] = order;
  report["m"] = domain.size();
  report["dimension"] = domain.dimension();
  report["seed"] = options.seed;
  report["seed_scheme"] = "stream = splitmix64(seed xor fnv1a64(name))";
  report["checks"] = json::array();
  json timing = json::object();
  StageTimer timer(timing);

  auto add_check = [&report](json entry) { report["checks"].push_back(std::move(entry)); };
  bool all_pass = true;

  const monotonicity::CheckOptions check_options{options.tolerance, options.tensor_cap,
                                                 options.policy};
  const monotonicity::CheckOutcome joint = timer.run("check_joint", [&] {
    return monotonicity::check_joint(domain, fields, check_options);
  });
  {
    json entry{{"name", "joint monotonicity"},
               {"operation", "monotonicity.check_joint"},
               {"pass", joint.pass},
               {"min_defect", joint.min_defect}};
    if (joint.witness) entry["witness"] = io::witness_to_json(*joint.witness);
    add_check(std::move(entry));
  }
  if (!joint.pass) {
    report["timing_ms"] = std::move(timing);
    report["result"] = "fail";
    return PipelineResult{std::move(report), kExitMathFailure};
  }

  const hamiltonian::BuildOptions build_options{options.tensor_cap, options.policy, {}};

  const hamiltonian::PsiResult psi = timer.run("build_psi", [&] {
    return hamiltonian::build_psi(domain, fields, options.build_tol, build_options);
  });
  add_check(json{{"name", "psi properties"},
                 {"operation", "hamiltonian.build_psi"},
                 {"pass", psi.report.properties_hold},
                 {"convex_first_idempotence", psi.report.convex_first_idempotence},
                 {"concave_tail_idempotence", psi.report.concave_tail_idempotence},
                 {"min_psi_plus_f", psi.report.min_psi_plus_f},
                 {"max_rotation_sum", psi.report.max_rotation_sum},
                 {"max_abs_diagonal", psi.report.max_abs_diagonal}});
  all_pass = all_pass && psi.report.properties_hold;

  hamiltonian::MaximalResult maximal = timer.run("build_maximal_H", [&] {
    return hamiltonian::build_maximal_H(domain, fields, options.build_tol, options.max_iter,
                                        build_options);
  });
  {
    double worst_dual = 0.0;
    for (const double v : maximal.report.dualrep_residuals) worst_dual = std::max(worst_dual, v);
    double worst_sub = 0.0;
    for (const double v : maximal.report.subgradient_residuals) worst_sub = std::min(worst_sub, v);
    add_check(json{{"name", "fixed-point representation"},
                   {"operation", "hamiltonian.build_maximal_H"},
                   {"pass", maximal.report.pass},
                   {"iterations", maximal.report.iterations},
                   {"fixed_point_residual", maximal.report.fixed_point_residual},
                   {"max_rotation_sum", maximal.report.max_rotation_sum},
                   {"lower_bound_margin", maximal.report.lower_bound_margin},
                   {"upper_bound_margin", maximal.report.upper_bound_margin},
                   {"min_subgradient_margin", worst_sub},
                   {"max_dualrep_residual", worst_dual}});
    all_pass = all_pass && maximal.report.pass;
  }

  const core::GridHamiltonian bar = timer.run("antisymmetrize", [&] {
    return hamiltonian::antisymmetrize(maximal.h, build_options);
  });
  {
    const double residual = core::max_abs_rotation_sum(bar, options.policy);
    const bool pass = residual <= 1e-12;
    add_check(json{{"name", "antisymmetrization"},
                   {"operation", "hamiltonian.antisymmetrize"},
                   {"pass", pass},
                   {"max_abs_rotation_sum", residual}});
    all_pass = all_pass && pass;
  }

  const hamiltonian::RepresentationReport dual = timer.run("verify_dualrep", [&] {
    return hamiltonian::verify_dualrep(domain, fields, maximal.h, &bar, options.tolerance,
                                       options.policy);
  });
  {
    double worst = 0.0;
    for (const double v : dual.dualrep_residuals) worst = std::max(worst, v);
    add_check(json{{"name", "dual representation"},
                   {"operation", "hamiltonian.verify_dualrep"},
                   {"pass", dual.pass},
                   {"max_dualrep_residual", worst},
                   {"barh_le_residual", dual.barh_le_residual},
                   {"barh_lower_margin", dual.barh_lower_margin}});
    all_pass = all_pass && dual.pass;
  }

  const transport::TransportOptions transport_options{options.tensor_cap, options.policy, {}};
  const transport::TransportResult lp = timer.run("transport_lp", [&] {
    return transport::solve_sigma_kantorovich(domain, fields, transport_options);
  });
  {
    const core::GridHamiltonian cost =
        hamiltonian::build_cost_f(domain, fields, build_options);
    const double recomputed = lp.coupling.pair_with(cost, options.policy);
    const bool pass = lp.value >= -options.tolerance && lp.value <= 1e-12 &&
                      std::abs(recomputed - lp.value) <= 1e-9;
    add_check(json{{"name", "sigma-invariant transport"},
                   {"operation", "transport.solve_sigma_kantorovich"},
                   {"pass", pass},
                   {"optimal_value", lp.value},
                   {"recomputed_value", recomputed},
                   {"orbits", lp.orbit_count}});
    all_pass = all_pass && pass;
  }

  json involution_entry;
  bool involution_identity_optimal = false;
  core::NInvolution best_s = core::NInvolution::identity(order, domain.size());
  if (domain.uniform_weights()) {
    const transport::InvolutionOptions inv_options{options.factorial_cap, options.restarts,
                                                   options.seed, options.policy};
    const transport::InvolutionMethod method = domain.size() <= options.factorial_cap
                                                   ? transport::InvolutionMethod::Exact
                                                   : transport::InvolutionMethod::Local;
    const transport::InvolutionResult inv = timer.run("involution_polar", [&] {
      return transport::solve_involution_polar(domain, fields, method, inv_options);
    });
    best_s = inv.s;
    involution_identity_optimal = inv.value >= -options.tolerance;
    json perm = json::array();
    for (const core::Index v : inv.s.perm()) perm.push_back(v);
    involution_entry = json{{"name", "involution polar"},
                            {"operation", "transport.solve_involution_polar"},
                            {"pass", involution_identity_optimal},
                            {"optimal_value", inv.value},
                            {"method", inv.method == transport::InvolutionMethod::Exact
                                           ? "exact"
                                           : "local"},
                            {"optimal_s", std::move(perm)}};
    add_check(std::move(involution_entry));
    all_pass = all_pass && involution_identity_optimal;

    const double at_identity = timer.run("projection", [&] {
      return transport::projection_objective(
          domain, fields, core::NInvolution::identity(order, domain.size()));
    });
    const double at_best = transport::projection_objective(domain, fields, best_s);
    const double expand_residual = transport::projection_expand_identity_residual(
        domain, fields, best_s);
    const bool projection_pass = at_identity <= at_best + options.tolerance &&
                                 expand_residual <= 1e-10;
    add_check(json{{"name", "projection at identity"},
                   {"operation", "transport.projection_objective"},
                   {"pass", projection_pass},
                   {"value_at_identity", at_identity},
                   {"value_at_polar_argmin", at_best},
                   {"expand_square_residual", expand_residual}});
    all_pass = all_pass && projection_pass;

    const double gap = timer.run("duality_gap", [&] {
      return transport::duality_gap(domain, fields, bar,
                                    core::NInvolution::identity(order, domain.size()),
                                    options.policy);
    });
    const bool gap_pass = gap >= -options.tolerance && gap <= 1e-7;
    add_check(json{{"name", "duality gap at identity"},
                   {"operation", "transport.duality_gap"},
                   {"pass", gap_pass},
                   {"gap", gap}});
    all_pass = all_pass && gap_pass;
  } else {
    add_check(json{{"name", "involution polar"},
                   {"operation", "transport.solve_involution_polar"},
                   {"pass", true},
                   {"skipped", "non-uniform weights"}});
  }

  report["timing_ms"] = std::move(timing);
  report["result"] = all_pass ? "pass" : "fail";
  return PipelineResult{std::move(report), all_pass ? kExitPass : kExitMathFailure};
}

}  // namespace cymono::cli
