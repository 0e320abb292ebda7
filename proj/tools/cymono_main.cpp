#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cymono/cli/pipeline.hpp"
#include "cymono/hamiltonian/hamiltonian.hpp"
#include "cymono/rng.hpp"
#include "cymono/transport/transport.hpp"
#include "cymono/version.hpp"

namespace {

using namespace cymono;
using cli::kExitMathFailure;
using cli::kExitPass;
using cli::kExitUsage;

core::Rank tensor_cap_from_env() {
  const char* raw = std::getenv("CYMONO_TENSOR_CAP");
  if (raw == nullptr) return core::kDefaultTensorCap;
  try {
    const long long cap = std::stoll(raw);
    if (cap < 1) throw std::invalid_argument("nonpositive");
    return static_cast<core::Rank>(cap);
  } catch (const std::exception&) {
    throw InvalidInputError("CYMONO_TENSOR_CAP must be a positive integer");
  }
}

std::string command_echo(int argc, char** argv) {
  std::string echo;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) echo += ' ';
    echo += argv[i];
  }
  return echo;
}

struct CheckArgs {
  std::string input;
  std::string mode = "joint";
  int order = 0;
  int step = 1;
  int field_index = 0;
  double tolerance = 1e-9;
  std::string method = "enum";
  std::string report_path;
};

int run_check(const CheckArgs& args, core::Rank cap, core::ExecPolicy policy) {
  const io::ProblemInput input = io::load_problem(args.input);
  const int order = args.order > 0 ? args.order : input.fields.order();
  monotonicity::CheckOptions options{args.tolerance, cap, policy};

  monotonicity::CheckOutcome outcome{true, std::nullopt, 0.0};
  if (args.mode == "joint") {
    if (order != input.fields.order())
      throw InvalidInputError("joint checks use the input's own order");
    outcome = monotonicity::check_joint(input.domain, input.fields, options);
  } else {
    if (args.field_index < 0 || args.field_index >= input.fields.field_count())
      throw InvalidInputError("field index out of range");
    const std::span<const double> field = input.fields.field(args.field_index);
    if (args.mode == "single") {
      const monotonicity::SingleMethod method = args.method == "bellman"
                                                    ? monotonicity::SingleMethod::NegativeCycle
                                                    : monotonicity::SingleMethod::Enumerate;
      outcome = monotonicity::check_single(input.domain, field, order, method, options);
    } else if (args.mode == "step") {
      outcome = monotonicity::check_step(input.domain, field, order, args.step, options);
    } else if (args.mode == "all") {
      outcome = monotonicity::check_all_orders(input.domain, field, options);
    } else {
      throw InvalidInputError("unknown check mode: " + args.mode);
    }
  }

  io::json result{{"mode", args.mode}, {"pass", outcome.pass}, {"min_defect", outcome.min_defect}};
  if (outcome.witness) result["witness"] = io::witness_to_json(*outcome.witness);
  std::cout << result.dump(2) << "\n";
  if (!args.report_path.empty()) io::write_file(args.report_path, result.dump(2) + "\n");
  return outcome.pass ? kExitPass : kExitMathFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monotonicity certification and antisymmetric Hamiltonian representations "
               "on finite point clouds"};
  app.set_version_flag("--version", std::string("cymono ") + kVersion);
  bool serial = false;
  app.add_flag("--serial", serial, "run kernels on the serial reference path");

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("check", "cycle-monotonicity checks");
  check->add_option("--input", check_args.input, "domain + fields file (.json or .csv)")
      ->required();
  check->add_option("--mode", check_args.mode, "joint|single|step|all");
  check->add_option("--order", check_args.order, "cycle order N (defaults to the input's)");
  check->add_option("--step", check_args.step, "step l for mode=step");
  check->add_option("--field-index", check_args.field_index, "field for single/step/all");
  check->add_option("--tolerance", check_args.tolerance, "defect tolerance");
  check->add_option("--method", check_args.method, "enum|bellman (mode=single)");
  check->add_option("--report", check_args.report_path, "write the result JSON here");

  CLI::App* ham = app.add_subcommand("hamiltonian", "Hamiltonian builders and verification");
  ham->require_subcommand(1);

  std::string hb_input, hb_emit;
  double hb_tol = 1e-9;
  int hb_max_iter = 200;
  bool hb_two_var = false;
  int hb_order = 0;
  CLI::App* hbuild = ham->add_subcommand("build", "build the fixed-point Hamiltonian");
  hbuild->add_option("--input", hb_input, "domain + fields file")->required();
  hbuild->add_option("--tol", hb_tol, "fixed-point tolerance");
  hbuild->add_option("--max-iter", hb_max_iter, "iteration budget");
  hbuild->add_option("--emit", hb_emit, "write the tensor JSON here");
  hbuild->add_flag("--two-var", hb_two_var, "build the two-variable F instead");
  hbuild->add_option("--order", hb_order, "cycle order for --two-var");

  std::string hv_h, hv_fields;
  double hv_tol = 1e-8;
  CLI::App* hverify = ham->add_subcommand("verify", "verify a built Hamiltonian");
  hverify->add_option("--hamiltonian", hv_h, "tensor JSON")->required();
  hverify->add_option("--fields", hv_fields, "domain + fields file")->required();
  hverify->add_option("--tol", hv_tol, "verification tolerance");

  std::string lf_input, lf_emit, lf_variant = "printed";
  int lf_order = 3;
  CLI::App* hlift = ham->add_subcommand("lift-f", "lift a two-variable F to N variables");
  hlift->add_option("--input", lf_input, "order-2 tensor JSON")->required();
  hlift->add_option("--order", lf_order, "target order N");
  hlift->add_option("--variant", lf_variant, "printed|corrected");
  hlift->add_option("--emit", lf_emit, "write the lifted tensor here");

  CLI::App* transport_cmd = app.add_subcommand("transport", "sigma-invariant transport");
  transport_cmd->require_subcommand(1);
  std::string ts_input, ts_emit;
  CLI::App* tsolve = transport_cmd->add_subcommand("solve", "solve the orbit-aggregated LP");
  tsolve->add_option("--input", ts_input, "domain + fields file")->required();
  tsolve->add_option("--emit", ts_emit, "write the optimal coupling here");

  CLI::App* involution_cmd = app.add_subcommand("involution", "N-involution polar problems");
  involution_cmd->require_subcommand(1);
  std::string iv_input, iv_emit, iv_method = "exact";
  int iv_restarts = 20;
  std::uint64_t iv_seed = 0;
  CLI::App* isolve = involution_cmd->add_subcommand("solve", "minimize the polar pairing");
  isolve->add_option("--input", iv_input, "domain + fields file")->required();
  isolve->add_option("--method", iv_method, "exact|local");
  isolve->add_option("--restarts", iv_restarts, "local-search restarts");
  isolve->add_option("--seed", iv_seed, "local-search seed");
  isolve->add_option("--emit", iv_emit, "write the optimal involution here");

  CLI::App* duality_cmd = app.add_subcommand("duality", "duality between L_H and involutions");
  duality_cmd->require_subcommand(1);
  std::string dv_fields;
  double dv_tol = 1e-7;
  int dv_max_iter = 200;
  CLI::App* dverify = duality_cmd->add_subcommand("verify", "full pipeline duality gap");
  dverify->add_option("--fields", dv_fields, "domain + fields file")->required();
  dverify->add_option("--tol", dv_tol, "gap tolerance");
  dverify->add_option("--max-iter", dv_max_iter, "fixed-point iteration budget");

  cli::GenParams gen_params;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "generate example inputs");
  gen->add_option("--kind", gen_params.kind, "gradient|rotation|triplet4|random_monotone|random")
      ->required();
  gen->add_option("--m", gen_params.m, "number of points");
  gen->add_option("--d", gen_params.dimension, "dimension");
  gen->add_option("--order", gen_params.order, "cycle order N");
  gen->add_option("--seed", gen_params.seed, "seed");
  gen->add_option("--out", gen_out, "output file")->required();

  std::string pl_input, pl_report;
  cli::PipelineOptions pl_options;
  CLI::App* pipeline = app.add_subcommand("pipeline", "run every stage and emit a report");
  pipeline->add_option("--input", pl_input, "domain + fields file")->required();
  pipeline->add_option("--report", pl_report, "write the run report here");
  pipeline->add_option("--seed", pl_options.seed, "seed for randomized components");
  pipeline->add_option("--tol", pl_options.tolerance, "verification tolerance");
  pipeline->add_option("--build-tol", pl_options.build_tol, "fixed-point tolerance");
  pipeline->add_option("--max-iter", pl_options.max_iter, "fixed-point iteration budget");
  pipeline->add_option("--restarts", pl_options.restarts, "involution local-search restarts");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const core::Rank cap = tensor_cap_from_env();
    const core::ExecPolicy policy =
        serial ? core::ExecPolicy::Serial : core::ExecPolicy::Parallel;
    const hamiltonian::BuildOptions build_options{cap, policy, {}};

    if (*check) return run_check(check_args, cap, policy);

    if (*hbuild) {
      const io::ProblemInput input = io::load_problem(hb_input);
      if (hb_two_var) {
        const int order = hb_order > 0 ? hb_order : input.fields.order();
        const hamiltonian::TwoVarResult result = hamiltonian::build_two_var_F(
            input.domain, input.fields.field(0), order, 1e-8, build_options);
        io::json summary{{"pass", result.report.pass},
                         {"max_abs_diagonal", result.report.max_abs_diagonal},
                         {"max_cycle_sum", result.report.max_cycle_sum},
                         {"lower_sandwich_margin", result.report.lower_sandwich_margin},
                         {"upper_sandwich_margin", result.report.upper_sandwich_margin}};
        std::cout << summary.dump(2) << "\n";
        if (!hb_emit.empty()) io::save_tensor(hb_emit, result.f);
        return result.report.pass ? kExitPass : kExitMathFailure;
      }
      const hamiltonian::MaximalResult result = hamiltonian::build_maximal_H(
          input.domain, input.fields, hb_tol, hb_max_iter, build_options);
      io::json summary{{"pass", result.report.pass},
                       {"iterations", result.report.iterations},
                       {"fixed_point_residual", result.report.fixed_point_residual},
                       {"max_rotation_sum", result.report.max_rotation_sum}};
      std::cout << summary.dump(2) << "\n";
      if (!hb_emit.empty()) io::save_tensor(hb_emit, result.h);
      return result.report.pass ? kExitPass : kExitMathFailure;
    }

    if (*hverify) {
      const io::ProblemInput input = io::load_problem(hv_fields);
      const core::GridHamiltonian h = io::load_tensor(hv_h);
      const core::GridHamiltonian bar = hamiltonian::antisymmetrize(h, build_options);
      const hamiltonian::RepresentationReport report =
          hamiltonian::verify_dualrep(input.domain, input.fields, h, &bar, hv_tol, policy);
      double worst = 0.0;
      for (const double v : report.dualrep_residuals) worst = std::max(worst, v);
      io::json summary{{"pass", report.pass},
                       {"max_dualrep_residual", worst},
                       {"barh_le_residual", report.barh_le_residual},
                       {"barh_lower_margin", report.barh_lower_margin}};
      std::cout << summary.dump(2) << "\n";
      return report.pass ? kExitPass : kExitMathFailure;
    }

    if (*hlift) {
      const core::GridHamiltonian f = io::load_tensor(lf_input);
      const hamiltonian::LiftVariant variant = lf_variant == "corrected"
                                                   ? hamiltonian::LiftVariant::Corrected
                                                   : hamiltonian::LiftVariant::Printed;
      if (lf_variant != "printed" && lf_variant != "corrected")
        throw InvalidInputError("variant must be printed or corrected");
      const hamiltonian::LiftResult result =
          hamiltonian::lift_F_to_H(f, lf_order, variant, build_options);
      io::json summary{{"variant", lf_variant},
                       {"exact_antisymmetric", result.report.exact_antisymmetric},
                       {"max_abs_rotation_sum", result.report.max_abs_rotation_sum},
                       {"printed_identity_residual", result.report.printed_identity_residual},
                       {"h_dominates_f", result.report.h_dominates_f},
                       {"min_h_minus_f", result.report.min_h_minus_f}};
      std::cout << summary.dump(2) << "\n";
      if (!lf_emit.empty()) io::save_tensor(lf_emit, result.h);
      return kExitPass;
    }

    if (*tsolve) {
      const io::ProblemInput input = io::load_problem(ts_input);
      const transport::TransportResult result =
          transport::solve_sigma_kantorovich(input.domain, input.fields, {cap, policy, {}});
      io::json summary{{"optimal_value", result.value}, {"orbits", result.orbit_count}};
      std::cout << summary.dump(2) << "\n";
      if (!ts_emit.empty())
        io::write_file(ts_emit, io::coupling_to_json(result.coupling).dump(2) + "\n");
      return kExitPass;
    }

    if (*isolve) {
      const io::ProblemInput input = io::load_problem(iv_input);
      const transport::InvolutionMethod method = iv_method == "local"
                                                     ? transport::InvolutionMethod::Local
                                                     : transport::InvolutionMethod::Exact;
      if (iv_method != "exact" && iv_method != "local")
        throw InvalidInputError("method must be exact or local");
      const transport::InvolutionOptions options{8, iv_restarts, iv_seed, policy};
      const transport::InvolutionResult result =
          transport::solve_involution_polar(input.domain, input.fields, method, options);
      io::json perm = io::json::array();
      for (const core::Index v : result.s.perm()) perm.push_back(v);
      io::json summary{{"optimal_value", result.value},
                       {"method", iv_method},
                       {"optimal", result.optimal},
                       {"s", std::move(perm)}};
      std::cout << summary.dump(2) << "\n";
      if (!iv_emit.empty())
        io::write_file(iv_emit, io::involution_to_json(result.s).dump(2) + "\n");
      return kExitPass;
    }

    if (*dverify) {
      const io::ProblemInput input = io::load_problem(dv_fields);
      const hamiltonian::MaximalResult maximal = hamiltonian::build_maximal_H(
          input.domain, input.fields, 1e-9, dv_max_iter, build_options);
      const core::GridHamiltonian bar = hamiltonian::antisymmetrize(maximal.h, build_options);
      const core::NInvolution identity =
          core::NInvolution::identity(input.fields.order(), input.domain.size());
      const double gap =
          transport::duality_gap(input.domain, input.fields, bar, identity, policy);
      const bool pass = gap >= -1e-8 && gap <= dv_tol;
      io::json summary{{"pass", pass}, {"gap", gap}};
      std::cout << summary.dump(2) << "\n";
      return pass ? kExitPass : kExitMathFailure;
    }

    if (*gen) {
      const io::ProblemInput input = cli::generate_example(gen_params);
      io::save_problem(gen_out, input);
      std::cout << "wrote " << gen_out << "\n";
      return kExitPass;
    }

    if (*pipeline) {
      const std::string raw = io::read_file(pl_input);
      const io::ProblemInput input = io::load_problem(pl_input);
      pl_options.tensor_cap = cap;
      pl_options.policy = policy;
      const cli::PipelineResult result = cli::run_pipeline(
          input, pl_options, command_echo(argc, argv), io::digest_hex(raw));
      std::cout << result.report.dump(2) << "\n";
      if (!pl_report.empty()) io::write_file(pl_report, result.report.dump(2) + "\n");
      return result.exit_code;
    }

    throw InvalidInputError("no subcommand selected");
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotMonotoneError& e) {
    std::cerr << "not monotone: " << e.what() << "\n";
    return kExitMathFailure;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kExitMathFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
