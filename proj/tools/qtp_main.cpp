// qtp: batch front end for the teleportation library.  Subcommands:
//   analyze   resource fidelity report (singlet fraction, FEF, f, f_max)
//   teleport  run a channel on an input state, optionally cross-checked
//             against the protocol-enumeration oracle
//   pure      pure-state protocol outcome table
//   verify    the deterministic self-check suite, one JSON line per check
// Output bytes depend only on flags and seed; wall time is printed solely
// under --timing so that default reports stay byte-reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qtp/channel.hpp"
#include "qtp/fidelity.hpp"
#include "qtp/json_io.hpp"
#include "qtp/linalg.hpp"
#include "qtp/pure.hpp"
#include "qtp/states.hpp"
#include "qtp/types.hpp"
#include "qtp/verify.hpp"
#include "qtp/weyl.hpp"

namespace {

using qtp::Complex;
using qtp::Matrix;
using qtp::Vector;
using qtp::json_io::json;

constexpr const char* kVersion = "0.3.0";

struct CommonOpts {
  std::optional<std::uint64_t> seed;
  bool serial = false;
  bool as_json = false;
  bool timing = false;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed,
                  "random seed (falls back to QTP_SEED, then 0)");
  cmd->add_flag("--serial", c.serial,
                "use the serial reference kernels instead of OpenMP");
  cmd->add_flag("--json", c.as_json, "emit the JSON report on stdout");
  cmd->add_option("--out", c.out_path, "also write the JSON report here");
  cmd->add_flag("--timing", c.timing,
                "report wall time (makes output bytes run-dependent)");
}

std::uint64_t resolve_seed(const CommonOpts& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("QTP_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw qtp::ParseError("QTP_SEED must be an unsigned integer");
    return v;
  }
  return 0;
}

qtp::ExecPolicy policy_of(const CommonOpts& c) {
  return c.serial ? qtp::ExecPolicy::Serial : qtp::ExecPolicy::Parallel;
}

std::string fmt_g(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

std::string fmt_complex(const Complex& z) {
  char b[96];
  std::snprintf(b, sizeof b, "%.12g%+.12gi", z.real(), z.imag());
  return b;
}

std::string fmt_matrix(const Matrix& m, const char* indent) {
  std::ostringstream os;
  for (long i = 0; i < m.rows(); ++i) {
    os << indent;
    for (long j = 0; j < m.cols(); ++j)
      os << fmt_complex(m(i, j)) << (j + 1 < m.cols() ? "  " : "");
    os << '\n';
  }
  return os.str();
}

std::string fmt_amps(const Vector& v) {
  std::ostringstream os;
  for (long i = 0; i < v.size(); ++i)
    os << fmt_complex(v(i)) << (i + 1 < v.size() ? " " : "");
  return os.str();
}

class WallClock {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void emit(const json& report, const CommonOpts& c, const std::string& human) {
  if (c.as_json)
    std::fputs((report.dump(2) + "\n").c_str(), stdout);
  else
    std::fputs(human.c_str(), stdout);
  if (!c.out_path.empty()) qtp::json_io::save_json_file(c.out_path, report);
}

json optimizer_to_json(const qtp::fidelity::OptimizerReport& r) {
  return json{{"restarts_used", r.restarts_used},
              {"total_iterations", r.total_iterations},
              {"final_gradient_norm", r.final_gradient_norm},
              {"hit_iteration_cap", r.hit_iteration_cap},
              {"scan_triggered_restart", r.scan_triggered_restart},
              {"scan_best", r.scan_best}};
}

struct AnalyzeArgs {
  std::string resource;
  int restarts = 20;
  int scan_samples = 10000;
  CommonOpts common;
};

int run_analyze(const AnalyzeArgs& a) {
  const WallClock clock;
  const auto chi = qtp::states::parse_resource_descriptor(a.resource);
  qtp::fidelity::OptimizerConfig cfg;
  cfg.restarts = a.restarts;
  cfg.scan_samples = a.scan_samples;
  cfg.seed = resolve_seed(a.common);
  cfg.policy = policy_of(a.common);
  const auto r = qtp::fidelity::analyze_resource(chi, cfg);

  json report{{"command", "analyze"},
              {"version", kVersion},
              {"resource", a.resource},
              {"seed", cfg.seed},
              {"n", r.n},
              {"singlet_fraction", r.singlet_fraction},
              {"fully_entangled_fraction", r.fef},
              {"f_standard", r.f_standard},
              {"f_optimal", r.f_optimal},
              {"optimizer", optimizer_to_json(r.report)},
              {"w", qtp::json_io::matrix_to_json(r.optimizer_w.mat())}};
  if (a.common.timing) report["wall_ms"] = clock.ms();

  std::ostringstream os;
  os << "resource                  " << a.resource << '\n'
     << "n                         " << r.n << '\n'
     << "singlet fraction          " << fmt_g(r.singlet_fraction) << '\n'
     << "fully entangled fraction  " << fmt_g(r.fef) << '\n'
     << "fidelity standard         " << fmt_g(r.f_standard) << '\n'
     << "fidelity optimal          " << fmt_g(r.f_optimal) << '\n'
     << "optimizer restarts        " << r.report.restarts_used << '\n'
     << "optimizer iterations      " << r.report.total_iterations << '\n'
     << "final gradient norm       " << fmt_g(r.report.final_gradient_norm)
     << '\n'
     << "scan best                 " << fmt_g(r.report.scan_best) << '\n';
  if (a.common.timing) os << "wall ms                   " << fmt_g(clock.ms()) << '\n';
  emit(report, a.common, os.str());
  return 0;
}

struct TeleportArgs {
  std::string resource;
  std::string state;
  std::string protocol = "standard";
  std::string corrections_path;
  bool oracle = false;
  int restarts = 20;
  int scan_samples = 10000;
  CommonOpts common;
};

int run_teleport(const TeleportArgs& a) {
  const WallClock clock;
  const auto chi = qtp::states::parse_resource_descriptor(a.resource);
  const auto rho = qtp::states::parse_input_descriptor(a.state);
  if (chi.dims().size() != 2 || chi.dims()[0] != chi.dims()[1])
    throw qtp::DimensionError("resource must carry dims (n, n)");
  const int n = chi.dims()[0];
  const auto basis = qtp::weyl::make_basis(n);
  const auto policy = policy_of(a.common);

  json extra = json::object();
  qtp::channel::CorrectionFamily fam =
      qtp::channel::CorrectionFamily::weyl(basis);
  std::optional<qtp::channel::ChannelOutput> out;
  if (a.protocol == "standard") {
    out = qtp::channel::apply_standard(chi, rho, policy);
  } else if (a.protocol == "optimal") {
    qtp::fidelity::OptimizerConfig cfg;
    cfg.restarts = a.restarts;
    cfg.scan_samples = a.scan_samples;
    cfg.seed = resolve_seed(a.common);
    cfg.policy = policy;
    auto fef = qtp::fidelity::fully_entangled_fraction(chi, cfg);
    fam = qtp::channel::CorrectionFamily::rotated_weyl(basis, fef.w.mat());
    out = qtp::channel::apply_optimal(chi, rho, fef.w, policy);
    extra["fully_entangled_fraction"] = fef.value;
    extra["w"] = qtp::json_io::matrix_to_json(fef.w.mat());
    extra["optimizer"] = optimizer_to_json(fef.report);
  } else if (a.protocol == "custom") {
    if (a.corrections_path.empty())
      throw qtp::ParseError("custom protocol needs --corrections <file>");
    const json j = qtp::json_io::load_json_file(a.corrections_path);
    if (!j.contains("n") || !j.contains("ops") || !j["ops"].is_array())
      throw qtp::ParseError("corrections file needs fields n and ops");
    std::vector<Matrix> ops;
    for (const auto& m : j["ops"])
      ops.push_back(qtp::json_io::matrix_from_json(m));
    fam = qtp::channel::CorrectionFamily::custom(j["n"].get<int>(),
                                                 std::move(ops));
    out = qtp::channel::apply_general(chi, fam, rho, policy);
  } else {
    throw qtp::ParseError("protocol must be standard, optimal or custom");
  }

  const double overlap =
      std::real((rho.mat() * out->rho_out.mat()).trace());
  double oracle_dev = -1.0;
  if (a.oracle) {
    const auto sim = qtp::channel::simulate_protocol(chi, fam, rho, policy);
    oracle_dev = qtp::max_abs_diff(out->rho_out.mat(), sim.rho_out.mat());
  }

  json report{{"command", "teleport"},
              {"version", kVersion},
              {"resource", a.resource},
              {"input", a.state},
              {"protocol", a.protocol},
              {"n", n},
              {"overlap", overlap},
              {"trace_defect", out->trace_defect},
              {"rho_out", qtp::json_io::density_to_json(out->rho_out)}};
  for (auto& [k, v] : extra.items()) report[k] = v;
  if (a.oracle) report["oracle_deviation"] = oracle_dev;
  if (a.common.timing) report["wall_ms"] = clock.ms();

  std::ostringstream os;
  os << "resource        " << a.resource << '\n'
     << "input           " << a.state << '\n'
     << "protocol        " << a.protocol << '\n'
     << "n               " << n << '\n'
     << "overlap         " << fmt_g(overlap) << '\n'
     << "trace defect    " << fmt_g(out->trace_defect) << '\n';
  if (a.oracle) os << "oracle deviation " << fmt_g(oracle_dev) << '\n';
  if (a.common.timing) os << "wall ms         " << fmt_g(clock.ms()) << '\n';
  os << "rho_out:\n" << fmt_matrix(out->rho_out.mat(), "  ");
  emit(report, a.common, os.str());

  if (a.oracle && oracle_dev > qtp::kOracleTol) {
    std::fprintf(stderr,
                 "oracle mismatch: deviation %.3g exceeds %.3g\n",
                 oracle_dev, qtp::kOracleTol);
    return 4;
  }
  return 0;
}

struct PureArgs {
  int n1 = 2;
  std::vector<int> support;
  std::vector<double> weights;
  std::string preset = "ones";
  std::string table_path;
  std::string state;
  bool assemble = false;
  CommonOpts common;
};

int run_pure(const PureArgs& a) {
  const WallClock clock;
  const auto res = [&]() -> qtp::pure::ResourceCoefficients {
    if (!a.weights.empty()) {
      if (!a.support.empty())
        throw qtp::ParseError("--weights and --support are exclusive");
      if (static_cast<int>(a.weights.size()) != a.n1)
        throw qtp::ValidationError("--weights needs exactly N1 entries");
      Matrix m = Matrix::Zero(a.n1, a.n1);
      for (int i = 0; i < a.n1; ++i) {
        if (a.weights[i] < 0.0)
          throw qtp::ValidationError("resource weights must be nonnegative");
        m(i, i) = std::sqrt(a.weights[i]);
      }
      return {std::move(m)};
    }
    if (!a.support.empty())
      return qtp::pure::partial_support_resource(a.n1, a.support);
    return qtp::pure::diagonal_resource(a.n1);
  }();
  const int n2 = res.n2();
  const auto table =
      a.table_path.empty()
          ? qtp::pure::PhaseTable::preset(a.preset, a.n1, n2)
          : qtp::json_io::phase_table_from_json(
                qtp::json_io::load_json_file(a.table_path));

  const Vector amps = qtp::states::parse_amplitudes(a.state);
  const double defect = std::abs(amps.norm() - 1.0);
  if (defect > qtp::kNormTol)
    std::fprintf(stderr, "warning: renormalizing input (norm defect %.3g)\n",
                 defect);
  const auto psi = qtp::linalg::StateVector::normalized(amps);

  const auto outcomes = qtp::pure::teleport_pure(psi, res, table);
  const auto blocks = qtp::pure::solve_sender_blocks(res, table);

  json jout = json::array();
  std::ostringstream os;
  os << "N1 " << a.n1 << "  N2 " << n2 << "  table "
     << (a.table_path.empty() ? a.preset : a.table_path) << '\n'
     << "input  " << fmt_amps(psi.vec()) << '\n';
  for (const auto& oc : outcomes) {
    const auto corr = qtp::pure::correction_operator(oc.s, oc.t, table, a.n1,
                                                     blocks.support);
    jout.push_back(json{
        {"s", oc.s},
        {"t", oc.t},
        {"label", "O(" + std::to_string(oc.s) + "," + std::to_string(oc.t) + ")"},
        {"probability", oc.probability},
        {"uncorrected", qtp::json_io::vector_to_json(oc.uncorrected)},
        {"corrected", qtp::json_io::vector_to_json(oc.corrected)},
        {"correction", qtp::json_io::matrix_to_json(corr.mat())},
        {"recovery_overlap", oc.recovery_overlap}});
    os << "outcome s=" << oc.s << " t=" << oc.t << "  p="
       << fmt_g(oc.probability) << "  correction=O(" << oc.s << ',' << oc.t
       << ")  overlap=" << fmt_g(oc.recovery_overlap)
       << "  uncorrected: " << fmt_amps(oc.uncorrected)
       << "  corrected: " << fmt_amps(oc.corrected) << '\n';
  }

  json report{{"command", "pure"},
              {"version", kVersion},
              {"n1", a.n1},
              {"n2", n2},
              {"table", a.table_path.empty() ? a.preset : a.table_path},
              {"support", blocks.support},
              {"input", qtp::json_io::vector_to_json(psi.vec())},
              {"outcomes", std::move(jout)}};
  if (a.assemble) {
    const auto u = qtp::pure::assemble_unitary(blocks);
    report["assembled_unitary"] = qtp::json_io::matrix_to_json(u.mat());
    os << "assembled unitary:\n" << fmt_matrix(u.mat(), "  ");
  }
  if (a.common.timing) {
    report["wall_ms"] = clock.ms();
    os << "wall ms " << fmt_g(clock.ms()) << '\n';
  }
  emit(report, a.common, os.str());
  return 0;
}

struct VerifyArgs {
  int n_min = 2;
  int n_max = 4;
  long twirl_samples = 20000;
  long mc_samples = 20000;
  int trials = 5;
  bool flip_omega = false;
  CommonOpts common;
};

int run_verify(const VerifyArgs& a) {
  qtp::verify::Options opt;
  opt.n_min = a.n_min;
  opt.n_max = a.n_max;
  opt.twirl_samples = a.twirl_samples;
  opt.mc_samples = a.mc_samples;
  opt.trials = a.trials;
  opt.flip_omega_sign = a.flip_omega;
  opt.seed = resolve_seed(a.common);
  opt.policy = policy_of(a.common);

  const auto results = qtp::verify::run_suite(opt);
  json lines = json::array();
  std::string first_failure;
  int failed = 0;
  for (const auto& r : results) {
    const json line{{"check", r.name},
                    {"n", r.n},
                    {"deviation", r.deviation},
                    {"threshold", r.threshold},
                    {"pass", r.pass}};
    std::fputs((line.dump() + "\n").c_str(), stdout);
    lines.push_back(line);
    if (!r.pass && ++failed == 1) first_failure = r.name;
  }
  json summary{{"checks", results.size()},
               {"failed", failed},
               {"pass", failed == 0},
               {"seed", opt.seed},
               {"version", kVersion}};
  if (failed > 0) summary["first_failure"] = first_failure;
  std::fputs((summary.dump() + "\n").c_str(), stdout);
  if (!a.common.out_path.empty())
    qtp::json_io::save_json_file(a.common.out_path,
                                 json{{"results", std::move(lines)},
                                      {"summary", std::move(summary)}});
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qudit teleportation channels, fidelities and protocols"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AnalyzeArgs an;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "fidelity report for a resource state");
  analyze->add_option("--resource", an.resource, "resource descriptor")
      ->required();
  analyze->add_option("--restarts", an.restarts, "optimizer restarts");
  analyze->add_option("--samples", an.scan_samples,
                      "optimizer Haar-scan safeguard samples");
  add_common(analyze, an.common);

  TeleportArgs tp;
  CLI::App* teleport =
      app.add_subcommand("teleport", "run a teleportation channel");
  teleport->add_option("--resource", tp.resource, "resource descriptor")
      ->required();
  teleport->add_option("--state", tp.state, "input state descriptor")
      ->required();
  teleport->add_option("--protocol", tp.protocol,
                       "standard | optimal | custom");
  teleport->add_option("--corrections", tp.corrections_path,
                       "JSON correction family for --protocol custom");
  teleport->add_flag("--oracle", tp.oracle,
                     "cross-check against the enumeration oracle");
  teleport->add_option("--restarts", tp.restarts,
                       "optimizer restarts (optimal protocol)");
  teleport->add_option("--samples", tp.scan_samples,
                       "optimizer scan samples (optimal protocol)");
  add_common(teleport, tp.common);

  PureArgs pu;
  CLI::App* pure =
      app.add_subcommand("pure", "pure-state protocol outcome table");
  pure->add_option("--n", pu.n1, "input dimension N1")->required();
  pure->add_option("--support", pu.support,
                   "resource support indices (partial-support resource)");
  pure->add_option("--weights", pu.weights,
                   "diagonal resource weights; non-uniform weights are "
                   "rejected as unsolvable");
  pure->add_option("--preset", pu.preset, "phase table: ones | fourier | pauli-n2");
  pure->add_option("--table", pu.table_path, "phase table JSON file");
  pure->add_option("--state", pu.state, "input amplitudes, re or re:im list")
      ->required();
  pure->add_flag("--assemble", pu.assemble,
                 "assemble and print the sender unitary (needs N2 = N1)");
  add_common(pure, pu.common);

  VerifyArgs vf;
  CLI::App* verify =
      app.add_subcommand("verify", "run the deterministic self-check suite");
  verify->add_option("--n-min", vf.n_min, "smallest dimension");
  verify->add_option("--n-max", vf.n_max, "largest dimension");
  verify->add_option("--twirl-samples", vf.twirl_samples,
                     "Monte Carlo twirl sample count");
  verify->add_option("--mc-samples", vf.mc_samples,
                     "Monte Carlo fidelity sample count");
  verify->add_option("--trials", vf.trials, "random instances per check");
  verify->add_flag("--flip-omega", vf.flip_omega,
                   "negative control: flip the commutation phase sign");
  add_common(verify, vf.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return run_analyze(an);
    if (*teleport) return run_teleport(tp);
    if (*pure) return run_pure(pu);
    if (*verify) return run_verify(vf);
  } catch (const qtp::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const qtp::UnsolvableResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const qtp::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
