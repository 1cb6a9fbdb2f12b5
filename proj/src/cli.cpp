#include "hadinv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "hadinv/expr.hpp"
#include "hadinv/linalg.hpp"
#include "hadinv/report_io.hpp"

namespace hadinv {

namespace {

VecX parse_vector(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("expected comma-separated decimals, got '" + text + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  VecX v(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<int>(i)] = values[i];
  if (!v.allFinite()) throw CLI::ValidationError("vector entries must be finite: '" + text + "'");
  return v;
}

Box parse_box(const std::string& text) {
  Box box;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("box axis must be lo:hi, got '" + item + "'");
    try {
      std::size_t used = 0;
      const std::string lo_s = item.substr(0, colon), hi_s = item.substr(colon + 1);
      const double lo = std::stod(lo_s, &used);
      if (used != lo_s.size()) throw std::invalid_argument(lo_s);
      const double hi = std::stod(hi_s, &used);
      if (used != hi_s.size()) throw std::invalid_argument(hi_s);
      box.push_back(Interval{lo, hi});
    } catch (const std::exception&) {
      throw CLI::ValidationError("box axis must be lo:hi decimals, got '" + item + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return box;
}

/// `name[:param]` builtin or `@path` map file.
SmoothMap resolve_map(const std::string& spec, int n) {
  if (!spec.empty() && spec[0] == '@') {
    SmoothMap map = load_map_file(spec.substr(1));
    if (map.dim() != n)
      throw DimensionMismatch("map file has dimension " + std::to_string(map.dim()) +
                              " but arguments imply " + std::to_string(n));
    return map;
  }
  return make_builtin(spec, n);
}

InversionMethod parse_method(const std::string& name) {
  if (name == "geodesic") return InversionMethod::Geodesic;
  if (name == "continuation") return InversionMethod::Continuation;
  if (name == "auto") return InversionMethod::Auto;
  throw CLI::ValidationError("method must be geodesic|continuation|auto, got '" + name + "'");
}

void write_text(const std::string& path, const std::string& payload, std::ostream& fallback) {
  if (path.empty()) {
    fallback << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << payload;
}

struct InvertArgs {
  std::string map_spec;
  std::vector<std::string> targets;
  std::string x0;
  std::string method = "auto";
  double rtol = 1e-10;
  double atol = 1e-12;
  std::string out_path;
  std::string trace_path;
};

int cmd_invert(const InvertArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<VecX> targets;
  for (const std::string& t : args.targets) targets.push_back(parse_vector(t));
  const int n = static_cast<int>(targets.front().size());
  for (const VecX& t : targets)
    if (t.size() != n) throw CLI::ValidationError("targets must share one dimension");
  if (!args.trace_path.empty() && targets.size() != 1)
    throw CLI::ValidationError("--trace requires exactly one --target");

  const SmoothMap map = resolve_map(args.map_spec, n);

  InversionOptions opts;
  opts.method = parse_method(args.method);
  opts.rtol = args.rtol;
  opts.atol = args.atol;
  if (!args.x0.empty()) opts.x0 = parse_vector(args.x0);

  bool any_failed = false;
  std::vector<InversionReport> reports;
  reports.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    reports.push_back(invert(map, targets[i], opts));
    const InversionReport& rep = reports.back();
    if (!rep.ok()) {
      any_failed = true;
      err << "invert: target " << args.targets[i] << " failed: "
          << failure_kind_name(rep.failure->kind) << " at t = "
          << format_double(rep.failure->t) << " (" << rep.failure->detail << ")\n";
    }
  }

  const std::string payload =
      (reports.size() == 1 ? to_json(reports.front())
                           : [&] {
                               nlohmann::json arr = nlohmann::json::array();
                               for (const auto& r : reports) arr.push_back(to_json(r));
                               return arr;
                             }())
          .dump(2) +
      "\n";
  write_text(args.out_path, payload, out);

  if (!args.trace_path.empty()) {
    std::ofstream tf(args.trace_path, std::ios::binary);
    if (!tf) throw std::runtime_error("cannot open trace file '" + args.trace_path + "'");
    write_trace_csv(tf, map, reports.front().trace);
  }
  return any_failed ? 3 : 0;
}

struct EstimateArgs {
  std::string map_spec;
  std::string box;
  int grid = 101;
  int random = 0;
  std::uint64_t seed = 0;
  bool refine = false;
  std::string out_path;
};

int cmd_estimate(const EstimateArgs& args, std::ostream& out) {
  const Box box = parse_box(args.box);
  const SmoothMap map = resolve_map(args.map_spec, static_cast<int>(box.size()));
  const HadamardEstimate est =
      estimate_hadamard(map, box, args.grid, args.random, args.refine, args.seed);
  write_text(args.out_path, to_json(est).dump(2) + "\n", out);
  return 0;
}

}  // namespace

int run_demo_exp(std::ostream& out) {
  const SmoothMap map = make_expc();

  out << "# demo: complex exponential (x1, x2) -> (exp(x1) cos(x2), exp(x1) sin(x2))\n";
  out << "# invertible Jacobian everywhere, yet neither injective nor surjective:\n";
  out << "# |Df^{-1}| = exp(-x1) is unbounded, so the boundedness hypothesis fails.\n";

  out << "\n## jacobian samples\n";
  for (const auto& [x1, x2] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {-1.0, 1.5707963267948966}}) {
    VecX x(2);
    x << x1, x2;
    const MatX j = map.jacobian(x);
    out << "Df(" << format_double(x1) << ", " << format_double(x2) << ") = [["
        << format_double(j(0, 0)) << ", " << format_double(j(0, 1)) << "], ["
        << format_double(j(1, 0)) << ", " << format_double(j(1, 1)) << "]]\n";
  }

  out << "\n## sigma_min at x1=-1\n";
  VecX xm(2);
  xm << -1.0, 0.3;
  out << "sigma_min(Df) = " << format_double(sigma_min(map.jacobian(xm)))
      << "  (= exp(x1), independent of x2; exact value " << format_double(std::exp(-1.0))
      << ")\n";

  out << "\n## hadamard decay\n";
  out << "sampled c_hat = min sigma_min(Df)^2 shrinks to 0 as the box grows,\n";
  out << "so no positive lower bound holds on all of R^2:\n";
  for (const double r : {1.0, 2.0, 3.0}) {
    const Box box{{-r, r}, {-3.141592653589793, 3.141592653589793}};
    const HadamardEstimate est = estimate_hadamard(map, box, 41, 0, false, 42);
    out << "  box x1 in [-" << format_double(r) << ", " << format_double(r)
        << "]: c_hat = " << format_double(est.c_hat)
        << "  (exp(-2R) = " << format_double(std::exp(-2.0 * r)) << ")\n";
  }

  out << "\n## invert (0,0)\n";
  out << "0 is outside the image; the continuation path runs to x1 -> -inf:\n";
  VecX zero2 = VecX::Zero(2);
  const InversionReport report = invert(map, zero2, {});
  if (report.failure) {
    out << "failure: " << failure_kind_name(report.failure->kind)
        << " at t = " << format_double(report.failure->t)
        << ", position x1 = " << format_double(report.failure->position[0]) << "\n";
    out << "ode_steps = " << report.ode_steps << "\n";
  } else {
    out << "unexpected success (residual " << format_double(report.residual) << ")\n";
  }

  out << "\n## periodicity\n";
  VecX p0(2), p1(2);
  p0 << 0.0, 0.0;
  p1 << 0.0, 2.0 * 3.141592653589793;
  const double gap = (map.value(p0) - map.value(p1)).norm();
  out << "|f(0,0) - f(0,2pi)| = " << format_double(gap) << " with |x - y| = "
      << format_double((p0 - p1).norm()) << "\n";
  const LipschitzProbeReport probe =
      lipschitz_probe(map, 1.0, 0, Box{{-1.0, 1.0}, {-4.0, 7.0}}, 42, {{p0, p1}});
  out << "injected pair flagged as lower-Lipschitz violation: "
      << (probe.violations.empty() ? "no" : "yes") << "\n";
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"global inverse computation via pullback-geodesic continuation"};
  app.name("hadinv");
  app.require_subcommand(1);

  InvertArgs inv;
  CLI::App* invert_cmd = app.add_subcommand("invert", "solve f(x) = y for x");
  invert_cmd->add_option("--map", inv.map_spec, "builtin map name or @mapfile")->required();
  invert_cmd->add_option("--target", inv.targets, "target vector y as comma-separated decimals")
      ->required();
  invert_cmd->add_option("--x0", inv.x0, "seed point (default origin)");
  invert_cmd->add_option("--method", inv.method, "geodesic|continuation|auto");
  invert_cmd->add_option("--rtol", inv.rtol, "ODE relative tolerance");
  invert_cmd->add_option("--atol", inv.atol, "ODE absolute tolerance");
  invert_cmd->add_option("--out", inv.out_path, "write JSON report here instead of stdout");
  invert_cmd->add_option("--trace", inv.trace_path, "write the path trace as CSV");

  EstimateArgs est;
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "sample a lower bound for min sigma_min(Df)^2 over a box");
  estimate_cmd->add_option("--map", est.map_spec, "builtin map name or @mapfile")->required();
  estimate_cmd->add_option("--box", est.box, "per-axis intervals lo:hi[,lo:hi...]")->required();
  estimate_cmd->add_option("--grid", est.grid, "grid points per axis");
  estimate_cmd->add_option("--random", est.random, "additional seeded random samples");
  estimate_cmd->add_option("--seed", est.seed, "random stream seed")->required();
  estimate_cmd->add_flag("--refine", est.refine, "coordinate-descent refinement of the minimum");
  estimate_cmd->add_option("--out", est.out_path, "write JSON report here instead of stdout");

  CLI::App* demo_cmd = app.add_subcommand("demo-exp", "counterexample walkthrough: complex exponential");

  std::string fault;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the reduced invariant suite");
  selftest_cmd->add_option("--inject-fault", fault, "test fixture: christoffel-sign")
      ->group("");  // hidden

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("hadinv");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*invert_cmd) return cmd_invert(inv, out, err);
    if (*estimate_cmd) return cmd_estimate(est, out);
    if (*demo_cmd) return run_demo_exp(out);
    if (*selftest_cmd) {
      FaultInjection inject = FaultInjection::None;
      if (fault == "christoffel-sign") {
        inject = FaultInjection::ChristoffelSign;
      } else if (!fault.empty()) {
        err << "usage error: unknown fault '" << fault << "'\n";
        return 2;
      }
      return run_selftest(out, inject);
    }
  } catch (const ParseError& e) {
    err << "map file error: " << e.what() << "\n";
    return 4;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return 4;
  } catch (const DimensionMismatch& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace hadinv
