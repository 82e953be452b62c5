#include "mcdt_cli/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mcdt/critical_values.hpp"
#include "mcdt/error.hpp"
#include "mcdt/format.hpp"
#include "mcdt/procedures.hpp"
#include "mcdt/risk.hpp"
#include "mcdt_cli/io.hpp"
#include "mcdt_cli/suites.hpp"

#ifndef MCDT_VERSION
#define MCDT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace mcdt::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Shared {
  std::optional<std::size_t> k;
  std::optional<double> rho;
  std::optional<double> sigma2;
  std::optional<double> alpha;
  std::optional<double> b;
  std::string variant = "point";
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> mc_reps;
  unsigned threads = 0;
  std::string out;
};

void add_shared(CLI::App* app, Shared& s) {
  app->add_option("--k", s.k, "Number of endpoints")->check(CLI::Range(std::size_t{1}, std::size_t{64}));
  app->add_option("--rho", s.rho, "Common correlation");
  app->add_option("--sigma2", s.sigma2, "Common variance");
  app->add_option("--alpha", s.alpha, "Familywise level");
  app->add_option("--b", s.b, "Loss for a false acceptance");
  app->add_option("--variant", s.variant, "Null form")->check(CLI::IsMember({"point", "composite"}));
  app->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  app->add_option("--mc-reps", s.mc_reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  app->add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  app->add_option("--out", s.out, "Output file (stdout when omitted)");
}

Variant parse_variant(const std::string& v) { return v == "composite" ? Variant::CompositeNull : Variant::PointNull; }

ProblemSpec spec_from(const Shared& s, std::size_t default_k = 2) {
  ProblemSpec p;
  p.k = s.k.value_or(default_k);
  p.rho = s.rho.value_or(0.0);
  p.sigma2 = s.sigma2.value_or(1.0);
  p.alpha = s.alpha.value_or(0.05);
  p.b = s.b.value_or(1.0);
  p.variant = parse_variant(s.variant);
  try {
    p.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto v = parse_double(tok);
    if (!v) throw UsageError(std::string(what) + ": not a number: '" + tok + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes the primary output and, when it goes to a file, its manifest.
void emit(const std::string& content, const Shared& s, const CLI::App* sub, const std::vector<std::string>& args,
          std::chrono::steady_clock::time_point start, const std::string& started, std::ostream& out,
          const std::optional<Provenance>& provenance = std::nullopt) {
  if (s.out.empty()) {
    out << content;
    return;
  }
  const fs::path path = fs::absolute(s.out);
  write_file(path, content);

  Manifest m;
  m.argv = args;
  m.command = sub->get_name();
  m.out = path.string();
  m.version = MCDT_VERSION;
  for (const auto* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string joined;
    for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
    m.params.emplace_back(opt->get_name(), joined);
  }
  if (provenance) m.params.emplace_back("constants_provenance", std::string(to_string(*provenance)));
  m.cwd = fs::current_path().string();
  m.seeds.emplace_back("seed", s.seed);
  m.started_utc = started;
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.digests.emplace_back(path.string(), sha256_hex(content));
  write_file(manifest_path(path), to_json(m));
}

CriticalValues load_constants(const std::string& file, const std::string& values, std::optional<ProcedureKind> kind) {
  if (!file.empty() && !values.empty()) throw UsageError("give either --constants or --values, not both");
  if (!file.empty()) {
    try {
      return parse_record(read_file(file));
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(file + ": " + e.what());
    }
  }
  if (values.empty()) throw UsageError("constants required: --constants FILE or --values LIST");
  Provenance prov = Provenance::PerComparison;
  if (kind == ProcedureKind::StepDown) prov = Provenance::StepDown;
  if (kind == ProcedureKind::StepUp) prov = Provenance::StepUp;
  try {
    return make_critical_values(parse_list(values, "--values"), prov);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(std::string("--values: ") + e.what());
  }
}

ProcedureKind default_procedure(const CriticalValues& c) {
  switch (c.provenance) {
    case Provenance::StepDown:
      return ProcedureKind::StepDown;
    case Provenance::StepUp:
      return ProcedureKind::StepUp;
    default:
      return ProcedureKind::SingleStep;
  }
}

std::optional<ProcedureKind> procedure_flag(const std::string& name) {
  if (name.empty()) return std::nullopt;
  const auto p = parse_procedure(name);
  if (!p) throw UsageError("unknown procedure: " + name);
  return p;
}

CriticalValues solve_constants(const std::string& kind, const ProblemSpec& spec, const Shared& s,
                               const std::string& method, double tolerance) {
  SolverOptions opts;
  opts.mc.seed = s.seed;
  opts.mc.threads = s.threads;
  if (s.mc_reps) opts.mc.reps = *s.mc_reps;
  opts.tolerance = tolerance;
  if (method == "monte-carlo") opts.method = SolveMethod::MonteCarlo;
  if (method == "closed-form") opts.method = SolveMethod::ClosedForm;
  try {
    if (kind == "per-comparison") return per_comparison_constants(spec);
    if (kind == "single-step" || kind == "single-step-fwe") return single_step_fwe_constant(spec, opts);
    if (kind == "step-down") return step_down_constants(spec, opts);
    if (kind == "step-up") return step_up_constants(spec, opts);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown constants kind: " + kind);
}

// mu grid: comma list of per-axis entries, each a value or start:stop:step
std::vector<std::vector<double>> parse_grid(const std::string& text, std::size_t k) {
  std::vector<std::vector<double>> axes;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::vector<double> axis;
    if (tok.find(':') == std::string::npos) {
      const auto v = parse_double(tok);
      if (!v) throw UsageError("--mu: not a number: '" + tok + "'");
      axis.push_back(*v);
    } else {
      std::stringstream parts(tok);
      std::string a, b, c;
      std::getline(parts, a, ':');
      std::getline(parts, b, ':');
      std::getline(parts, c, ':');
      const auto start = parse_double(a), stop = parse_double(b), step = parse_double(c);
      if (!start || !stop || !step) throw UsageError("--mu: malformed range '" + tok + "'");
      if (!(*step > 0.0)) throw UsageError("--mu: step must be positive in '" + tok + "'");
      const auto n = static_cast<long>(std::floor((*stop - *start) / *step + 1e-9));
      for (long i = 0; i <= n; ++i) axis.push_back(*start + static_cast<double>(i) * *step);
    }
    if (axis.empty()) throw UsageError("--mu: empty grid in '" + tok + "'");
    axes.push_back(std::move(axis));
  }
  if (axes.size() != k) throw UsageError("--mu: expected " + std::to_string(k) + " axes");
  return axes;
}

int run_replay(const std::string& manifest_file, std::ostream& out, std::ostream& err) {
  const auto m = parse_manifest(read_file(manifest_file));
  if (m.digests.empty()) throw DataError("manifest records no outputs");
  const std::string replay_out = m.out + ".replay";
  std::vector<std::string> args;
  bool replaced = false;
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    if (m.argv[i] == "--out" && i + 1 < m.argv.size()) {
      args.push_back("--out");
      args.push_back(replay_out);
      ++i;
      replaced = true;
    } else if (m.argv[i].rfind("--out=", 0) == 0) {
      args.push_back("--out=" + replay_out);
      replaced = true;
    } else {
      args.push_back(m.argv[i]);
    }
  }
  if (!replaced) throw DataError("manifest argv has no --out");

  std::ostringstream sink;
  const fs::path here = fs::current_path();
  if (!m.cwd.empty()) fs::current_path(m.cwd);
  int code = kDataError;
  try {
    code = run_cli(args, sink, err);
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  if (code != kOk && code != kCheckFailed) return code;
  const auto digest = sha256_hex(read_file(replay_out));
  const bool same = digest == m.digests.front().second;
  out << "original=" << m.digests.front().first << "\n"
      << "replay=" << replay_out << "\n"
      << "recorded_sha256=" << m.digests.front().second << "\n"
      << "replay_sha256=" << digest << "\n"
      << "result=" << (same ? "identical" : "different") << "\n";
  return same ? kOk : kCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();

  CLI::App app{"Multiple one-sided comparison procedures: constants, decisions, risk and checks", "mcdt"};
  app.set_version_flag("--version", MCDT_VERSION);
  app.set_config("--config", "", "Configuration file mirroring the flags");
  app.require_subcommand(1);

  Shared shared;

  auto* crit = app.add_subcommand("critvals", "Compute critical constants");
  add_shared(crit, shared);
  std::string crit_kind = "step-down", method = "auto";
  double tolerance = 1e-4;
  crit->add_option("--procedure", crit_kind, "Constants kind")
      ->check(CLI::IsMember({"single-step", "step-down", "step-up", "per-comparison"}))
      ->capture_default_str();
  crit->add_option("--method", method, "Solver")->check(CLI::IsMember({"auto", "monte-carlo", "closed-form"}));
  crit->add_option("--tolerance", tolerance, "Bisection tolerance on C")->check(CLI::PositiveNumber);

  auto* decide = app.add_subcommand("decide", "Apply a procedure to observations");
  add_shared(decide, shared);
  std::string input, constants_file, values, proc_name;
  decide->add_option("--input", input, "Observation CSV ('-' for stdin)")->required();
  decide->add_option("--constants", constants_file, "Critical-value record");
  decide->add_option("--values", values, "Comma list of constants");
  decide->add_option("--procedure", proc_name, "single-step, step-down or step-up");

  auto* curve = app.add_subcommand("risk-curve", "Monte Carlo risk over a mean grid");
  add_shared(curve, shared);
  std::string mu_grid, constants_kind;
  curve->add_option("--mu", mu_grid, "Per-axis value or start:stop:step, comma separated")->required();
  curve->add_option("--procedure", proc_name, "Procedure")->required();
  curve->add_option("--constants", constants_file, "Critical-value record");
  curve->add_option("--values", values, "Comma list of constants");
  curve->add_option("--constants-kind", constants_kind, "Solve constants: per-comparison, single-step, step-down, step-up");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  add_shared(verify, shared);
  std::string suite;
  std::optional<double> epsilon;
  verify->add_option("suite", suite, "Suite name")->required();
  verify->add_option("--procedure", proc_name, "Restrict to one procedure");
  verify->add_option("--epsilon", epsilon, "Perturbation size for the boundary construction");

  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  std::string manifest_file;
  replay->add_option("manifest", manifest_file, "Manifest JSON")->required()->check(CLI::ExistingFile);

  std::vector<const char*> argv{"mcdt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << MCDT_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (crit->parsed()) {
      const auto spec = spec_from(shared, 3);
      const auto c = solve_constants(crit_kind, spec, shared, method, tolerance);
      emit(to_record(c), shared, crit, args, start, started, out, c.provenance);
      return kOk;
    }

    if (decide->parsed()) {
      auto kind = procedure_flag(proc_name);
      const auto c = load_constants(constants_file, values, kind);
      if (!kind) kind = default_procedure(c);
      if (*kind == ProcedureKind::AcceptAll || *kind == ProcedureKind::RejectAll)
        throw UsageError("decide: reference rules are not supported here");
      const auto proc = make_procedure(*kind, c);
      ObservationTable table;
      if (input == "-") {
        table = read_observations(std::cin, c.size());
      } else {
        std::ifstream in(input);
        if (!in) throw DataError("cannot open " + input);
        table = read_observations(in, c.size());
      }
      std::string content = observation_header(c.size(), true) + "\n";
      for (const auto& row : table.rows) content += format_row(row, proc(row)) + "\n";
      emit(content, shared, decide, args, start, started, out, c.provenance);
      return kOk;
    }

    if (curve->parsed()) {
      const auto kind = procedure_flag(proc_name);
      CriticalValues c;
      ProblemSpec spec;
      if (!constants_file.empty() || !values.empty()) {
        c = load_constants(constants_file, values, kind);
        spec = spec_from(shared, c.size());
        if (spec.k != c.size()) throw UsageError("--k differs from the number of constants");
      } else {
        spec = spec_from(shared, 2);
        std::string ck = constants_kind;
        if (ck.empty()) ck = kind == ProcedureKind::StepDown ? "step-down" : kind == ProcedureKind::StepUp ? "step-up" : "single-step";
        c = solve_constants(ck, spec, shared, "auto", 1e-4);
      }
      const auto axes = parse_grid(mu_grid, spec.k);
      McConfig mc;
      mc.seed = shared.seed;
      mc.threads = shared.threads;
      mc.reps = shared.mc_reps.value_or(100'000);
      const auto proc = make_procedure(*kind, c);

      std::string content;
      for (std::size_t j = 0; j < spec.k; ++j) content += (j ? ",mu" : "mu") + std::to_string(j + 1);
      content += ",risk,se";
      for (std::size_t j = 0; j < spec.k; ++j) content += ",r" + std::to_string(j + 1);
      for (std::size_t j = 0; j < spec.k; ++j) content += ",se" + std::to_string(j + 1);
      content += "\n";

      std::vector<std::size_t> idx(spec.k, 0);
      std::vector<double> mu(spec.k);
      while (true) {
        for (std::size_t j = 0; j < spec.k; ++j) mu[j] = axes[j][idx[j]];
        try {
          classify_partition(mu, spec.variant);
        } catch (const Error& e) {
          throw UsageError(std::string("--mu: ") + e.what());
        }
        const auto r = risk_scalar(proc, mu, spec, mc);
        const auto rv = risk_vector(proc, mu, spec, mc);
        content += format_row(mu) + "," + format_double(r.mean) + "," + format_double(r.std_error);
        for (const auto& e : rv) content += "," + format_double(e.mean);
        for (const auto& e : rv) content += "," + format_double(e.std_error);
        content += "\n";
        std::size_t j = 0;
        while (j < spec.k && ++idx[j] == axes[j].size()) idx[j++] = 0;
        if (j == spec.k) break;
      }
      emit(content, shared, curve, args, start, started, out, c.provenance);
      return kOk;
    }

    if (verify->parsed()) {
      if (!is_suite(suite)) {
        err << "usage error: unknown suite '" << suite << "'\n";
        return kUsage;
      }
      spec_from(shared, shared.k.value_or(2));
      SuiteParams p;
      p.k = shared.k;
      p.rho = shared.rho;
      p.b = shared.b;
      p.sigma2 = shared.sigma2;
      p.alpha = shared.alpha;
      p.procedure = procedure_flag(proc_name);
      p.mc_reps = shared.mc_reps;
      p.epsilon = epsilon;
      p.variant = parse_variant(shared.variant);
      p.seed = shared.seed;
      p.threads = shared.threads;
      const auto report = run_suite(suite, p);
      emit(report.render(), shared, verify, args, start, started, out);
      return report.passed() ? kOk : kCheckFailed;
    }

    if (replay->parsed()) return run_replay(manifest_file, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace mcdt::cli
