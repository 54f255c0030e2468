#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spectel/spectel.h"

namespace {

enum Exit : int {
  kPass = 0,
  kChecksFailed = 1,
  kInputError = 2,
  kCapExceeded = 3,
  kStatisticalError = 4,
  kInternalError = 5,
};

struct CliError {
  int code;
  std::string message;
};

int exit_code(spectel_status status) {
  switch (status) {
    case SPECTEL_OK: return kPass;
    case SPECTEL_ERR_DOMAIN:
    case SPECTEL_ERR_PARSE:
    case SPECTEL_ERR_INVALID_ARGUMENT: return kInputError;
    case SPECTEL_ERR_RESOURCE: return kCapExceeded;
    case SPECTEL_ERR_STATISTICAL: return kStatisticalError;
    case SPECTEL_ERR_NUMERICAL: return kChecksFailed;
    case SPECTEL_ERR_INTERNAL: return kInternalError;
  }
  return kInternalError;
}

const char* status_label(spectel_status status) {
  switch (status) {
    case SPECTEL_ERR_DOMAIN: return "domain error";
    case SPECTEL_ERR_PARSE: return "parse error";
    case SPECTEL_ERR_RESOURCE: return "resource limit";
    case SPECTEL_ERR_NUMERICAL: return "numerical-contract error";
    case SPECTEL_ERR_STATISTICAL: return "statistical-contract error";
    case SPECTEL_ERR_INVALID_ARGUMENT: return "invalid argument";
    default: return "internal error";
  }
}

void check(spectel_status status) {
  if (status != SPECTEL_OK) {
    throw CliError{exit_code(status), std::string(status_label(status)) + ": " + spectel_last_error()};
  }
}

struct StringDeleter {
  void operator()(char* s) const { spectel_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct TargetDeleter {
  void operator()(spectel_target* t) const { spectel_target_free(t); }
};
using OwnedTarget = std::unique_ptr<spectel_target, TargetDeleter>;

struct SamplerDeleter {
  void operator()(spectel_sampler* s) const { spectel_sampler_free(s); }
};
using OwnedSampler = std::unique_ptr<spectel_sampler, SamplerDeleter>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kInputError, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw CliError{kInputError, "cannot write " + path};
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

OwnedTarget load_target(const std::string& path) {
  const std::string text = read_file(path);
  spectel_target* raw = nullptr;
  check(spectel_target_from_json(text.c_str(), &raw));
  return OwnedTarget(raw);
}

spectel_tolerances parse_tolerances(const std::vector<std::string>& overrides) {
  spectel_tolerances tol = spectel_default_tolerances();
  const std::map<std::string, double*> keys{
      {"telescope", &tol.telescope}, {"bound", &tol.bound}, {"lemma", &tol.lemma}, {"psd", &tol.psd}};
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CliError{kInputError, "--tol expects KEY=VAL, got " + item};
    const auto it = keys.find(item.substr(0, eq));
    if (it == keys.end()) {
      throw CliError{kInputError, "unknown tolerance key " + item.substr(0, eq) +
                                      " (expected telescope, bound, lemma or psd)"};
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError{kInputError, "tolerance value is not a number: " + item};
    }
    if (!(value > 0.0)) throw CliError{kInputError, "tolerances must be positive: " + item};
    *it->second = value;
  }
  return tol;
}

std::vector<std::size_t> parse_axes(const std::string& text, std::optional<std::size_t> n) {
  std::vector<std::size_t> axes;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      axes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw CliError{kInputError, "invalid --axes entry: " + part};
    }
  }
  if (axes.empty()) throw CliError{kInputError, "--axes is empty"};
  if (axes.size() == 1 && n) axes.assign(*n, axes[0]);
  if (n && axes.size() != *n) throw CliError{kInputError, "--axes lists " + std::to_string(axes.size()) +
                                                              " sizes but --n is " + std::to_string(*n)};
  return axes;
}

int emit_report(char* raw, int pass, const std::string& out_path) {
  OwnedString report(raw);
  Output out(out_path);
  out.stream() << report.get() << '\n';
  return pass ? kPass : kChecksFailed;
}

struct Options {
  std::string target;
  std::optional<std::size_t> random;
  std::optional<std::size_t> n;
  std::string axes;
  std::size_t l = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> steps;
  std::vector<std::string> tol;
  std::string out;
  std::string builtin;
  std::vector<std::string> inputs;
};

int run_verify_finite(const Options& o) {
  const spectel_tolerances tol = parse_tolerances(o.tol);
  char* report = nullptr;
  int pass = 0;
  if (o.random) {
    if (o.axes.empty()) throw CliError{kInputError, "--random needs --axes"};
    const auto axes = parse_axes(o.axes, o.n);
    check(spectel_verify_finite_random(*o.random, axes.data(), axes.size(), o.l, o.seed, &tol, &report, &pass));
  } else {
    OwnedTarget target = load_target(o.target);
    const spectel_target* list[] = {target.get()};
    check(spectel_verify_finite(list, 1, o.l, o.seed, &tol, &report, &pass));
  }
  return emit_report(report, pass, o.out);
}

int run_verify_cube(const Options& o) {
  if (!o.tol.empty()) throw CliError{kInputError, "verify-cube has no adjustable tolerances"};
  if (!o.n) throw CliError{kInputError, "verify-cube needs --n"};
  spectel_cube_options options = spectel_default_cube_options();
  options.n = *o.n;
  options.seed = o.seed;
  if (o.steps) options.steps = *o.steps;
  char* report = nullptr;
  int pass = 0;
  check(spectel_verify_cube(&options, &report, &pass));
  return emit_report(report, pass, o.out);
}

int run_sample(const Options& o) {
  spectel_sampler* raw = nullptr;
  OwnedTarget target;
  if (!o.builtin.empty()) {
    if (o.builtin != "cube-corner") throw CliError{kInputError, "unknown builtin target " + o.builtin};
    if (!o.n) throw CliError{kInputError, "--builtin cube-corner needs --n"};
    check(spectel_sampler_cube(*o.n, o.seed, &raw));
  } else {
    target = load_target(o.target);
    check(spectel_sampler_finite(target.get(), o.l, o.seed, &raw));
  }
  OwnedSampler sampler(raw);
  Output out(o.out);
  auto& stream = out.stream();
  const std::size_t steps = o.steps.value_or(1000);
  for (std::size_t t = 1; t <= steps; ++t) {
    check(spectel_sampler_step(sampler.get(), 1));
    char* line = nullptr;
    check(spectel_sampler_state_json(sampler.get(), &line));
    OwnedString owned(line);
    stream << "{\"step\":" << t << ",\"x\":" << owned.get() << "}\n";
  }
  return kPass;
}

int run_report_merge(const Options& o) {
  std::vector<std::string> texts;
  for (const auto& path : o.inputs) texts.push_back(read_file(path));
  std::vector<const char*> views;
  for (const auto& t : texts) views.push_back(t.c_str());
  char* merged = nullptr;
  int pass = 0;
  check(spectel_report_merge(views.data(), views.size(), &merged, &pass));
  return emit_report(merged, pass, o.out);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact spectral-gap verification and Gibbs sampling for finite and corner targets.\n"
               "Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input, 3 state-space cap exceeded,\n"
               "4 statistical-contract error, 5 internal error. SPECTEL_THREADS caps worker threads."};
  app.set_version_flag("--version", std::string(spectel_version()));
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Seed of the mt19937_64 stream")->capture_default_str();
    cmd->add_option("--out", o.out, "Write output to PATH instead of stdout");
  };

  auto* finite = app.add_subcommand("verify-finite", "Exact gap profile, telescope and bound checks on finite targets");
  auto* target_opt = finite->add_option("--target", o.target, "Target JSON {\"axes\": [...], \"probs\": [...]}")
                         ->check(CLI::ExistingFile);
  auto* random_opt = finite->add_option("--random", o.random, "Check COUNT Dirichlet(1) random targets");
  target_opt->excludes(random_opt);
  finite->add_option("--n", o.n, "Number of coordinates for --random");
  finite->add_option("--axes", o.axes, "Alphabet sizes for --random: one size or a comma list");
  finite->add_option("--l", o.l, "Block size")->capture_default_str();
  finite->add_option("--tol", o.tol, "Tolerance override KEY=VAL (telescope, bound, lemma, psd)");
  add_common(finite);

  auto* cube = app.add_subcommand("verify-cube", "Closed forms and Monte Carlo checks for the corner target");
  cube->add_option("--n", o.n, "Dimension, 3..8");
  cube->add_option("--steps", o.steps, "Gibbs steps for the empirical gap (default 2000000, at least 1000000)");
  cube->add_option("--tol", o.tol, "Not supported: this suite has fixed tolerances");
  add_common(cube);

  auto* sample = app.add_subcommand("sample", "Emit newline-delimited JSON states of the seeded Gibbs chain");
  auto* sample_target = sample->add_option("--target", o.target, "Finite target JSON")->check(CLI::ExistingFile);
  auto* builtin = sample->add_option("--builtin", o.builtin, "Builtin target: cube-corner");
  sample_target->excludes(builtin);
  sample->add_option("--n", o.n, "Dimension of the builtin target");
  sample->add_option("--l", o.l, "Block size (finite targets)")->capture_default_str();
  sample->add_option("--steps", o.steps, "Number of steps to emit (default 1000)");
  add_common(sample);

  auto* merge = app.add_subcommand("report-merge", "Combine reports; passes iff every input passes");
  merge->add_option("reports", o.inputs, "Report files")->required()->check(CLI::ExistingFile);
  merge->add_option("--out", o.out, "Write output to PATH instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (finite->parsed()) {
      if (o.target.empty() && !o.random) throw CliError{kInputError, "verify-finite needs --target or --random"};
      return run_verify_finite(o);
    }
    if (cube->parsed()) return run_verify_cube(o);
    if (sample->parsed()) {
      if (o.target.empty() && o.builtin.empty()) throw CliError{kInputError, "sample needs --target or --builtin"};
      return run_sample(o);
    }
    return run_report_merge(o);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  }
}
