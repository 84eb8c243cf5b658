// sgdlab command-line front end.
//
// Exit codes: 0 success, 1 runtime failure (I/O, failed verification), 2 usage
// error (bad flags or arguments the library rejects).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sgdlab/sgdlab.hpp"

#ifndef SGDLAB_DEFAULT_CALIBRATION
#define SGDLAB_DEFAULT_CALIBRATION ""
#endif

namespace fs = std::filesystem;
using namespace sgdlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raised for flag combinations CLI11 cannot express.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Integer flag that also accepts scientific notation ("1e3").
CLI::Option* add_count(CLI::App* app, const std::string& name, std::size_t& target,
                       const std::string& description) {
  return app
      ->add_option_function<std::string>(
          name,
          [&target, name](const std::string& text) {
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end == text.c_str() || *end != '\0' || !(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
              throw CLI::ValidationError(name, fmt::format("expected a nonnegative integer, got '{}'", text));
            }
            target = static_cast<std::size_t>(v);
          },
          description)
      ->type_name("UINT");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw UsageError(fmt::format("{}: bad number '{}'", what, item));
    out.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (const double v : parse_list(text, what)) {
    if (!(v >= 0.0) || v != std::floor(v)) throw UsageError(fmt::format("{}: '{}' is not a count", what, v));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

struct ProblemFlags {
  std::string construction = "ss";
  std::string problem_file;
  std::size_t n = 100;
  double grad_bound = 1.0;
  double lambda = 1.0;
  double lambda_max = 50.0;
  std::string x0_preset;
  std::string x0;

  void add(CLI::App* app, const char* default_preset) {
    x0_preset = default_preset;
    app->add_option("--construction", construction, "Built-in instance: ss, rr or rr-fig1")
        ->capture_default_str()
        ->check(CLI::IsMember({"ss", "rr", "rr-fig1"}));
    app->add_option("--problem", problem_file, "Problem JSON file (overrides --construction)");
    add_count(app, "--n", n, "Number of components (even for constructions)")->capture_default_str();
    app->add_option("--G", grad_bound, "Gradient bound G")->capture_default_str();
    app->add_option("--lambda", lambda, "Strong convexity lambda")->capture_default_str();
    app->add_option("--lambda-max", lambda_max, "Largest mean curvature lambda_max")->capture_default_str();
    app->add_option("--x0-preset", x0_preset, "Initial point preset: appendix or fig1")
        ->capture_default_str()
        ->check(CLI::IsMember({"appendix", "fig1"}));
    app->add_option("--x0", x0, "Explicit initial point, comma separated (overrides --x0-preset)");
  }

  Problem problem() const {
    if (!problem_file.empty()) return load_problem(problem_file);
    return build_construction(parse_construction(construction), n, grad_bound, lambda, lambda_max);
  }

  Vector initial(const Problem& p) const {
    if (!x0.empty()) {
      Vector v = to_vector(parse_list(x0, "--x0"));
      if (static_cast<std::size_t>(v.size()) != p.dim()) {
        throw UsageError(fmt::format("--x0 has {} entries, problem dimension is {}", v.size(), p.dim()));
      }
      return v;
    }
    if (!problem_file.empty()) throw UsageError("--problem needs an explicit --x0");
    return initial_point(parse_construction(construction), parse_x0_preset(x0_preset), grad_bound,
                         lambda, lambda_max);
  }
};

struct EtaFlags {
  std::optional<double> eta;
  bool auto_eta = false;

  void add(CLI::App* app) {
    auto* e = app->add_option("--eta", eta, "Constant step size");
    auto* a = app->add_flag("--auto-eta", auto_eta, "Use eta = log(nk) / (lambda n k)");
    e->excludes(a);
    a->excludes(e);
  }

  double resolve(const Problem& p, std::size_t k) const {
    if (auto_eta) return recommended_eta(p.size(), k, p.lambda());
    if (!eta) throw UsageError("one of --eta or --auto-eta is required");
    return *eta;
  }
};

std::size_t default_jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

struct SimulateCmd {
  ProblemFlags problem;
  EtaFlags eta;
  std::string scheme = "rr";
  std::size_t k = 1;
  std::uint64_t seed = 0;
  bool couple = false;
  std::string method = "iterative";
  std::string out;
  bool record_steps = false;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("simulate", "Run constant-step SGD and write a trajectory CSV");
    problem.add(app, "appendix");
    eta.add(app);
    app->add_option("--scheme", scheme, "Sampling scheme: wr, ss or rr")
        ->capture_default_str()
        ->check(CLI::IsMember({"wr", "ss", "rr", "with-replacement", "single-shuffle", "random-reshuffle"}));
    add_count(app, "--k", k, "Number of epochs")->required();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_flag("--couple-rng", couple, "Use the seed directly instead of a per-scheme stream");
    app->add_option("--method", method, "iterative, closed-form or dense")
        ->capture_default_str()
        ->check(CLI::IsMember({"iterative", "closed-form", "dense"}));
    app->add_option("--out", out, "Trajectory CSV path");
    app->add_flag("--record-steps", record_steps, "Keep every iterate (iterative and dense only)");
    app->callback([this] { run(); });
  }

  void run() const {
    const Problem p = problem.problem();
    RunConfig cfg;
    cfg.scheme = parse_scheme(scheme);
    cfg.epochs = k;
    cfg.eta = eta.resolve(p, k);
    cfg.x0 = problem.initial(p);
    cfg.seed = seed;
    cfg.couple_rng = couple;
    cfg.record_steps = record_steps;
    const Trajectory t = method == "closed-form" ? run_sgd_closed_form(p, cfg)
                         : method == "dense"     ? run_sgd_dense(p, cfg)
                                                 : run_sgd(p, cfg);
    for (const auto& w : t.warnings) std::cerr << "warning: " << w << '\n';
    if (!out.empty()) write_trajectory_csv(t, out);
    fmt::print("eta={:.17g}\nfinal_loss={:.17g}\n", cfg.eta, t.final_loss());
  }
};

struct SweepCmd {
  std::string plan_file;
  std::string construction = "ss";
  std::string scale = "desk";
  std::optional<std::size_t> seeds;
  std::string k_values;
  std::uint64_t seed_base = 0;
  bool couple = false;
  std::optional<double> fixed_eta;
  std::string out, summary, svg;
  std::size_t jobs = default_jobs();

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("sweep", "Run a (scheme, k, seed) sweep");
    app->add_option("--plan", plan_file, "Sweep plan JSON (other plan flags then only override)");
    app->add_option("--construction", construction, "ss or rr (rr runs the 2-D rr-fig1 instance)")
        ->capture_default_str()
        ->check(CLI::IsMember({"ss", "rr", "rr-fig1"}));
    app->add_option("--scale", scale, "Built-in plan: desk or paper")
        ->capture_default_str()
        ->check(CLI::IsMember({"desk", "paper"}));
    app->add_option_function<std::string>(
           "--seeds",
           [this](const std::string& s) { seeds = parse_count_list(s, "--seeds").at(0); },
           "Instantiations per (scheme, k)")
        ->type_name("UINT");
    app->add_option("--k-values", k_values, "Comma separated ascending epoch counts");
    app->add_option("--seed", seed_base, "Base seed")->capture_default_str();
    app->add_flag("--couple-rng", couple, "Share one random stream across schemes");
    app->add_option("--eta", fixed_eta, "Fixed step size instead of log(nk)/(lambda n k)");
    app->add_option("--out", out, "Records CSV path");
    app->add_option("--summary", summary, "Summaries CSV path");
    app->add_option("--svg", svg, "SVG plot path");
    add_count(app, "--jobs", jobs, "Worker threads (default: available cores)");
    app->callback([this] { run(); });
  }

  void run() const {
    SweepPlan plan;
    if (!plan_file.empty()) {
      plan = load_plan(plan_file);
    } else {
      const Construction c = parse_construction(construction);
      plan = scale == "paper" ? paper_plan(c) : desk_plan(c);
    }
    if (seeds) plan.seeds = *seeds;
    if (!k_values.empty()) plan.k_values = parse_count_list(k_values, "--k-values");
    if (plan_file.empty() || seed_base != 0) plan.seed_base = seed_base;
    if (couple) plan.couple_rng = true;
    if (fixed_eta) plan.eta_rule = EtaRule::fixed(*fixed_eta);
    if (scale == "paper" && plan_file.empty()) {
      std::cerr << "warning: --scale paper runs n = 500 and k up to 2000; this takes a while\n";
    }

    const SweepResult result = run_sweep(plan, jobs);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    const auto meta = sweep_metadata(plan, result);
    if (!out.empty()) emit_csv(result.records, out, meta);
    if (!summary.empty()) emit_csv(result.summaries, summary, meta);
    if (!svg.empty()) emit_svg(result.summaries, svg, {fmt::format("{} construction", to_string(plan.construction))});
    std::cout << summaries_to_csv(result.summaries);
  }
};

struct OracleCmd {
  std::string quantity;
  std::optional<double> eta_lmax;
  std::size_t m = 1;
  std::string method = "exact";
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool csv = false;
  std::string alphas, betas, perm;
  double delta = 0.05;
  std::size_t k = 1;
  ProblemFlags problem;
  EtaFlags eta;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("oracle", "Exact and Monte Carlo permutation expectations");
    app->add_option("--quantity", quantity,
                    "beta, perm-moment, sum-prod, stochastic-terms, deterministic-prod, xt-bound, "
                    "keyup, loss-ss, loss-rr or loss-wr")
        ->required()
        ->check(CLI::IsMember({"beta", "perm-moment", "sum-prod", "stochastic-terms", "deterministic-prod",
                               "xt-bound", "keyup", "loss-ss", "loss-rr", "loss-wr"}));
    // --n is shared with the problem flags below.
    problem.add(app, "appendix");
    app->add_option("--eta-lmax", eta_lmax, "eta * lambda_max for the pattern quantities");
    add_count(app, "--m", m, "Product length for perm-moment")->capture_default_str();
    app->add_option("--method", method, "exact, enum or mc (loss-ss / loss-rr)")
        ->capture_default_str()
        ->check(CLI::IsMember({"exact", "enum", "mc"}));
    add_count(app, "--samples", samples, "Monte Carlo samples (adds mc_mean, mc_se)");
    app->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
    app->add_flag("--csv", csv, "Print quantity,n,eta_lambda_max,exact,mc_mean,mc_se");
    app->add_option("--alphas", alphas, "keyup: comma separated alphas in [0,1]");
    app->add_option("--betas", betas, "keyup: comma separated betas in [-1,1] summing to 0");
    app->add_option("--perm", perm, "keyup: 0-based permutation; omitted means exact moments over all");
    app->add_option("--delta", delta, "Confidence parameter of the keyup envelope")->capture_default_str();
    add_count(app, "--k", k, "Epochs for xt-bound and loss-*")->capture_default_str();
    eta.add(app);
    app->callback([this] { run(); });
  }

  double alpha() const {
    if (!eta_lmax) throw UsageError(fmt::format("--quantity {} needs --eta-lmax", quantity));
    return *eta_lmax;
  }

  void print(OracleRow row) const {
    if (csv) {
      fmt::print("{}\n{}\n", kOracleCsvHeader, format_oracle_row(row));
    } else {
      fmt::print("{:.17g}\n", row.exact);
      if (row.has_mc) fmt::print("mc_mean={:.17g} mc_se={:.17g}\n", row.mc_mean, row.mc_se);
    }
  }

  void print_check(const LemmaCheck& c) const {
    OracleRow row{quantity, problem.n, alpha(), c.value};
    if (csv) {
      print(row);
    } else {
      fmt::print("{:.17g}\nbound={:.17g} applies={} holds={}\n", c.value, c.bound, c.bound_applies, c.holds);
    }
  }

  void run() const {
    // Pattern quantities use lambda_max = 1, so eta = eta_lmax.
    if (quantity == "beta") {
      OracleRow row{quantity, problem.n, alpha(), beta_exact(problem.n, alpha(), 1.0)};
      if (samples > 0) {
        const McEstimate mc = beta_monte_carlo(problem.n, alpha(), 1.0, samples, seed);
        row.has_mc = true;
        row.mc_mean = mc.mean;
        row.mc_se = mc.std_error;
      }
      print(row);
    } else if (quantity == "perm-moment") {
      const Rational r = perm_moment_formula(m, problem.n);
      if (csv) {
        print({quantity, problem.n, 0.0, r.value()});
      } else {
        fmt::print("{:.17g}\nrational={}/{}\n", r.value(), r.num(), r.den());
      }
    } else if (quantity == "sum-prod") {
      print_check(sum_prod_expectation_exact(problem.n, alpha(), 1.0));
    } else if (quantity == "stochastic-terms") {
      print_check(stochastic_terms_exact(problem.n, alpha(), 1.0));
    } else if (quantity == "deterministic-prod") {
      print_check(deterministic_prod(problem.n, alpha(), 1.0));
    } else if (quantity == "xt-bound") {
      print_check(xt_bound(problem.n, alpha(), 1.0, problem.grad_bound, k));
    } else if (quantity == "keyup") {
      run_keyup();
    } else {
      run_loss();
    }
  }

  void run_keyup() const {
    const std::vector<double> a = parse_list(alphas, "--alphas");
    const std::vector<double> b = parse_list(betas, "--betas");
    if (!perm.empty()) {
      const std::vector<std::size_t> p = parse_count_list(perm, "--perm");
      fmt::print("{:.17g}\n", keyup_quantity(a, b, p));
      return;
    }
    const KeyupMoments km = keyup_moments_exhaustive(a, b);
    const double env = keyup_envelope(a.size(), km.alpha_bar, delta);
    fmt::print("mean_abs={:.17g}\nmean_square={:.17g}\nalpha_bar={:.17g}\nenvelope={:.17g}\n", km.mean_abs,
               km.mean_square, km.alpha_bar, env);
  }

  void run_loss() const {
    const Problem p = problem.problem();
    const Vector x0 = problem.initial(p);
    const double e = eta.resolve(p, k);
    MomentMethod mm = MomentMethod::exact();
    if (method == "enum") mm = MomentMethod::enumeration();
    if (method == "mc") {
      if (samples < 2) throw UsageError("--method mc needs --samples >= 2");
      mm = MomentMethod::monte_carlo(samples, seed);
    }
    double value = 0.0;
    if (quantity == "loss-ss") {
      value = expected_loss_ss_exact(p, e, k, x0, mm);
    } else if (quantity == "loss-rr") {
      value = expected_loss_rr_analytic(p, e, k, x0, mm);
    } else {
      value = expected_loss_wr_analytic(p, e, k, x0);
    }
    print({quantity, p.size(), e * p.lambda_max(), value});
  }
};

struct BoundsCmd {
  std::size_t n = 500;
  std::string k_values = "100";
  double grad_bound = 1.0, lambda = 1.0, lambda_max = 200.0;
  double c = 1.0, c_log = 1.0, delta = 0.05, dimension = 1.0;
  bool logs = false;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("bounds", "Tabulate the rate calculators (shape-only constants)");
    add_count(app, "--n", n, "Number of components")->capture_default_str();
    app->add_option("--k", k_values, "Comma separated epoch counts")->capture_default_str();
    app->add_option("--G", grad_bound, "Gradient bound G")->capture_default_str();
    app->add_option("--lambda", lambda, "Strong convexity lambda")->capture_default_str();
    app->add_option("--lambda-max", lambda_max, "Largest mean curvature lambda_max")->capture_default_str();
    app->add_option("--c", c, "Constant for the lower bounds and the baseline")->capture_default_str();
    app->add_option("--c-log", c_log, "Constant for the upper bounds")->capture_default_str();
    app->add_option("--delta", delta, "Confidence for the high-probability single shuffling form")
        ->capture_default_str();
    app->add_option("--dimension-factor", dimension, "Multiplier for the upper bounds")->capture_default_str();
    app->add_flag("--logs", logs, "Multiply every rate by log^2(nk)");
    app->callback([this] { run(); });
  }

  void run() const {
    fmt::print("# crossover_epoch={:.17g} rr_phase_transition_epoch={:.17g}\n", crossover_epoch(lambda, lambda_max),
               rr_phase_transition_epoch(n, lambda, lambda_max));
    fmt::print("k");
    for (const TheoremId id : kAllTheorems) fmt::print(",{}", to_string(id));
    fmt::print(",SS-UPPER-HP\n");
    for (const std::size_t k : parse_count_list(k_values, "--k")) {
      const BoundInputs in{n, k, grad_bound, lambda, lambda_max, dimension};
      fmt::print("{}", k);
      for (const TheoremId id : kAllTheorems) {
        const bool upper = id == TheoremId::kSsUpper || id == TheoremId::kRrUpper;
        fmt::print(",{:.17g}", evaluate({id, upper ? c_log : c, logs}, in));
      }
      fmt::print(",{:.17g}\n", ss_upper_high_probability(n, k, grad_bound, lambda, lambda_max, delta, c));
    }
  }
};

struct VerifyCmd {
  std::string suite = "all";
  std::string calibration = SGDLAB_DEFAULT_CALIBRATION;
  std::string write_calibration;
  std::string computed_at = "sgdlab verify --write-calibration";
  std::uint64_t seed = 2024;
  std::string mutate;
  int* exit_code = nullptr;

  void add(CLI::App& root, int& code) {
    exit_code = &code;
    CLI::App* app = root.add_subcommand("verify", "Run invariant suites; exit 1 on any failure");
    app->add_option("--suite", suite, "lemmas, closed-form, conjugation, envelopes or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"lemmas", "closed-form", "conjugation", "envelopes", "all"}));
    app->add_option("--calibration", calibration, "Calibration JSON (empty: skip comparison)")
        ->capture_default_str();
    app->add_option("--write-calibration", write_calibration,
                    "Recompute the calibrated constants, write them here, then verify against them");
    app->add_option("--computed-at", computed_at, "Provenance label stored with written constants")
        ->capture_default_str();
    app->add_option("--seed", seed, "Seed for the randomized suites")->capture_default_str();
    // Mutation smoke test: a deliberately broken formula must make lemmas fail.
    app->add_option("--mutate", mutate)->group("")->check(CLI::IsMember({"perm-moment-sign"}));
    app->callback([this] { run(); });
  }

  void run() const {
    CalibrationTable table;
    VerifyOptions opt;
    opt.seed = seed;
    if (!write_calibration.empty()) {
      table = run_calibration(computed_at);
      save_calibration(table, write_calibration);
      std::cerr << "wrote " << write_calibration << '\n';
      opt.calibration = &table;
    } else if (!calibration.empty()) {
      if (fs::exists(calibration)) {
        table = load_calibration(calibration);
        opt.calibration = &table;
      } else {
        std::cerr << "warning: calibration file '" << calibration << "' not found; envelope ratios are "
                  << "checked for positivity only\n";
      }
    }
    if (mutate == "perm-moment-sign") {
      opt.hooks.perm_moment_formula = [](std::size_t m, std::size_t n) {
        return Rational(0) - perm_moment_formula(m, n);
      };
    }
    const VerifyReport report = run_verify(parse_suite(suite), opt);
    std::cout << report.to_text();
    *exit_code = report.all_passed() ? kExitOk : kExitRuntime;
  }
};

struct ReproduceCmd {
  std::string scale = "desk";
  std::string out_dir;
  std::uint64_t seed = 0;
  bool force = false;
  std::size_t jobs = default_jobs();
  std::optional<std::size_t> seeds;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "reproduce-fig1", "Sweep both constructions; write ss/rr records CSVs and SVG plots");
    app->add_option("--scale", scale, "desk (n=100, lambda_max=50) or paper (n=500, lambda_max=200)")
        ->capture_default_str()
        ->check(CLI::IsMember({"desk", "paper"}));
    app->add_option("--out-dir", out_dir, "Output directory")->required();
    app->add_option("--seed", seed, "Base seed")->capture_default_str();
    app->add_flag("--force", force, "Allow writing into a non-empty directory");
    add_count(app, "--jobs", jobs, "Worker threads (default: available cores)");
    app->add_option_function<std::string>(
           "--seeds", [this](const std::string& s) { seeds = parse_count_list(s, "--seeds").at(0); },
           "Instantiations per point (default 100)")
        ->type_name("UINT");
    app->callback([this] { run(); });
  }

  void run() const {
    if (fs::exists(out_dir) && !fs::is_directory(out_dir)) {
      throw UsageError(fmt::format("'{}' exists and is not a directory", out_dir));
    }
    if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force) {
      throw UsageError(fmt::format("'{}' is not empty; pass --force to overwrite", out_dir));
    }
    fs::create_directories(out_dir);
    if (scale == "paper") std::cerr << "warning: --scale paper runs n = 500 and k up to 2000; this takes a while\n";

    struct Panel {
      Construction construction;
      const char* tag;
      TheoremId lower;
    };
    for (const Panel panel : {Panel{Construction::kSingleShuffle, "ss", TheoremId::kSsLower},
                              Panel{Construction::kRandomReshuffle, "rr", TheoremId::kRrLower}}) {
      SweepPlan plan = scale == "paper" ? paper_plan(panel.construction) : desk_plan(panel.construction);
      plan.seed_base = seed;
      if (seeds) plan.seeds = *seeds;
      const SweepResult result = run_sweep(plan, jobs);
      for (const auto& w : result.warnings) std::cerr << "warning: " << panel.tag << ": " << w << '\n';

      const fs::path csv = fs::path(out_dir) / fmt::format("{}_records.csv", panel.tag);
      emit_csv(result.records, csv, sweep_metadata(plan, result));

      std::vector<SweepSummary> plotted = result.summaries;
      const auto own = select_series(result.summaries, panel.tag, 0, SIZE_MAX);
      const auto wr = select_series(result.summaries, "wr", 0, SIZE_MAX);
      const BoundSpec lower{panel.lower, fit_bound_constant(own, {panel.lower}, plan)};
      const BoundSpec base{TheoremId::kWrBaseline, fit_bound_constant(wr, {TheoremId::kWrBaseline}, plan)};
      for (const BoundSpec& spec : {lower, base}) {
        for (SweepSummary s : bound_curve(spec, plan)) {
          s.scheme += fmt::format(" (fitted c={:.3g})", spec.constant);
          plotted.push_back(std::move(s));
        }
      }
      const fs::path svg = fs::path(out_dir) / fmt::format("{}.svg", panel.tag);
      emit_svg(plotted, svg,
               {fmt::format("{} construction, n={}, lambda_max/lambda={:g}, {} seeds", panel.tag, plan.n,
                            plan.lambda_max / plan.lambda, plan.seeds)});

      fmt::print("# {} construction ({})\n", panel.tag, to_string(plan.construction));
      std::cout << summaries_to_csv(result.summaries);
      fmt::print("wrote {} and {}\n", csv.string(), svg.string());
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgdlab: with- and without-replacement SGD on commuting quadratics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  int code = kExitOk;
  SimulateCmd simulate;
  SweepCmd sweep;
  OracleCmd oracle;
  BoundsCmd bounds;
  VerifyCmd verify;
  ReproduceCmd reproduce;
  simulate.add(app);
  sweep.add(app);
  oracle.add(app);
  bounds.add(app);
  verify.add(app, code);
  reproduce.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    // Includes UsageError and library argument validation.
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return code;
}
