// Acceptance criteria, one PASS/FAIL line each. Exit status is 1 when any
// criterion fails.

#include <fmt/core.h>
#include <sys/wait.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sgdlab/sgdlab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sgdlab;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Context {
  std::string cli;
  fs::path calibration;
  fs::path work_dir;
  std::uint64_t seed = 7;
  std::size_t mc_runs = 20000;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::size_t> even_sizes(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n += 2) out.push_back(n);
  return out;
}

// 1. Exact rational identity for the permutation moment.
Outcome permutation_moment_identity(const Context&) {
  std::size_t cases = 0, bad = 0;
  for (const std::size_t n : even_sizes(2, 12)) {
    for (std::size_t m = 1; m < n; ++m) {
      ++cases;
      const Rational enumerated = perm_moment_enumerated(m, n);
      // Independent evaluation of 1/2 C(n/2-1, m-1) / C(n-1, m).
      const Rational expected(static_cast<std::int64_t>(binomial(n / 2 - 1, m - 1)),
                              static_cast<std::int64_t>(2 * binomial(n - 1, m)));
      if (!(enumerated == expected)) ++bad;
    }
  }
  return {bad == 0, fmt::format("{} (n, m) pairs, {} mismatches", cases, bad)};
}

// 2. Sum-product and stochastic-term inequalities.
Outcome lemma_inequalities(const Context&) {
  std::size_t cases = 0, bad = 0;
  double worst_sum = -std::numeric_limits<double>::infinity();
  double worst_stoch = worst_sum;
  const double lambda_max = 3.0;
  for (const std::size_t n : even_sizes(2, 12)) {
    for (const double scale : {0.1, 0.5, 1.0}) {
      const double eta = scale / (lambda_max * static_cast<double>(n));
      const double alpha_n = eta * lambda_max * static_cast<double>(n);
      const LemmaCheck s = sum_prod_expectation_exact(n, eta, lambda_max);
      const LemmaCheck t = stochastic_terms_exact(n, eta, lambda_max);
      ++cases;
      // Margins against the stated bounds, computed here rather than read
      // from the LemmaCheck.
      worst_sum = std::max(worst_sum, s.value + alpha_n / 8);
      worst_stoch = std::max(worst_stoch, t.value + alpha_n / 16);
      if (s.value > -alpha_n / 8 || t.value > -alpha_n / 16) ++bad;
    }
  }
  return {bad == 0, fmt::format("{} (n, eta) points; max value - bound: sum_prod {:.3g}, stochastic {:.3g}", cases,
                                worst_sum, worst_stoch)};
}

Vector random_vector(Rng& rng, Eigen::Index d, double scale) {
  Vector v(d);
  for (auto& x : v) x = scale * (2 * rng.uniform01() - 1);
  return v;
}

// 3. Closed form against step-by-step iteration.
Outcome closed_form_equivalence(const Context& ctx) {
  Rng rng(derive_seed(ctx.seed, 3));
  double worst = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 2 + rng.uniform_below(7);
    const auto d = static_cast<Eigen::Index>(1 + rng.uniform_below(3));
    const double l = 0.5 + 9.5 * rng.uniform01();
    std::vector<Component> comps;
    Vector mean = Vector::Zero(d);
    for (std::size_t i = 0; i < n; ++i) {
      Vector a(d);
      for (auto& x : a) x = l * rng.uniform01();
      comps.push_back({a, random_vector(rng, d, 2.0)});
      mean += a / static_cast<double>(n);
    }
    const Problem p(std::move(comps), {mean.minCoeff(), mean.maxCoeff(), l, 1.0});
    RunConfig cfg;
    cfg.scheme = kAllSchemes[rng.uniform_below(3)];
    cfg.epochs = 1 + rng.uniform_below(5);
    cfg.eta = (1 - rng.uniform01()) / l;
    cfg.x0 = random_vector(rng, d, 5.0);
    cfg.seed = rng.next();
    const Trajectory it = run_sgd(p, cfg), cf = run_sgd_closed_form(p, cfg);
    if (it.points.size() != cf.points.size()) return {false, fmt::format("instance {}: lengths differ", inst)};
    for (std::size_t t = 0; t < it.points.size(); ++t) {
      const double scale = std::max(it.points[t].norm(), std::numeric_limits<double>::min());
      worst = std::max(worst, (it.points[t] - cf.points[t]).norm() / scale);
    }
  }
  return {worst <= 1e-10, fmt::format("1000 instances, max relative discrepancy {:.3g} (limit 1e-10)", worst)};
}

// 4. Rotated problems track rotated trajectories under shared permutations.
Outcome conjugation_equivariance(const Context& ctx) {
  Rng rng(derive_seed(ctx.seed, 4));
  double worst_point = 0.0, worst_loss = 0.0;
  std::size_t order_mismatch = 0;
  const double two_pi = 2 * std::numbers::pi;
  for (int r = 0; r < 100; ++r) {
    for (const Construction c : {Construction::kSingleShuffle, Construction::kRandomReshuffle}) {
      const std::size_t n = 2 * (1 + rng.uniform_below(6));
      const double lambda_max = 2 + 30 * rng.uniform01();
      const Problem p = build_construction(c, n, 1.0, 1.0, lambda_max);
      const auto d = static_cast<Eigen::Index>(p.dim());
      const Matrix o = d == 2 ? rotation_2d(two_pi * rng.uniform01())
                              : rotation_3d(two_pi * rng.uniform01(), two_pi * rng.uniform01(), two_pi * rng.uniform01());
      const Problem q = conjugate(p, o);
      RunConfig cfg;
      cfg.scheme = kAllSchemes[rng.uniform_below(3)];
      cfg.epochs = 1 + rng.uniform_below(4);
      cfg.eta = (1 - rng.uniform01()) / p.smooth_l();
      cfg.x0 = random_vector(rng, d, 2.0);
      cfg.seed = rng.next();
      RunConfig qcfg = cfg;
      qcfg.x0 = o * cfg.x0;
      std::vector<std::vector<std::size_t>> po, qo;
      const Trajectory a = run_sgd(p, cfg, [&](std::size_t, std::span<const std::size_t> s) {
        po.emplace_back(s.begin(), s.end());
      });
      const Trajectory b = run_sgd_dense(q, qcfg, [&](std::size_t, std::span<const std::size_t> s) {
        qo.emplace_back(s.begin(), s.end());
      });
      if (po != qo) ++order_mismatch;
      for (std::size_t t = 0; t < a.points.size(); ++t) {
        worst_point = std::max(worst_point, (b.points[t] - o * a.points[t]).norm() / (1 + a.points[t].norm()));
        const double f = a.losses[t];
        worst_loss = std::max(worst_loss, f == 0 ? std::abs(b.losses[t]) : std::abs(b.losses[t] - f) / std::abs(f));
      }
    }
  }
  return {worst_point <= 1e-9 && worst_loss <= 1e-10 && order_mismatch == 0,
          fmt::format("200 runs, max point error {:.3g} (1e-9), max relative loss error {:.3g} (1e-10), {} order "
                      "mismatches",
                      worst_point, worst_loss, order_mismatch)};
}

// 5. Beta ratios against the shipped calibration.
Outcome beta_sandwich_check(const Context& ctx) {
  const CalibrationTable cal = load_calibration(ctx.calibration);
  const double lo = cal.value(calibration_names::kBetaLo), hi = cal.value(calibration_names::kBetaHi);
  double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  for (const std::size_t n : even_sizes(4, 16)) {
    for (const double a : {0.01, 0.05, 0.1, 0.25, 0.5, 1.0}) {
      const double shape = std::min(1 + 1 / a, std::pow(static_cast<double>(n), 3) * a * a);
      const double r = beta_exact(n, a, 1.0) / shape;
      min_ratio = std::min(min_ratio, r);
      max_ratio = std::max(max_ratio, r);
    }
  }
  const double tol = 1e-12;
  const bool inside = min_ratio >= lo * (1 - tol) && max_ratio <= hi * (1 + tol);
  const bool recorded = std::abs(min_ratio - lo) <= tol * lo && std::abs(max_ratio - hi) <= tol * hi;
  return {lo > 0 && std::isfinite(hi) && inside && recorded,
          fmt::format("ratios in [{:.6g}, {:.6g}], calibrated [c_lo, c_hi] = [{:.6g}, {:.6g}]", min_ratio, max_ratio, lo,
                      hi)};
}

// 6. Analytic expected loss against Monte Carlo means.
Outcome analytic_vs_monte_carlo(const Context& ctx) {
  const std::size_t n = 10, k = 5;
  const double G = 1, lambda = 1, lambda_max = 10;
  const Problem p = build_rr_construction(n, G, lambda, lambda_max);
  const Vector x0 = initial_point(Construction::kRandomReshuffle, X0Preset::kAppendix, G, lambda, lambda_max);
  const double eta = recommended_eta(n, k, lambda);
  std::string detail = fmt::format("eta={:.6g}, eta*L={:.3g}, {} runs;", eta, eta * p.smooth_l(), ctx.mc_runs);
  bool ok = true;
  for (const Scheme s : {Scheme::kRandomReshuffle, Scheme::kSingleShuffle}) {
    const double analytic =
        s == Scheme::kRandomReshuffle ? expected_loss_rr_analytic(p, eta, k, x0) : expected_loss_ss_exact(p, eta, k, x0);
    double sum = 0, sq = 0;
    for (std::size_t r = 0; r < ctx.mc_runs; ++r) {
      RunConfig cfg{s, eta, k, x0, derive_seed(ctx.seed * 1000 + 6, r)};
      const double f = run_sgd(p, cfg).final_loss();
      sum += f;
      sq += f * f;
    }
    const double m = static_cast<double>(ctx.mc_runs);
    const double mean = sum / m;
    const double se = std::sqrt(std::max(0.0, sq / m - mean * mean) / (m - 1));
    const double z = std::abs(mean - analytic) / se;
    ok = ok && z <= 3.0;
    detail += fmt::format(" {}: analytic {:.6g} mc {:.6g} +- {:.3g} (z={:.2f});", to_string(s), analytic, mean, se, z);
  }
  return {ok, detail};
}

struct Panel {
  // scheme -> k -> final losses
  std::map<std::string, std::map<std::size_t, std::vector<double>>> losses;

  double mean(const std::string& s, std::size_t k) const {
    const auto& v = losses.at(s).at(k);
    double sum = 0;
    for (const double x : v) sum += x;
    return sum / static_cast<double>(v.size());
  }
  double mean_log10(const std::string& s, std::size_t k) const {
    const auto& v = losses.at(s).at(k);
    double sum = 0;
    for (const double x : v) sum += std::log10(std::max(x, 1e-300));
    return sum / static_cast<double>(v.size());
  }
  // OLS slope of mean log10 loss against log10 k over [lo, hi].
  double slope(const std::string& s, std::size_t lo, std::size_t hi) const {
    std::vector<double> xs, ys;
    for (const auto& [k, v] : losses.at(s)) {
      if (k < lo || k > hi) continue;
      xs.push_back(std::log10(static_cast<double>(k)));
      ys.push_back(mean_log10(s, k));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    return sxy / sxx;
  }
};

// Plain reader for scheme,k,seed,final_loss,log10_loss; independent of the
// library parser.
Panel read_panel(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Panel p;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string scheme, k, seed, loss;
    std::getline(ss, scheme, ',');
    std::getline(ss, k, ',');
    std::getline(ss, seed, ',');
    std::getline(ss, loss, ',');
    p.losses[scheme][std::stoul(k)].push_back(std::stod(loss));
  }
  return p;
}

std::string reproduce(const Context& ctx, const std::string& name) {
  const fs::path dir = ctx.work_dir / name;
  fs::remove_all(dir);
  const int rc = shell(fmt::format("\"{}\" reproduce-fig1 --scale desk --seed {} --out-dir \"{}\" > \"{}.log\" 2>&1",
                                   ctx.cli, ctx.seed, dir.string(), dir.string()));
  if (rc != 0) throw std::runtime_error(fmt::format("reproduce-fig1 exited with {}", rc));
  return dir.string();
}

struct PanelChecks {
  bool a = false, b = false, c = false, d = false;
  std::string detail;
};

PanelChecks check_panel(const Panel& p) {
  PanelChecks r;
  r.a = true;
  for (const std::size_t k : {10u, 25u}) {
    for (const char* s : {"ss", "rr"}) {
      const double ratio = p.mean(s, k) / p.mean("wr", k);
      r.a = r.a && ratio >= 0.5 && ratio <= 2.0;
      r.detail += fmt::format("{}/wr@{}={:.3f} ", s, k, ratio);
    }
  }
  const double wr_slope = p.slope("wr", 50, 400), ss_slope = p.slope("ss", 100, 400);
  r.b = wr_slope >= -1.3 && wr_slope <= -0.7;
  r.c = ss_slope <= -1.5;
  r.detail += fmt::format("wr slope[50,400]={:.3f} ss slope[100,400]={:.3f} ", wr_slope, ss_slope);
  const double ss400 = p.mean("ss", 400) / p.mean("wr", 400), rr400 = p.mean("rr", 400) / p.mean("wr", 400);
  r.d = ss400 <= 0.5 && rr400 <= 0.5;
  r.detail += fmt::format("ss/wr@400={:.3f} rr/wr@400={:.3f}", ss400, rr400);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  CLI::App app{"sgdlab acceptance suite"};
  app.add_option("--cli", ctx.cli, "Path to the sgdlab executable")->required();
  std::string calibration, work_dir;
  app.add_option("--calibration", calibration, "Calibration JSON")->required();
  app.add_option("--work-dir", work_dir, "Scratch directory")->required();
  app.add_option("--seed", ctx.seed, "Seed for randomized criteria and reproduce-fig1");
  app.add_option("--mc-runs", ctx.mc_runs, "Monte Carlo runs per scheme for criterion 6");
  CLI11_PARSE(app, argc, argv);
  ctx.calibration = calibration;
  ctx.work_dir = work_dir;
  fs::create_directories(ctx.work_dir);

  int failures = 0;
  const auto report = [&](int id, const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget_s) {
      o.passed = false;
      o.detail += fmt::format(" [over runtime budget {} s]", budget_s);
    }
    if (!o.passed) ++failures;
    fmt::print("{} {} {} ({:.2f} s): {}\n", o.passed ? "PASS" : "FAIL", id, name, secs, o.detail);
    std::fflush(stdout);
  };

  report(1, "permutation-moment identity", 1.0, [&] { return permutation_moment_identity(ctx); });
  report(2, "sum-product and stochastic-term inequalities", 1.0, [&] { return lemma_inequalities(ctx); });
  report(3, "closed-form/iterative equivalence", 5.0, [&] { return closed_form_equivalence(ctx); });
  report(4, "conjugation equivariance", 5.0, [&] { return conjugation_equivariance(ctx); });
  report(5, "beta sandwich", 10.0, [&] { return beta_sandwich_check(ctx); });
  report(6, "analytic vs Monte Carlo expected loss", 60.0, [&] { return analytic_vs_monte_carlo(ctx); });

  // Criteria 7 and 8 share the two reproduce-fig1 runs.
  std::string first, second;
  report(7, "desk-scale reproduction (ss construction)", 600.0, [&] {
    first = reproduce(ctx, "run1");
    const PanelChecks c = check_panel(read_panel(fs::path(first) / "ss_records.csv"));
    const PanelChecks rr = check_panel(read_panel(fs::path(first) / "rr_records.csv"));
    fmt::print("INFO 7 rr-fig1 panel: a={} b={} c={} d={} {}\n", rr.a, rr.b, rr.c, rr.d, rr.detail);
    return Outcome{c.a && c.b && c.c && c.d,
                   fmt::format("a={} b={} c={} d={} {}", c.a, c.b, c.c, c.d, c.detail)};
  });
  report(8, "determinism", 600.0, [&] {
    if (first.empty()) first = reproduce(ctx, "run1");
    second = reproduce(ctx, "run2");
    bool same = true;
    std::string detail;
    for (const char* f : {"ss_records.csv", "rr_records.csv"}) {
      const std::string a = slurp(fs::path(first) / f), b = slurp(fs::path(second) / f);
      const bool eq = !a.empty() && a == b;
      same = same && eq;
      detail += fmt::format("{} {} bytes {} ", f, a.size(), eq ? "identical" : "DIFFER");
    }
    return Outcome{same, detail};
  });

  fmt::print("{} of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
