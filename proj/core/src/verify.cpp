#include "sgdlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "sgdlab/engine.hpp"
#include "sgdlab/model.hpp"
#include "sgdlab/moments.hpp"
#include "sgdlab/oracles.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {
namespace {

constexpr double kClosedFormTol = 1e-10;
constexpr double kConjugationPointTol = 1e-9;
constexpr double kConjugationLossTol = 1e-10;
constexpr double kCalibrationSlack = 1e-9;

class Recorder {
 public:
  Recorder(VerifyReport& report, std::string suite) : report_(report), suite_(std::move(suite)) {}

  void add(std::string name, bool passed, double measured, double limit, std::string detail = {}) {
    report_.checks.push_back({suite_, std::move(name), passed, measured, limit, std::move(detail)});
  }

 private:
  VerifyReport& report_;
  std::string suite_;
};

std::vector<std::size_t> even_sizes(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n += 2) out.push_back(n);
  return out;
}

void lemmas_suite(VerifyReport& report, const VerifyOptions& opt) {
  Recorder rec(report, "lemmas");
  const auto formula = opt.hooks.perm_moment_formula
                           ? opt.hooks.perm_moment_formula
                           : std::function<Rational(std::size_t, std::size_t)>(perm_moment_formula);

  for (const std::size_t n : even_sizes(2, 12)) {
    std::size_t mismatches = 0;
    std::string first;
    for (std::size_t m = 1; m < n; ++m) {
      const Rational expected = perm_moment_enumerated(m, n);
      const Rational got = formula(m, n);
      if (!(got == expected)) {
        if (mismatches++ == 0) {
          first = fmt::format("m={}: formula {}/{} vs enumeration {}/{}", m, got.num(), got.den(),
                              expected.num(), expected.den());
        }
      }
    }
    rec.add(fmt::format("prod_expect n={}", n), mismatches == 0, static_cast<double>(mismatches), 0.0,
            first);
  }

  const double scales[] = {0.1, 0.5, 1.0};
  for (const std::size_t n : even_sizes(2, 12)) {
    double worst_sum = -std::numeric_limits<double>::infinity();
    double worst_stoch = worst_sum;
    double worst_series = 0.0;
    for (const double s : scales) {
      const double eta = s / static_cast<double>(n);  // lambda_max = 1
      const LemmaCheck sp = sum_prod_expectation_exact(n, eta, 1.0);
      const LemmaCheck st = stochastic_terms_exact(n, eta, 1.0);
      worst_sum = std::max(worst_sum, sp.value - sp.bound);
      worst_stoch = std::max(worst_stoch, st.value - st.bound);
      worst_series = std::max(worst_series,
                              std::abs(sum_prod_expectation_series(n, eta, 1.0) - sp.value));
    }
    rec.add(fmt::format("sum_prod_expect n={}", n), worst_sum <= 0.0, worst_sum, 0.0,
            "max over eta of value - (-eta lambda_max n / 8)");
    rec.add(fmt::format("stochastic_terms n={}", n), worst_stoch <= 0.0, worst_stoch, 0.0,
            "max over eta of value - (-eta lambda_max n / 16)");
    rec.add(fmt::format("sum_prod_series n={}", n), worst_series <= 1e-12, worst_series, 1e-12,
            "|series - enumeration|");
  }

  double worst_prod = -std::numeric_limits<double>::infinity();
  bool prod_ok = true;
  double worst_xt = -std::numeric_limits<double>::infinity();
  bool xt_ok = true;
  for (const std::size_t n : {2, 4, 8, 12, 16, 50, 100}) {
    for (const double s : scales) {
      const double eta = s / static_cast<double>(n);
      const LemmaCheck dp = deterministic_prod(n, eta, 1.0);
      prod_ok = prod_ok && dp.holds;
      worst_prod = std::max(worst_prod, dp.bound - dp.value);
      for (const std::size_t k : {1, 5, 20}) {
        const LemmaCheck xb = xt_bound(n, eta, 1.0, 1.0, k);
        xt_ok = xt_ok && xb.holds;
        worst_xt = std::max(worst_xt, xb.value - xb.bound);
      }
    }
  }
  rec.add("deterministic_prod", prod_ok, worst_prod, 0.0, "max of (1 - alpha n/2) - prod, bound >= 1/2");
  rec.add("xt_bound", xt_ok, worst_xt, 0.0, "max of E[x_k] - bound, k in {1,5,20}");

  double worst_rev = 0.0;
  for (const std::size_t n : even_sizes(2, 16)) {
    for (const double a : {0.01, 0.1, 0.5, 1.0}) {
      worst_rev = std::max(worst_rev, std::abs(beta_exact(n, a, 1.0) - beta_exact_reversed(n, a, 1.0)));
    }
  }
  rec.add("beta_reversal", worst_rev <= 1e-12, worst_rev, 1e-12, "|beta - beta reversed|");
}

Problem random_problem(Rng& rng, std::size_t n, std::size_t d) {
  const double smooth_l = 0.5 + 4.5 * rng.uniform01();
  std::vector<Component> comps(n, Component{Vector(static_cast<Eigen::Index>(d)),
                                            Vector(static_cast<Eigen::Index>(d))});
  for (auto& c : comps) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      c.curvatures(jj) = smooth_l * rng.uniform01();
      c.linear(jj) = 2.0 * rng.uniform01() - 1.0;
    }
  }
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(d));
  for (const auto& c : comps) mean += c.curvatures / static_cast<double>(n);
  return Problem(std::move(comps), {mean.minCoeff(), mean.maxCoeff(), smooth_l, 1.0});
}

Vector random_vector(Rng& rng, std::size_t d, double scale) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = scale * (2.0 * rng.uniform01() - 1.0);
  return v;
}

Scheme random_scheme(Rng& rng) { return kAllSchemes[rng.uniform_below(3)]; }

void closed_form_suite(VerifyReport& report, const VerifyOptions& opt) {
  Recorder rec(report, "closed-form");
  Rng rng(derive_seed(opt.seed, 101));
  double worst = 0.0;
  std::string where;
  std::size_t order_mismatches = 0;
  for (std::size_t inst = 0; inst < opt.closed_form_instances; ++inst) {
    const std::size_t n = 2 + rng.uniform_below(7);
    const std::size_t d = 1 + rng.uniform_below(3);
    const Problem p = random_problem(rng, n, d);
    RunConfig cfg;
    cfg.scheme = random_scheme(rng);
    cfg.epochs = 1 + rng.uniform_below(5);
    cfg.eta = (1.0 - rng.uniform01()) / p.smooth_l();
    cfg.x0 = random_vector(rng, d, 3.0);
    cfg.seed = rng.next();

    std::vector<std::vector<std::size_t>> orders_it, orders_cf;
    const Trajectory it = run_sgd(p, cfg, [&](std::size_t, std::span<const std::size_t> o) {
      orders_it.emplace_back(o.begin(), o.end());
    });
    const Trajectory cf = run_sgd_closed_form(p, cfg, [&](std::size_t, std::span<const std::size_t> o) {
      orders_cf.emplace_back(o.begin(), o.end());
    });
    if (orders_it != orders_cf) ++order_mismatches;
    for (std::size_t t = 0; t < it.points.size(); ++t) {
      const double scale = it.points[t].norm();
      const double diff = (cf.points[t] - it.points[t]).norm();
      const double rel = scale > 0.0 ? diff / scale : diff;
      if (rel > worst) {
        worst = rel;
        where = fmt::format("instance {} ({}, n={}, d={}, k={}, epoch {})", inst,
                            to_string(cfg.scheme), n, d, cfg.epochs, t + 1);
      }
    }
  }
  rec.add("epoch_map_vs_steps", worst <= kClosedFormTol, worst, kClosedFormTol,
          fmt::format("{} instances, max relative point discrepancy at {}", opt.closed_form_instances,
                      where));
  rec.add("shared_orders", order_mismatches == 0, static_cast<double>(order_mismatches), 0.0,
          "instances whose epoch orders differ between the two paths");
}

void conjugation_suite(VerifyReport& report, const VerifyOptions& opt) {
  Recorder rec(report, "conjugation");
  Rng rng(derive_seed(opt.seed, 202));
  const Construction constructions[] = {Construction::kSingleShuffle, Construction::kRandomReshuffle,
                                        Construction::kRandomReshuffleFig1};
  double worst_point = 0.0, worst_loss = 0.0;
  std::size_t order_mismatches = 0;
  for (std::size_t r = 0; r < opt.conjugation_rotations; ++r) {
    for (const Construction c : constructions) {
      const std::size_t n = 2 * (1 + rng.uniform_below(5));
      // The rr constructions put mean curvature lambda_max / 2 on one coordinate.
      const double lambda_max = 2.0 + 48.0 * rng.uniform01();
      const Problem p = build_construction(c, n, 1.0, 1.0, lambda_max);
      const std::size_t d = p.dim();
      const double two_pi = 2.0 * std::numbers::pi;
      const Matrix o = d == 2 ? rotation_2d(two_pi * rng.uniform01())
                              : rotation_3d(two_pi * rng.uniform01(), two_pi * rng.uniform01(),
                                            two_pi * rng.uniform01());
      const Problem rotated = conjugate(p, o);

      RunConfig cfg;
      cfg.scheme = random_scheme(rng);
      cfg.epochs = 1 + rng.uniform_below(5);
      cfg.eta = (1.0 - rng.uniform01()) / p.smooth_l();
      cfg.x0 = random_vector(rng, d, 1.0);
      cfg.seed = rng.next();
      RunConfig rotated_cfg = cfg;
      rotated_cfg.x0 = o * cfg.x0;

      std::vector<std::vector<std::size_t>> orders, rotated_orders;
      const Trajectory base = run_sgd(p, cfg, [&](std::size_t, std::span<const std::size_t> ord) {
        orders.emplace_back(ord.begin(), ord.end());
      });
      const Trajectory dense =
          run_sgd_dense(rotated, rotated_cfg, [&](std::size_t, std::span<const std::size_t> ord) {
            rotated_orders.emplace_back(ord.begin(), ord.end());
          });
      if (orders != rotated_orders) ++order_mismatches;
      for (std::size_t t = 0; t < base.points.size(); ++t) {
        const Vector& x = base.points[t];
        worst_point = std::max(worst_point, (dense.points[t] - o * x).norm() / (1.0 + x.norm()));
        const double f = base.losses[t];
        const double diff = std::abs(dense.losses[t] - f);
        worst_loss = std::max(worst_loss, f != 0.0 ? diff / std::abs(f) : diff);
      }
    }
  }
  const std::string runs = fmt::format("{} rotations x 3 constructions", opt.conjugation_rotations);
  rec.add("points", worst_point <= kConjugationPointTol, worst_point, kConjugationPointTol,
          runs + ", max ||x~_t - O x_t|| / (1 + ||x_t||)");
  rec.add("losses", worst_loss <= kConjugationLossTol, worst_loss, kConjugationLossTol,
          runs + ", max relative loss difference");
  rec.add("shared_orders", order_mismatches == 0, static_cast<double>(order_mismatches), 0.0,
          "runs whose epoch orders differ");
}

void compare_upper(Recorder& rec, const VerifyOptions& opt, std::string_view name, double measured,
                   const char* what) {
  if (opt.calibration == nullptr) {
    rec.add(std::string(name), std::isfinite(measured) && measured > 0.0, measured, 0.0,
            fmt::format("{}; no calibration table supplied", what));
    return;
  }
  const CalibratedConstant* c = opt.calibration->find(name);
  if (c == nullptr) {
    rec.add(std::string(name), false, measured, 0.0, "missing from calibration table");
    return;
  }
  rec.add(std::string(name), measured <= c->value * (1.0 + kCalibrationSlack), measured, c->value,
          fmt::format("{} <= calibrated constant", what));
}

void envelopes_suite(VerifyReport& report, const VerifyOptions& opt) {
  Recorder rec(report, "envelopes");
  namespace names = calibration_names;
  const BetaSandwich beta = beta_sandwich(default_beta_grid_n(), default_beta_grid_alpha());
  const bool positive = beta.c_lo > 0.0 && std::isfinite(beta.c_hi);
  if (opt.calibration == nullptr) {
    rec.add("beta_sandwich", positive, beta.c_lo, beta.c_hi,
            fmt::format("{} grid points, measured [c_lo, c_hi]; no calibration table supplied", beta.points));
  } else {
    const CalibratedConstant* lo = opt.calibration->find(names::kBetaLo);
    const CalibratedConstant* hi = opt.calibration->find(names::kBetaHi);
    const bool have = lo != nullptr && hi != nullptr;
    const bool inside = have && beta.c_lo >= lo->value * (1.0 - kCalibrationSlack) &&
                        beta.c_hi <= hi->value * (1.0 + kCalibrationSlack);
    rec.add("beta_sandwich", positive && inside, beta.c_lo, have ? lo->value : 0.0,
            have ? fmt::format("{} grid points; measured [{:.6g}, {:.6g}] within calibrated [{:.6g}, {:.6g}]",
                               beta.points, beta.c_lo, beta.c_hi, lo->value, hi->value)
                 : std::string("beta constants missing from calibration table"));
  }

  const EnvelopeRatios env = envelope_ratio_sweep();
  compare_upper(rec, opt, names::kKeyup, env.keyup_max, "max E[X^2] / keyup envelope");
  compare_upper(rec, opt, names::kRvC1, env.rv_c1_max, "max E|X| / c1 shape");
  compare_upper(rec, opt, names::kRvC2, env.rv_c2_max, "max E[X^2] / c2 shape");
  compare_upper(rec, opt, names::kRvC3, env.rv_c3_max, "max E[X^2] / c3 shape");
  rec.add("rv_abs_small_explicit", env.rv_abs_small_max <= 1.0, env.rv_abs_small_max, 1.0,
          "E|X| <= 2 n abar where n abar <= 1/2 (explicit, no constant)");

  double worst_dp = 0.0;
  for (const std::size_t n : even_sizes(2, 16)) {
    for (const double a : default_beta_grid_alpha()) {
      const double e = beta_exact(n, a, 1.0);
      worst_dp = std::max(worst_dp, std::abs(beta_two_valued(n, a, 1.0) - e) / std::max(e, 1e-300));
    }
  }
  rec.add("beta_program_vs_enumeration", worst_dp <= 1e-12, worst_dp, 1e-12,
          "relative difference of the moment program and enumeration");

  const McEstimate mc = beta_monte_carlo(4, 0.3, 1.0, 200000, derive_seed(opt.seed, 303));
  const double exact = beta_exact(4, 0.3, 1.0);
  const double z = std::abs(mc.mean - exact) / mc.std_error;
  rec.add("beta_monte_carlo n=4", z <= 4.0, z, 4.0,
          fmt::format("|MC - exact| / SE with {} samples", mc.samples));
}

}  // namespace

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::kLemmas: return "lemmas";
    case Suite::kClosedForm: return "closed-form";
    case Suite::kConjugation: return "conjugation";
    case Suite::kEnvelopes: return "envelopes";
    case Suite::kAll: return "all";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (const Suite s : {Suite::kLemmas, Suite::kClosedForm, Suite::kConjugation, Suite::kEnvelopes,
                        Suite::kAll}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument(fmt::format("unknown suite '{}'", name));
}

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

std::string VerifyReport::to_text() const {
  std::string out;
  for (const auto& c : checks) {
    out += fmt::format("{} {}/{} measured={:.6g} limit={:.6g}{}{}\n", c.passed ? "PASS" : "FAIL",
                       c.suite, c.name, c.measured, c.limit, c.detail.empty() ? "" : "  ", c.detail);
  }
  out += fmt::format("{} checks, {} failed\n", checks.size(), failures());
  return out;
}

VerifyReport run_verify(Suite suite, const VerifyOptions& options) {
  VerifyReport report;
  const bool all = suite == Suite::kAll;
  if (all || suite == Suite::kLemmas) lemmas_suite(report, options);
  if (all || suite == Suite::kClosedForm) closed_form_suite(report, options);
  if (all || suite == Suite::kConjugation) conjugation_suite(report, options);
  if (all || suite == Suite::kEnvelopes) envelopes_suite(report, options);
  return report;
}

}  // namespace sgdlab
