#include "sgdlab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "sgdlab/oracles.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {
namespace {

constexpr std::uint64_t kRandomFamilySeed = 20240611;
constexpr std::size_t kRandomInstancesPerN = 10;

struct Accumulator {
  EnvelopeRatios r;

  void add(std::size_t n, const KeyupMoments& m) {
    ++r.points;
    r.keyup_max = std::max(r.keyup_max, m.mean_square / keyup_envelope(n, m.alpha_bar, r.delta));
    const RandomVariableEnvelope env = random_variable_envelope(n, m.alpha_bar);
    if (env.small_regime) {
      r.rv_abs_small_max = std::max(r.rv_abs_small_max, m.mean_abs / env.abs_shape);
      r.rv_c2_max = std::max(r.rv_c2_max, m.mean_square / env.square_shape);
    } else {
      r.rv_c1_max = std::max(r.rv_c1_max, m.mean_abs / env.abs_shape);
      r.rv_c3_max = std::max(r.rv_c3_max, m.mean_square / env.square_shape);
    }
  }
};

}  // namespace

void CalibrationTable::set(CalibratedConstant c) {
  for (auto& existing : constants_) {
    if (existing.name == c.name) {
      existing = std::move(c);
      return;
    }
  }
  constants_.push_back(std::move(c));
}

const CalibratedConstant* CalibrationTable::find(std::string_view name) const {
  for (const auto& c : constants_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double CalibrationTable::value(std::string_view name) const {
  const CalibratedConstant* c = find(name);
  if (c == nullptr) throw std::out_of_range(fmt::format("no calibrated constant '{}'", name));
  return c->value;
}

std::vector<std::size_t> default_beta_grid_n() { return {4, 6, 8, 10, 12, 14, 16}; }

std::vector<double> default_beta_grid_alpha() { return {0.01, 0.05, 0.1, 0.25, 0.5, 1.0}; }

BetaSandwich beta_sandwich(const std::vector<std::size_t>& ns, const std::vector<double>& alphas) {
  BetaSandwich out{std::numeric_limits<double>::infinity(), 0.0, 0};
  for (const std::size_t n : ns) {
    for (const double alpha : alphas) {
      // eta = alpha with lambda_max = 1.
      const double ratio = beta_exact(n, alpha, 1.0) / beta_lower_envelope(n, alpha, 1.0);
      out.c_lo = std::min(out.c_lo, ratio);
      out.c_hi = std::max(out.c_hi, ratio);
      ++out.points;
    }
  }
  if (out.points == 0) throw std::invalid_argument("beta sandwich: empty grid");
  return out;
}

std::string beta_grid_description() {
  return "beta_exact / min{1+1/a, n^3 a^2}, n in {4,6,...,16}, a = eta*lambda_max in "
         "{0.01,0.05,0.1,0.25,0.5,1.0}";
}

std::string envelope_grid_description() {
  return fmt::format(
      "exact keyup moments: equal alphas a with +-1 betas and alphas a on half the items "
      "(n in {{4,...,16}} even, a in {{0.01,0.05,0.1,0.25,0.5,1.0}}); {} seeded random "
      "instances per n in {{4,...,8}} over all permutations (seed {})",
      kRandomInstancesPerN, kRandomFamilySeed);
}

EnvelopeRatios envelope_ratio_sweep(double delta) {
  Accumulator acc;
  acc.r.delta = delta;
  for (const std::size_t n : default_beta_grid_n()) {
    for (const double a : default_beta_grid_alpha()) {
      acc.add(n, keyup_moments_two_valued(n, n / 2, a, 1.0, a, -1.0));
      acc.add(n, keyup_moments_two_valued(n, n / 2, a, -1.0, 0.0, 1.0));
    }
  }

  Rng rng(kRandomFamilySeed);
  for (std::size_t n = 4; n <= 8; ++n) {
    for (std::size_t inst = 0; inst < kRandomInstancesPerN; ++inst) {
      std::vector<double> alphas(n), betas(n);
      // Every other instance is scaled into the n abar <= 1/2 regime.
      const double scale = inst % 2 == 0 ? 1.0 : 0.5 / static_cast<double>(n);
      for (auto& a : alphas) a = scale * (1.0 - rng.uniform01());
      for (auto& b : betas) b = 2.0 * rng.uniform01() - 1.0;
      double mean = 0.0;
      for (const double b : betas) mean += b / static_cast<double>(n);
      double peak = 0.0;
      for (auto& b : betas) {
        b -= mean;
        peak = std::max(peak, std::abs(b));
      }
      if (peak > 1.0) {
        for (auto& b : betas) b /= peak;
      }
      acc.add(n, keyup_moments_exhaustive(alphas, betas));
    }
  }
  return acc.r;
}

CalibrationTable run_calibration(const std::string& computed_at) {
  namespace names = calibration_names;
  CalibrationTable table;
  const BetaSandwich beta = beta_sandwich(default_beta_grid_n(), default_beta_grid_alpha());
  table.set({std::string(names::kBetaLo), beta.c_lo, beta_grid_description() + " (minimum)", computed_at});
  table.set({std::string(names::kBetaHi), beta.c_hi, beta_grid_description() + " (maximum)", computed_at});

  const EnvelopeRatios env = envelope_ratio_sweep();
  const std::string grid = envelope_grid_description();
  table.set({std::string(names::kKeyup), env.keyup_max,
             fmt::format("max E[X^2] / (log^2(8n/delta) min{{1/abar, n^3 abar^2}}), delta = {}; {}",
                         env.delta, grid),
             computed_at});
  table.set({std::string(names::kRvAbsSmall), env.rv_abs_small_max,
             "max E|X| / (2 n abar) where n abar <= 1/2; " + grid, computed_at});
  table.set({std::string(names::kRvC1), env.rv_c1_max,
             "max E|X| / (log(sqrt(2 abar) 8 n^2) / sqrt(abar)) where n abar > 1/2; " + grid,
             computed_at});
  table.set({std::string(names::kRvC2), env.rv_c2_max,
             "max E[X^2] / (log^2(8/(n abar)) n^3 abar^2) where n abar <= 1/2; " + grid,
             computed_at});
  table.set({std::string(names::kRvC3), env.rv_c3_max,
             "max E[X^2] / (log^2(8 n^2 abar^2) / abar) where n abar > 1/2; " + grid, computed_at});
  return table;
}

std::string calibration_to_json(const CalibrationTable& table) {
  // nlohmann::json objects keep keys sorted, so the output order is stable.
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& c : table.constants()) {
    doc[c.name] = {{"value", c.value},
                   {"grid_description", c.grid_description},
                   {"computed_at", c.computed_at}};
  }
  return doc.dump(2);
}

CalibrationTable calibration_from_json(std::string_view text) {
  CalibrationTable table;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw std::invalid_argument("calibration JSON: top level must be an object");
    for (const auto& [name, entry] : doc.items()) {
      table.set({name, entry.at("value").get<double>(),
                 entry.at("grid_description").get<std::string>(),
                 entry.at("computed_at").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("calibration JSON: {}", e.what()));
  }
  return table;
}

void save_calibration(const CalibrationTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << calibration_to_json(table) << '\n';
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

CalibrationTable load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return calibration_from_json(buffer.str());
}

}  // namespace sgdlab
