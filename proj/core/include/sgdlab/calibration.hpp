#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sgdlab {

// Numeric stand-ins for unnamed universal constants. Each value is the extreme
// ratio of an exact quantity to its envelope shape over a fixed grid, so it is
// the smallest (or largest) constant consistent with that grid and nothing
// more.
struct CalibratedConstant {
  std::string name;
  double value = 0.0;
  std::string grid_description;
  std::string computed_at;
};

class CalibrationTable {
 public:
  // Replaces an entry with the same name.
  void set(CalibratedConstant c);
  const CalibratedConstant* find(std::string_view name) const;
  // Throws std::out_of_range when missing.
  double value(std::string_view name) const;
  const std::vector<CalibratedConstant>& constants() const { return constants_; }

 private:
  std::vector<CalibratedConstant> constants_;
};

// Names written by run_calibration.
namespace calibration_names {
inline constexpr std::string_view kBetaLo = "beta_envelope_c_lo";
inline constexpr std::string_view kBetaHi = "beta_envelope_c_hi";
inline constexpr std::string_view kKeyup = "keyup_c";
inline constexpr std::string_view kRvAbsSmall = "rv_abs_small_ratio";
inline constexpr std::string_view kRvC1 = "rv_c1";
inline constexpr std::string_view kRvC2 = "rv_c2";
inline constexpr std::string_view kRvC3 = "rv_c3";
}  // namespace calibration_names

// beta_exact / min{1 + 1/alpha, n^3 alpha^2} over n in `ns`, alpha in `alphas`.
struct BetaSandwich {
  double c_lo = 0.0;
  double c_hi = 0.0;
  std::size_t points = 0;
};

std::vector<std::size_t> default_beta_grid_n();     // 4, 6, ..., 16
std::vector<double> default_beta_grid_alpha();      // 0.01, 0.05, 0.1, 0.25, 0.5, 1.0
BetaSandwich beta_sandwich(const std::vector<std::size_t>& ns, const std::vector<double>& alphas);

// Exact keyup moments against the keyup and two-regime envelopes on three
// families: equal alphas with balanced +-1 betas, alphas on half the items
// with balanced betas, and seeded random instances with n <= 8 enumerated over
// all permutations. Each field is the maximum ratio over the family union;
// ratios of a regime with no grid points are 0.
struct EnvelopeRatios {
  double keyup_max = 0.0;        // E[X^2] / keyup_envelope(n, abar, delta)
  double rv_abs_small_max = 0.0; // E|X| / (2 n abar), n abar <= 1/2
  double rv_c1_max = 0.0;        // E|X| / abs_shape, n abar > 1/2
  double rv_c2_max = 0.0;        // E[X^2] / square_shape, n abar <= 1/2
  double rv_c3_max = 0.0;        // E[X^2] / square_shape, n abar > 1/2
  std::size_t points = 0;
  double delta = 0.05;
};

EnvelopeRatios envelope_ratio_sweep(double delta = 0.05);

std::string beta_grid_description();
std::string envelope_grid_description();

// Runs both sweeps and labels every entry with `computed_at`.
CalibrationTable run_calibration(const std::string& computed_at);

// JSON {name: {value, grid_description, computed_at}}, names sorted.
std::string calibration_to_json(const CalibrationTable& table);
CalibrationTable calibration_from_json(std::string_view text);
void save_calibration(const CalibrationTable& table, const std::filesystem::path& path);
CalibrationTable load_calibration(const std::filesystem::path& path);

}  // namespace sgdlab
