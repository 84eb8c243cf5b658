#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgdlab/bounds.hpp"
#include "sgdlab/engine.hpp"
#include "sgdlab/model.hpp"

namespace sgdlab {

struct EtaRule {
  enum class Kind { kRecommended, kFixed };
  Kind kind = Kind::kRecommended;
  double value = 0.0;  // kFixed only

  static EtaRule recommended() { return {}; }
  static EtaRule fixed(double eta) { return {Kind::kFixed, eta}; }

  // log(nk) / (lambda n k) or the fixed value.
  double eta_for(std::size_t n, std::size_t k, double lambda) const;
};

// "recommended" or "fixed:<value>".
std::string to_string(const EtaRule& rule);
EtaRule parse_eta_rule(std::string_view text);

struct SweepPlan {
  Construction construction = Construction::kSingleShuffle;
  std::size_t n = 100;
  double grad_bound = 1.0;
  double lambda = 1.0;
  double lambda_max = 50.0;
  std::vector<std::size_t> k_values;
  std::size_t seeds = 100;
  X0Preset x0_preset = X0Preset::kFigure1;
  EtaRule eta_rule;
  bool couple_rng = false;
  std::uint64_t seed_base = 0;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};

  // Throws std::invalid_argument: empty or non-ascending k_values, k == 0,
  // seeds == 0, no schemes, or problem parameters the construction rejects.
  void validate() const;
  Problem problem() const;
  Vector x0() const;
};

// n = 100, G = 1, lambda = 1, lambda_max = 50, k in {10, 25, 50, 75, 100, 150,
// 200, 400}, 100 seeds, fig1 start, recommended eta. `rr` maps to the 2-D
// rr-fig1 problem.
SweepPlan desk_plan(Construction c);
// n = 500, G = 1, lambda = 1, lambda_max = 200, k from 40 to 2000, 100 seeds.
SweepPlan paper_plan(Construction c);

// JSON mirroring the SweepPlan fields; missing fields keep their defaults.
std::string plan_to_json(const SweepPlan& plan);
SweepPlan plan_from_json(std::string_view text);
SweepPlan load_plan(const std::filesystem::path& path);

// Lower clamp applied before taking log10.
inline constexpr double kLog10Floor = 1e-300;

struct SweepRecord {
  std::string scheme;  // "wr", "ss", "rr"
  std::size_t k = 0;
  std::uint64_t seed = 0;  // run seed handed to the engine
  double final_loss = 0.0;
  double log10_loss = 0.0;
  bool clamped = false;  // final_loss < kLog10Floor

  bool operator==(const SweepRecord&) const = default;
};

SweepRecord make_record(std::string scheme, std::size_t k, std::uint64_t seed, double final_loss);

struct SweepSummary {
  // Scheme label, or "bound:<THEOREM-ID>" for a theory curve.
  std::string scheme;
  std::size_t k = 0;
  double mean_log10_loss = 0.0;
  double std_log10_loss = 0.0;  // population standard deviation
  std::size_t n_seeds = 0;

  bool operator==(const SweepSummary&) const = default;
};

struct SweepResult {
  std::vector<SweepRecord> records;     // ordered by (plan scheme order, k, seed index)
  std::vector<SweepSummary> summaries;  // ordered by (plan scheme order, k)
  std::vector<std::string> warnings;
  std::size_t clamped = 0;
};

// Run seed for seed index s: derive_seed(plan.seed_base, s). The same run seed
// is used for every k and scheme; schemes still get separate streams unless
// couple_rng is set.
std::uint64_t sweep_run_seed(const SweepPlan& plan, std::size_t seed_index);

// Runs every (scheme, k, seed) triple on up to `jobs` threads (0 = hardware
// concurrency). Output does not depend on `jobs`.
SweepResult run_sweep(const SweepPlan& plan, std::size_t jobs = 1);

// Groups records by (scheme, k) in order of first appearance.
std::vector<SweepSummary> summarize(const std::vector<SweepRecord>& records);

// Arithmetic mean of final_loss over the records of one (scheme, k). Throws
// std::invalid_argument when there are none.
double mean_final_loss(const std::vector<SweepRecord>& records, std::string_view scheme,
                       std::size_t k);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;  // 1 when the data have no spread
};

// OLS of mean_log10_loss against log10 k. Throws std::invalid_argument for
// fewer than 3 points.
SlopeFit fit_loglog_slope(std::span<const SweepSummary> points);

// Points of one scheme with k_min <= k <= k_max.
std::vector<SweepSummary> select_series(const std::vector<SweepSummary>& summaries,
                                        std::string_view scheme, std::size_t k_min,
                                        std::size_t k_max);

// Least squares in log space: log10 c = mean(mean_log10_loss - log10 shape(k))
// with shape = evaluate({id, 1, includes_logs}, inputs at k).
double fit_bound_constant(std::span<const SweepSummary> empirical, const BoundSpec& spec,
                          const SweepPlan& plan);

// Theory curve over plan.k_values as summaries labeled "bound:<ID>".
std::vector<SweepSummary> bound_curve(const BoundSpec& spec, const SweepPlan& plan);

// CSV headers (exact).
inline constexpr const char* kRecordsCsvHeader = "scheme,k,seed,final_loss,log10_loss";
inline constexpr const char* kSummariesCsvHeader =
    "scheme,k,mean_log10_loss,std_log10_loss,n_seeds";

// `metadata` lines are written first, each prefixed with "# ". Parsers skip
// lines starting with '#'.
std::string records_to_csv(const std::vector<SweepRecord>& records,
                           const std::vector<std::string>& metadata = {});
std::vector<SweepRecord> parse_records_csv(std::string_view text);
std::string summaries_to_csv(const std::vector<SweepSummary>& summaries,
                             const std::vector<std::string>& metadata = {});
std::vector<SweepSummary> parse_summaries_csv(std::string_view text);

// Plan echo plus rng id and clamp information.
std::vector<std::string> sweep_metadata(const SweepPlan& plan, const SweepResult& result);

void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path,
              const std::vector<std::string>& metadata = {});
void emit_csv(const std::vector<SweepSummary>& summaries, const std::filesystem::path& path,
              const std::vector<std::string>& metadata = {});

struct SvgOptions {
  std::string title;
  int width = 720;
  int height = 480;
};

// One polyline per series with +-1 std error bars (empirical series only), log
// k on the x axis, log10 F(x_k) on the y axis, and a legend. Bound series are
// dashed.
std::string render_svg(const std::vector<SweepSummary>& summaries, const SvgOptions& options = {});
void emit_svg(const std::vector<SweepSummary>& summaries, const std::filesystem::path& path,
              const SvgOptions& options = {});

// Writes text, throwing std::runtime_error with the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace sgdlab
