#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgdlab/model.hpp"

namespace sgdlab {

enum class Scheme { kWithReplacement, kSingleShuffle, kRandomReshuffle };

inline constexpr Scheme kAllSchemes[] = {Scheme::kWithReplacement, Scheme::kSingleShuffle,
                                         Scheme::kRandomReshuffle};

// Short labels "wr", "ss", "rr". parse_scheme also accepts the long names
// "with-replacement", "single-shuffle" and "random-reshuffle".
std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

struct RunConfig {
  Scheme scheme = Scheme::kRandomReshuffle;
  double eta = 0.0;
  std::size_t epochs = 1;
  Vector x0;
  std::uint64_t seed = 0;
  // Share one random stream across schemes instead of one stream per scheme.
  bool couple_rng = false;
  // Debug: keep all n*k iterates, not just end-of-epoch points.
  bool record_steps = false;
};

// Seed of the stream that drives a run: cfg.seed when coupled, otherwise
// derive_seed(cfg.seed, 1 + scheme index).
std::uint64_t stream_seed(const RunConfig& cfg);

// Per-coordinate affine summary of one epoch in the diagonal frame:
// y -> contraction .* y + eta * noise.
struct EpochMap {
  Vector contraction;
  Vector noise;

  Vector apply(const Vector& y, double eta) const;
};

struct Trajectory {
  std::vector<Vector> points;  // x_1 .. x_k (end of each epoch)
  std::vector<double> losses;  // F(x_t)
  RunConfig config;
  std::string rng_algorithm_id;
  std::vector<Vector> steps;  // all iterates when config.record_steps
  std::vector<std::string> warnings;

  const Vector& final_point() const { return points.back(); }
  double final_loss() const { return losses.back(); }
};

// Called once per epoch with the component order processed in that epoch
// (a permutation for ss/rr, the sampled index sequence for wr).
using OrderObserver = std::function<void(std::size_t epoch, std::span<const std::size_t> order)>;

// log(nk) / (lambda n k). Throws std::invalid_argument when nk <= 1 or
// lambda <= 0.
double recommended_eta(std::size_t n, std::size_t k, double lambda);

// Plain constant-step SGD: n*k steps x <- x - eta grad f_i(x). Stepping runs
// in the diagonal frame at O(d) per step. Throws std::invalid_argument on a
// dimension mismatch, epochs == 0, or a negative/non-finite eta. eta L > 1 is
// allowed and only reported in Trajectory::warnings.
Trajectory run_sgd(const Problem& p, const RunConfig& cfg, const OrderObserver& observer = {});

// Same sampling as run_sgd, but steps in the problem frame with the
// materialized O A_i O^T and O b_i. Cross-check path, O(d^2) per step.
Trajectory run_sgd_dense(const Problem& p, const RunConfig& cfg,
                         const OrderObserver& observer = {});

// S_j = prod_t (1 - eta a_{order[t], j}) and
// X_j = sum_t b_{order[t], j} prod_{s > t} (1 - eta a_{order[s], j}).
// Any index sequence is accepted; for a permutation S is order-free.
EpochMap epoch_map(const Problem& p, std::span<const std::size_t> order, double eta);

// (1 - s^t) / (1 - s) evaluated without cancellation near s = 1, with the
// limit value t at s == 1.
double geometric_factor(double s, std::size_t t);

// Same random draws as run_sgd, evaluated through epoch maps. Single shuffling
// uses x_t = S^t x0 + eta (1 - S^t)/(1 - S) X; the other schemes compose one
// map per epoch.
Trajectory run_sgd_closed_form(const Problem& p, const RunConfig& cfg,
                               const OrderObserver& observer = {});

// CSV: '#'-prefixed metadata lines (config echo, rng id), then
// epoch,x_1,...,x_d,loss with one row per epoch.
std::string trajectory_to_csv(const Trajectory& t);
void write_trajectory_csv(const Trajectory& t, const std::filesystem::path& path);

}  // namespace sgdlab
