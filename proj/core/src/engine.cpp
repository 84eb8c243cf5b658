#include "sgdlab/engine.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "sgdlab/rng.hpp"

namespace sgdlab {
namespace {

// Produces the component order of each epoch. run_sgd, run_sgd_dense and
// run_sgd_closed_form all draw through this class, so equal seeds give equal
// orders regardless of the evaluation path.
class OrderSource {
 public:
  OrderSource(Scheme scheme, std::size_t n, std::uint64_t seed)
      : scheme_(scheme), rng_(seed), order_(n) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (scheme_ == Scheme::kSingleShuffle) shuffle(order_, rng_);
  }

  std::span<const std::size_t> next_epoch() {
    switch (scheme_) {
      case Scheme::kWithReplacement:
        for (auto& idx : order_) idx = static_cast<std::size_t>(rng_.uniform_below(order_.size()));
        break;
      case Scheme::kRandomReshuffle:
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        shuffle(order_, rng_);
        break;
      case Scheme::kSingleShuffle:
        break;
    }
    return order_;
  }

 private:
  Scheme scheme_;
  Rng rng_;
  std::vector<std::size_t> order_;
};

// Row-major copies of the component data for the inner loop.
struct FlatData {
  std::size_t dim = 0;
  std::vector<double> curvature;
  std::vector<double> linear;

  explicit FlatData(const Problem& p) : dim(p.dim()) {
    curvature.reserve(p.size() * dim);
    linear.reserve(p.size() * dim);
    for (const auto& c : p.components()) {
      curvature.insert(curvature.end(), c.curvatures.begin(), c.curvatures.end());
      linear.insert(linear.end(), c.linear.begin(), c.linear.end());
    }
  }
};

void check_config(const Problem& p, const RunConfig& cfg) {
  if (static_cast<std::size_t>(cfg.x0.size()) != p.dim()) {
    throw std::invalid_argument(fmt::format("run config: x0 has dimension {}, problem has {}",
                                            cfg.x0.size(), p.dim()));
  }
  if (cfg.epochs == 0) throw std::invalid_argument("run config: epochs must be >= 1");
  if (!std::isfinite(cfg.eta) || cfg.eta < 0.0) {
    throw std::invalid_argument("run config: eta must be finite and nonnegative");
  }
}

Trajectory start_trajectory(const Problem& p, const RunConfig& cfg) {
  Trajectory t;
  t.config = cfg;
  t.rng_algorithm_id = std::string(kRngAlgorithmId);
  t.points.reserve(cfg.epochs);
  t.losses.reserve(cfg.epochs);
  if (cfg.eta * p.smooth_l() > 1.0) {
    t.warnings.push_back(fmt::format(
        "eta * L = {:.6g} > 1: some per-step factors 1 - eta a are negative", cfg.eta * p.smooth_l()));
  }
  return t;
}

void push_point(Trajectory& t, const Problem& p, Vector x) {
  t.losses.push_back(objective(p, x));
  t.points.push_back(std::move(x));
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kWithReplacement: return "wr";
    case Scheme::kSingleShuffle: return "ss";
    case Scheme::kRandomReshuffle: return "rr";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "wr" || name == "with-replacement") return Scheme::kWithReplacement;
  if (name == "ss" || name == "single-shuffle") return Scheme::kSingleShuffle;
  if (name == "rr" || name == "random-reshuffle") return Scheme::kRandomReshuffle;
  throw std::invalid_argument(fmt::format("unknown scheme '{}'", name));
}

std::uint64_t stream_seed(const RunConfig& cfg) {
  if (cfg.couple_rng) return cfg.seed;
  return derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(cfg.scheme));
}

Vector EpochMap::apply(const Vector& y, double eta) const {
  return contraction.cwiseProduct(y) + eta * noise;
}

double recommended_eta(std::size_t n, std::size_t k, double lambda) {
  const double nk = static_cast<double>(n) * static_cast<double>(k);
  if (!(nk > 1.0)) throw std::invalid_argument("recommended_eta: needs n k > 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("recommended_eta: needs lambda > 0");
  return std::log(nk) / (lambda * nk);
}

Trajectory run_sgd(const Problem& p, const RunConfig& cfg, const OrderObserver& observer) {
  check_config(p, cfg);
  Trajectory traj = start_trajectory(p, cfg);
  const FlatData data(p);
  const std::size_t d = data.dim;
  const double eta = cfg.eta;

  Vector y = p.to_diagonal_frame(cfg.x0);
  if (cfg.record_steps) traj.steps.reserve(p.size() * cfg.epochs);

  OrderSource source(cfg.scheme, p.size(), stream_seed(cfg));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = source.next_epoch();
    if (observer) observer(epoch, order);
    for (const std::size_t idx : order) {
      const double* a = data.curvature.data() + idx * d;
      const double* b = data.linear.data() + idx * d;
      for (std::size_t j = 0; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        y(jj) -= eta * (a[j] * y(jj) - b[j]);
      }
      if (cfg.record_steps) traj.steps.push_back(p.from_diagonal_frame(y));
    }
    push_point(traj, p, p.from_diagonal_frame(y));
  }
  return traj;
}

Trajectory run_sgd_dense(const Problem& p, const RunConfig& cfg, const OrderObserver& observer) {
  check_config(p, cfg);
  Trajectory traj = start_trajectory(p, cfg);
  std::vector<Matrix> hessians;
  std::vector<Vector> linears;
  hessians.reserve(p.size());
  linears.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    hessians.push_back(p.dense_hessian(i));
    linears.push_back(p.dense_linear(i));
  }

  Vector x = cfg.x0;
  OrderSource source(cfg.scheme, p.size(), stream_seed(cfg));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = source.next_epoch();
    if (observer) observer(epoch, order);
    for (const std::size_t idx : order) {
      x -= cfg.eta * (hessians[idx] * x - linears[idx]);
      if (cfg.record_steps) traj.steps.push_back(x);
    }
    push_point(traj, p, x);
  }
  return traj;
}

EpochMap epoch_map(const Problem& p, std::span<const std::size_t> order, double eta) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  EpochMap map{Vector::Ones(d), Vector::Zero(d)};
  // Backward sweep: the running product is prod_{s > t} (1 - eta a_{order[s]}).
  for (std::size_t t = order.size(); t-- > 0;) {
    const auto& c = p.component(order[t]);
    map.noise += c.linear.cwiseProduct(map.contraction);
    map.contraction = map.contraction.cwiseProduct((1.0 - eta * c.curvatures.array()).matrix());
  }
  return map;
}

double geometric_factor(double s, std::size_t t) {
  if (t == 0) return 0.0;
  if (s == 1.0) return static_cast<double>(t);
  if (s > 0.5 && s < 1.5) {
    const double log_s = std::log(s);
    return std::expm1(static_cast<double>(t) * log_s) / std::expm1(log_s);
  }
  return (1.0 - std::pow(s, static_cast<double>(t))) / (1.0 - s);
}

Trajectory run_sgd_closed_form(const Problem& p, const RunConfig& cfg,
                               const OrderObserver& observer) {
  check_config(p, cfg);
  RunConfig effective = cfg;
  effective.record_steps = false;  // only epoch boundaries exist on this path
  Trajectory traj = start_trajectory(p, effective);
  const Vector y0 = p.to_diagonal_frame(cfg.x0);

  OrderSource source(cfg.scheme, p.size(), stream_seed(cfg));
  if (cfg.scheme == Scheme::kSingleShuffle) {
    const auto order = source.next_epoch();
    const EpochMap map = epoch_map(p, order, cfg.eta);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      if (observer) observer(epoch, order);
      const std::size_t t = epoch + 1;
      Vector y(y0.size());
      for (Eigen::Index j = 0; j < y.size(); ++j) {
        const double s = map.contraction(j);
        y(j) = std::pow(s, static_cast<double>(t)) * y0(j) +
               cfg.eta * geometric_factor(s, t) * map.noise(j);
      }
      push_point(traj, p, p.from_diagonal_frame(y));
    }
    return traj;
  }

  Vector y = y0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = source.next_epoch();
    if (observer) observer(epoch, order);
    y = epoch_map(p, order, cfg.eta).apply(y, cfg.eta);
    push_point(traj, p, p.from_diagonal_frame(y));
  }
  return traj;
}

std::string trajectory_to_csv(const Trajectory& t) {
  const RunConfig& c = t.config;
  std::string out;
  out += "# sgdlab trajectory\n";
  out += fmt::format("# scheme={}\n", to_string(c.scheme));
  out += fmt::format("# eta={:.17g}\n", c.eta);
  out += fmt::format("# epochs={}\n", c.epochs);
  out += fmt::format("# seed={}\n", c.seed);
  out += fmt::format("# couple_rng={}\n", c.couple_rng);
  std::string x0;
  for (Eigen::Index j = 0; j < c.x0.size(); ++j) {
    x0 += fmt::format("{}{:.17g}", j == 0 ? "" : ";", c.x0(j));
  }
  out += fmt::format("# x0={}\n", x0);
  out += fmt::format("# rng_algorithm_id={}\n", t.rng_algorithm_id);

  const Eigen::Index d = c.x0.size();
  out += "epoch";
  for (Eigen::Index j = 0; j < d; ++j) out += fmt::format(",x_{}", j + 1);
  out += ",loss\n";
  for (std::size_t e = 0; e < t.points.size(); ++e) {
    out += fmt::format("{}", e + 1);
    for (Eigen::Index j = 0; j < d; ++j) out += fmt::format(",{:.17g}", t.points[e](j));
    out += fmt::format(",{:.17g}\n", t.losses[e]);
  }
  return out;
}

void write_trajectory_csv(const Trajectory& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << trajectory_to_csv(t);
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace sgdlab
