#include "sgdlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace sgdlab {
namespace {

// Relative slack for metadata comparisons; constructions hit the limits exactly.
constexpr double kMetaTol = 1e-12;

bool within_upper(double value, double limit) {
  return value <= limit + kMetaTol * std::max(1.0, std::abs(limit));
}

bool within_lower(double value, double limit) {
  return value >= limit - kMetaTol * std::max(1.0, std::abs(limit));
}

void require_dim(const Problem& p, const Vector& x, const char* what) {
  if (static_cast<std::size_t>(x.size()) != p.dim()) {
    throw std::invalid_argument(
        fmt::format("{}: point has dimension {}, problem has {}", what, x.size(), p.dim()));
  }
}

void require_construction_args(std::size_t n, double grad_bound, double lambda,
                               double lambda_max) {
  if (n <= 1 || n % 2 != 0) {
    throw std::invalid_argument(fmt::format("construction needs an even n > 1, got {}", n));
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("construction needs lambda > 0");
  if (!(lambda_max >= lambda)) {
    throw std::invalid_argument("construction needs lambda_max >= lambda");
  }
  if (!(grad_bound >= 0.0)) throw std::invalid_argument("construction needs G >= 0");
}

}  // namespace

Problem::Problem(std::vector<Component> components, ProblemParameters params,
                 std::optional<Matrix> conjugation)
    : components_(std::move(components)), params_(params), conjugation_(std::move(conjugation)) {
  if (components_.size() <= 1) {
    throw std::invalid_argument("problem needs n > 1 components");
  }
  dim_ = static_cast<std::size_t>(components_.front().curvatures.size());
  if (dim_ == 0) throw std::invalid_argument("problem needs dimension >= 1");
  if (!(params_.lambda > 0.0) || !(params_.lambda_max > 0.0) || !(params_.smooth_l > 0.0)) {
    throw std::invalid_argument("lambda, lambda_max and L must be positive");
  }
  if (!(params_.grad_bound >= 0.0)) throw std::invalid_argument("G must be nonnegative");

  mean_curvature_ = Vector::Zero(static_cast<Eigen::Index>(dim_));
  mean_linear_ = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (static_cast<std::size_t>(c.curvatures.size()) != dim_ ||
        static_cast<std::size_t>(c.linear.size()) != dim_) {
      throw std::invalid_argument(fmt::format("component {} has inconsistent dimension", i));
    }
    if ((c.curvatures.array() < 0.0).any() || !c.curvatures.allFinite() ||
        !c.linear.allFinite()) {
      throw std::invalid_argument(fmt::format("component {} has a negative or non-finite entry", i));
    }
    if (!within_upper(c.curvatures.maxCoeff(), params_.smooth_l)) {
      throw std::invalid_argument(
          fmt::format("component {} curvature {} exceeds L = {}", i, c.curvatures.maxCoeff(),
                      params_.smooth_l));
    }
    mean_curvature_ += c.curvatures;
    mean_linear_ += c.linear;
  }
  mean_curvature_ /= static_cast<double>(components_.size());
  mean_linear_ /= static_cast<double>(components_.size());

  if (!within_lower(mean_curvature_.minCoeff(), params_.lambda)) {
    throw std::invalid_argument(fmt::format("mean curvature {} is below lambda = {}",
                                            mean_curvature_.minCoeff(), params_.lambda));
  }
  if (!within_upper(mean_curvature_.maxCoeff(), params_.lambda_max)) {
    throw std::invalid_argument(fmt::format("mean curvature {} exceeds lambda_max = {}",
                                            mean_curvature_.maxCoeff(), params_.lambda_max));
  }
  if (conjugation_) {
    if (static_cast<std::size_t>(conjugation_->rows()) != dim_ ||
        static_cast<std::size_t>(conjugation_->cols()) != dim_) {
      throw std::invalid_argument("conjugation matrix must be d x d");
    }
    if (!is_orthogonal(*conjugation_)) {
      throw std::invalid_argument("conjugation matrix is not orthogonal to 1e-12");
    }
  }
}

Vector Problem::to_diagonal_frame(const Vector& x) const {
  return conjugation_ ? Vector(conjugation_->transpose() * x) : x;
}

Vector Problem::from_diagonal_frame(const Vector& y) const {
  return conjugation_ ? Vector(*conjugation_ * y) : y;
}

Matrix Problem::dense_hessian(std::size_t i) const {
  const Matrix diag = component(i).curvatures.asDiagonal();
  return conjugation_ ? Matrix(*conjugation_ * diag * conjugation_->transpose()) : diag;
}

Vector Problem::dense_linear(std::size_t i) const {
  return from_diagonal_frame(component(i).linear);
}

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::kSingleShuffle: return "ss";
    case Construction::kRandomReshuffle: return "rr";
    case Construction::kRandomReshuffleFig1: return "rr-fig1";
  }
  return "?";
}

std::string_view to_string(X0Preset p) {
  return p == X0Preset::kAppendix ? "appendix" : "fig1";
}

Construction parse_construction(std::string_view name) {
  if (name == "ss") return Construction::kSingleShuffle;
  if (name == "rr") return Construction::kRandomReshuffle;
  if (name == "rr-fig1") return Construction::kRandomReshuffleFig1;
  throw std::invalid_argument(fmt::format("unknown construction '{}'", name));
}

X0Preset parse_x0_preset(std::string_view name) {
  if (name == "appendix") return X0Preset::kAppendix;
  if (name == "fig1") return X0Preset::kFigure1;
  throw std::invalid_argument(fmt::format("unknown x0 preset '{}'", name));
}

Problem build_ss_construction(std::size_t n, double grad_bound, double lambda,
                              double lambda_max) {
  require_construction_args(n, grad_bound, lambda, lambda_max);
  std::vector<Component> components;
  components.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = i < n / 2 ? -grad_bound / 2 : grad_bound / 2;
    components.push_back({Vector{{lambda, lambda_max}}, Vector{{0.0, b}}});
  }
  return Problem(std::move(components), {lambda, lambda_max, lambda_max, grad_bound});
}

Problem build_rr_construction(std::size_t n, double grad_bound, double lambda,
                              double lambda_max) {
  require_construction_args(n, grad_bound, lambda, lambda_max);
  std::vector<Component> components;
  components.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool first_half = i < n / 2;
    const double b = first_half ? -grad_bound / 2 : grad_bound / 2;
    components.push_back({Vector{{lambda, lambda_max, first_half ? lambda_max : 0.0}},
                          Vector{{0.0, b, b}}});
  }
  return Problem(std::move(components), {lambda, lambda_max, lambda_max, grad_bound});
}

Problem build_rr_fig1_construction(std::size_t n, double grad_bound, double lambda,
                                   double lambda_max) {
  require_construction_args(n, grad_bound, lambda, lambda_max);
  std::vector<Component> components;
  components.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool first_half = i < n / 2;
    const double b = first_half ? -grad_bound / 2 : grad_bound / 2;
    components.push_back(
        {Vector{{lambda, first_half ? lambda_max : 0.0}}, Vector{{0.0, b}}});
  }
  return Problem(std::move(components), {lambda, lambda_max, lambda_max, grad_bound});
}

Problem build_construction(Construction c, std::size_t n, double grad_bound, double lambda,
                           double lambda_max) {
  switch (c) {
    case Construction::kSingleShuffle:
      return build_ss_construction(n, grad_bound, lambda, lambda_max);
    case Construction::kRandomReshuffle:
      return build_rr_construction(n, grad_bound, lambda, lambda_max);
    case Construction::kRandomReshuffleFig1:
      return build_rr_fig1_construction(n, grad_bound, lambda, lambda_max);
  }
  throw std::invalid_argument("unknown construction");
}

Vector initial_point(Construction c, X0Preset preset, double grad_bound, double lambda,
                     double lambda_max) {
  const Eigen::Index d = c == Construction::kRandomReshuffle ? 3 : 2;
  if (preset == X0Preset::kAppendix) {
    Vector x0 = Vector::Zero(d);
    x0(0) = grad_bound / lambda;
    return x0;
  }
  if (d != 2) {
    throw std::invalid_argument(
        "the fig1 preset is 2-D; use the rr-fig1 construction for the rr experiment");
  }
  return Vector{{-grad_bound / (2 * lambda), -grad_bound / (2 * lambda_max)}};
}

double objective(const Problem& p, const Vector& x) {
  require_dim(p, x, "objective");
  const Vector y = p.to_diagonal_frame(x);
  const auto& a = p.mean_curvature();
  const auto& b = p.mean_linear();
  return 0.5 * (a.array() * y.array().square()).sum() - b.dot(y);
}

Vector gradient(const Problem& p, const Vector& x) {
  require_dim(p, x, "gradient");
  const Vector y = p.to_diagonal_frame(x);
  const Vector g = p.mean_curvature().cwiseProduct(y) - p.mean_linear();
  return p.from_diagonal_frame(g);
}

Vector component_gradient(const Problem& p, std::size_t i, const Vector& x) {
  if (i >= p.size()) {
    throw std::invalid_argument(
        fmt::format("component index {} out of range [0, {})", i, p.size()));
  }
  require_dim(p, x, "component_gradient");
  const auto& c = p.component(i);
  const Vector y = p.to_diagonal_frame(x);
  return p.from_diagonal_frame(c.curvatures.cwiseProduct(y) - c.linear);
}

double objective_dense(const Problem& p, const Vector& x) {
  require_dim(p, x, "objective_dense");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += 0.5 * x.dot(p.dense_hessian(i) * x) - p.dense_linear(i).dot(x);
  }
  return total / static_cast<double>(p.size());
}

Minimizer minimizer(const Problem& p) {
  const Vector y = p.mean_linear().cwiseQuotient(p.mean_curvature());
  const double value = -0.5 * p.mean_linear().dot(y);
  return {p.from_diagonal_frame(y), value};
}

bool ValidationReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ValidationClause& c) { return c.passed; });
}

const ValidationClause* ValidationReport::find(std::string_view name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_assumptions(const Problem& p, const Vector& x0, std::size_t epochs) {
  ValidationReport report;
  const double lambda = p.lambda();
  const double lambda_max = p.lambda_max();
  const double g = p.grad_bound();

  {
    // Worst distance of any nonzero curvature outside [lambda, lambda_max].
    double worst = 0.0;
    double offender = lambda;
    for (const auto& c : p.components()) {
      for (double a : c.curvatures) {
        if (a == 0.0) continue;
        const double excess = std::max(lambda - a, a - lambda_max);
        if (excess > worst) {
          worst = excess;
          offender = a;
        }
      }
    }
    report.clauses.push_back({"component_curvatures",
                              worst <= kMetaTol * std::max(1.0, lambda_max), offender, lambda_max,
                              "a_ij in [lambda, lambda_max] or 0"});
  }
  {
    double worst = 0.0;
    for (const auto& c : p.components()) worst = std::max(worst, c.linear.cwiseAbs().maxCoeff());
    report.clauses.push_back(
        {"linear_terms", within_upper(worst, g / 2), worst, g / 2, "|b_ij| <= G/2"});
  }
  {
    const double lo = p.mean_curvature().minCoeff();
    const double hi = p.mean_curvature().maxCoeff();
    report.clauses.push_back({"strong_convexity",
                              within_lower(lo, lambda) && within_upper(hi, lambda_max), lo, lambda,
                              fmt::format("mean curvature range [{}, {}]", lo, hi)});
  }
  {
    double worst = 0.0;
    for (const auto& c : p.components()) worst = std::max(worst, c.curvatures.maxCoeff());
    report.clauses.push_back({"smoothness", within_upper(worst, p.smooth_l()), worst,
                              p.smooth_l(), "max_ij a_ij <= L"});
  }
  if (static_cast<std::size_t>(x0.size()) != p.dim()) {
    report.clauses.push_back({"init_gradient", false, 0.0, g,
                              fmt::format("x0 has dimension {}, problem has {}", x0.size(),
                                          p.dim())});
  } else {
    const double norm = gradient(p, x0).norm();
    report.clauses.push_back(
        {"init_gradient", within_upper(norm, g), norm, g, "||grad F(x0)|| <= G"});
  }
  {
    const Vector star = minimizer(p).point;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      worst = std::max(worst, component_gradient(p, i, star).norm());
    }
    report.clauses.push_back({"gradient_at_minimizer", within_upper(worst, g), worst, g,
                              "max_i ||grad f_i(x*)|| <= G"});
  }
  {
    const double nk = static_cast<double>(p.size()) * static_cast<double>(epochs);
    const double value = epochs == 0 ? INFINITY : std::log(nk) * p.smooth_l() / (lambda * nk);
    report.clauses.push_back(
        {"large_nk", value <= 1.0, value, 1.0, "log(nk) L / (lambda n k) <= 1"});
  }
  return report;
}

Problem conjugate(const Problem& p, const Matrix& orthogonal) {
  if (static_cast<std::size_t>(orthogonal.rows()) != p.dim() ||
      static_cast<std::size_t>(orthogonal.cols()) != p.dim()) {
    throw std::invalid_argument("conjugate: matrix must be d x d");
  }
  if (!is_orthogonal(orthogonal)) {
    throw std::invalid_argument("conjugate: matrix is not orthogonal to 1e-12");
  }
  Matrix composed = p.conjugation() ? Matrix(orthogonal * *p.conjugation()) : orthogonal;
  return Problem(p.components(), p.parameters(), std::move(composed));
}

bool is_orthogonal(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Matrix err = m.transpose() * m - Matrix::Identity(m.rows(), m.cols());
  return err.cwiseAbs().maxCoeff() <= tol;
}

Matrix rotation_2d(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Matrix r(2, 2);
  r << c, -s, s, c;
  return r;
}

Matrix rotation_3d(double yaw, double pitch, double roll) {
  const Eigen::Matrix3d r = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  return Matrix(r);
}

}  // namespace sgdlab
