#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sgdlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One summand f_i(y) = 1/2 sum_j a_j y_j^2 - sum_j b_j y_j, written in the
// diagonal frame. Linear terms use the "-b^T y" sign convention throughout, so
// a literal "+(G/2) x_2" in a construction is stored as b_2 = -G/2.
struct Component {
  Vector curvatures;
  Vector linear;
};

struct ProblemParameters {
  double lambda = 1.0;      // strong convexity of F
  double lambda_max = 1.0;  // spectral norm of the mean Hessian
  double smooth_l = 1.0;    // bound on every component's spectral norm
  double grad_bound = 1.0;  // G
};

// Finite-sum quadratic F = (1/n) sum_i f_i with commuting Hessians.
//
// Components are kept in a shared eigenbasis. When a conjugation O is present
// the problem seen by callers is f~_i(x) = f_i(O^T x), i.e. A~_i = O A_i O^T and
// b~_i = O b_i; points passed to and returned from the public API live in that
// conjugated frame. Values are immutable after construction.
class Problem {
 public:
  // Throws std::invalid_argument when any structural or metadata invariant is
  // violated (n > 1, consistent dimensions, a_ij >= 0, mean curvature inside
  // [lambda, lambda_max], component curvature <= L, O orthogonal to 1e-12).
  Problem(std::vector<Component> components, ProblemParameters params,
          std::optional<Matrix> conjugation = std::nullopt);

  std::size_t size() const { return components_.size(); }
  std::size_t dim() const { return dim_; }
  double lambda() const { return params_.lambda; }
  double lambda_max() const { return params_.lambda_max; }
  double smooth_l() const { return params_.smooth_l; }
  double grad_bound() const { return params_.grad_bound; }
  const ProblemParameters& parameters() const { return params_; }

  const std::vector<Component>& components() const { return components_; }
  const Component& component(std::size_t i) const { return components_.at(i); }

  const std::optional<Matrix>& conjugation() const { return conjugation_; }
  bool is_conjugated() const { return conjugation_.has_value(); }

  // Diagonal of A = (1/n) sum A_i and mean linear term, diagonal frame.
  const Vector& mean_curvature() const { return mean_curvature_; }
  const Vector& mean_linear() const { return mean_linear_; }

  // x -> O^T x and y -> O y (identity when unconjugated).
  Vector to_diagonal_frame(const Vector& x) const;
  Vector from_diagonal_frame(const Vector& y) const;

  // Materialized O A_i O^T and O b_i, for dense cross-checks.
  Matrix dense_hessian(std::size_t i) const;
  Vector dense_linear(std::size_t i) const;

 private:
  std::vector<Component> components_;
  ProblemParameters params_;
  std::optional<Matrix> conjugation_;
  std::size_t dim_ = 0;
  Vector mean_curvature_;
  Vector mean_linear_;
};

struct Minimizer {
  Vector point;
  double value = 0.0;
};

enum class Construction {
  kSingleShuffle,       // "ss": 2-D single shuffling lower bound instance
  kRandomReshuffle,     // "rr": 3-D random reshuffling lower bound instance
  kRandomReshuffleFig1  // "rr-fig1": rr instance restricted to coordinates 1 and 3
};

// Named initializations. kAppendix is (G/lambda, 0, ...), the point used by the
// lower-bound analysis; kFigure1 is (-G/(2 lambda), -G/(2 lambda_max)), the
// experiment start (2-D constructions only).
enum class X0Preset { kAppendix, kFigure1 };

std::string_view to_string(Construction c);
std::string_view to_string(X0Preset p);
Construction parse_construction(std::string_view name);
X0Preset parse_x0_preset(std::string_view name);

// f_i(x) = lambda/2 x1^2 + lambda_max/2 x2^2 + (G/2) x2 for i <= n/2 and
// - (G/2) x2 otherwise. Stored as b_i = (0, -G/2) for the first half and
// (0, +G/2) for the second. L = lambda_max. Requires even n > 1 and
// lambda_max >= lambda > 0.
Problem build_ss_construction(std::size_t n, double grad_bound, double lambda,
                              double lambda_max);

// Adds a third coordinate with curvature lambda_max on the first half and 0 on
// the second, linear terms split -G/2 / +G/2 like coordinate 2. Mean curvature
// is (lambda, lambda_max, lambda_max/2).
Problem build_rr_construction(std::size_t n, double grad_bound, double lambda,
                              double lambda_max);

// build_rr_construction with coordinate 2 dropped.
Problem build_rr_fig1_construction(std::size_t n, double grad_bound, double lambda,
                                   double lambda_max);

Problem build_construction(Construction c, std::size_t n, double grad_bound,
                           double lambda, double lambda_max);

// Throws std::invalid_argument when the preset is not defined for the
// construction's dimension (kFigure1 needs d == 2).
Vector initial_point(Construction c, X0Preset preset, double grad_bound,
                     double lambda, double lambda_max);

double objective(const Problem& p, const Vector& x);
Vector gradient(const Problem& p, const Vector& x);

// Gradient of f_i at x (0-based i). Under conjugation returns O grad f_i(O^T x).
Vector component_gradient(const Problem& p, std::size_t i, const Vector& x);

// (1/n) sum_i (1/2 x^T A~_i x - b~_i^T x) with materialized matrices.
double objective_dense(const Problem& p, const Vector& x);

Minimizer minimizer(const Problem& p);

struct ValidationClause {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationClause> clauses;

  bool all_passed() const;
  const ValidationClause* find(std::string_view name) const;
};

// Evaluates each assumption clause independently and never throws on failure:
//   component_curvatures   every a_ij in [lambda, lambda_max] or exactly 0
//   linear_terms           every |b_ij| <= G/2
//   strong_convexity       mean curvature within [lambda, lambda_max]
//   smoothness             every a_ij <= L
//   init_gradient          ||grad F(x0)|| <= G
//   gradient_at_minimizer  max_i ||grad f_i(x*)|| <= G
//   large_nk               log(nk) L / (lambda n k) <= 1
// The first two are the lower-bound class; the rest are shared with the
// upper-bound class.
ValidationReport validate_assumptions(const Problem& p, const Vector& x0,
                                      std::size_t epochs);

// O-conjugate of p. Composes with an existing conjugation (new O' = O O_old),
// so conjugate(conjugate(p, O), O^T) evaluates like p. Metadata is unchanged.
Problem conjugate(const Problem& p, const Matrix& orthogonal);

bool is_orthogonal(const Matrix& m, double tol = 1e-12);

// Rotation matrices used by tests and the conjugation suite.
Matrix rotation_2d(double angle);
Matrix rotation_3d(double yaw, double pitch, double roll);

// JSON: {n, dim, lambda, lambda_max, smooth_l, grad_bound,
//        components: [{curvatures: [...], linear: [...]}],
//        conjugation: [[row], [row], ...]}   (conjugation optional)
std::string problem_to_json(const Problem& p);
Problem problem_from_json(std::string_view text);
void save_problem(const Problem& p, const std::filesystem::path& path);
Problem load_problem(const std::filesystem::path& path);

}  // namespace sgdlab
