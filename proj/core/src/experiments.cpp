#include "sgdlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "parallel.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Non-comment lines with any trailing '\r' removed.
std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

double to_double(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  const double v = std::stod(str, &used);
  if (used != str.size()) throw std::invalid_argument(fmt::format("CSV: bad number '{}'", str));
  return v;
}

std::uint64_t to_u64(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  if (str.empty() || str.front() == '-') throw std::invalid_argument(fmt::format("CSV: bad integer '{}'", str));
  const unsigned long long v = std::stoull(str, &used);
  if (used != str.size()) throw std::invalid_argument(fmt::format("CSV: bad integer '{}'", str));
  return v;
}

template <typename Row, typename ParseFn>
std::vector<Row> parse_csv(std::string_view text, std::string_view header, std::size_t fields,
                           ParseFn parse_row) {
  const auto lines = data_lines(text);
  if (lines.empty() || lines.front() != header) {
    throw std::invalid_argument(fmt::format("CSV: expected header '{}'", header));
  }
  std::vector<Row> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != fields) {
      throw std::invalid_argument(fmt::format("CSV: line {} has {} fields, expected {}", i + 1,
                                              cols.size(), fields));
    }
    try {
      rows.push_back(parse_row(cols));
    } catch (const std::logic_error& e) {
      throw std::invalid_argument(fmt::format("CSV: line {}: {}", i + 1, e.what()));
    }
  }
  return rows;
}

std::string with_metadata(const std::vector<std::string>& metadata) {
  std::string out;
  for (const auto& m : metadata) out += fmt::format("# {}\n", m);
  return out;
}

}  // namespace

double EtaRule::eta_for(std::size_t n, std::size_t k, double lambda) const {
  return kind == Kind::kFixed ? value : recommended_eta(n, k, lambda);
}

std::string to_string(const EtaRule& rule) {
  if (rule.kind == EtaRule::Kind::kRecommended) return "recommended";
  return fmt::format("fixed:{:.17g}", rule.value);
}

EtaRule parse_eta_rule(std::string_view text) {
  if (text == "recommended") return EtaRule::recommended();
  if (text.starts_with("fixed:")) {
    const double v = to_double(text.substr(6));
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("eta rule: fixed value must be >= 0");
    return EtaRule::fixed(v);
  }
  throw std::invalid_argument(fmt::format("unknown eta rule '{}'", text));
}

void SweepPlan::validate() const {
  if (k_values.empty()) throw std::invalid_argument("sweep plan: k_values is empty");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] == 0) throw std::invalid_argument("sweep plan: k values must be positive");
    if (i > 0 && k_values[i] <= k_values[i - 1]) {
      throw std::invalid_argument("sweep plan: k_values must be strictly ascending");
    }
  }
  if (seeds == 0) throw std::invalid_argument("sweep plan: seeds must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("sweep plan: no schemes");
  if (eta_rule.kind == EtaRule::Kind::kFixed && (!std::isfinite(eta_rule.value) || eta_rule.value < 0.0)) {
    throw std::invalid_argument("sweep plan: fixed eta must be finite and >= 0");
  }
  const Problem p = problem();
  (void)x0();
  if (eta_rule.kind == EtaRule::Kind::kRecommended && p.size() * k_values.front() <= 1) {
    throw std::invalid_argument("sweep plan: recommended eta needs n k > 1");
  }
}

Problem SweepPlan::problem() const {
  return build_construction(construction, n, grad_bound, lambda, lambda_max);
}

Vector SweepPlan::x0() const {
  return initial_point(construction, x0_preset, grad_bound, lambda, lambda_max);
}

SweepPlan desk_plan(Construction c) {
  SweepPlan plan;
  plan.construction = c == Construction::kRandomReshuffle ? Construction::kRandomReshuffleFig1 : c;
  plan.n = 100;
  plan.grad_bound = 1.0;
  plan.lambda = 1.0;
  plan.lambda_max = 50.0;
  plan.k_values = {10, 25, 50, 75, 100, 150, 200, 400};
  plan.seeds = 100;
  plan.x0_preset = X0Preset::kFigure1;
  return plan;
}

SweepPlan paper_plan(Construction c) {
  SweepPlan plan = desk_plan(c);
  plan.n = 500;
  plan.lambda_max = 200.0;
  plan.k_values = {40, 60, 80, 100, 150, 200, 300, 400, 600, 800, 1000, 1500, 2000};
  return plan;
}

std::string plan_to_json(const SweepPlan& plan) {
  nlohmann::json doc;
  doc["construction"] = std::string(to_string(plan.construction));
  doc["n"] = plan.n;
  doc["grad_bound"] = plan.grad_bound;
  doc["lambda"] = plan.lambda;
  doc["lambda_max"] = plan.lambda_max;
  doc["k_values"] = plan.k_values;
  doc["seeds"] = plan.seeds;
  doc["x0_preset"] = std::string(to_string(plan.x0_preset));
  doc["eta_rule"] = to_string(plan.eta_rule);
  doc["couple_rng"] = plan.couple_rng;
  doc["seed_base"] = plan.seed_base;
  nlohmann::json schemes = nlohmann::json::array();
  for (const Scheme s : plan.schemes) schemes.push_back(std::string(to_string(s)));
  doc["schemes"] = std::move(schemes);
  return doc.dump(2);
}

SweepPlan plan_from_json(std::string_view text) {
  SweepPlan plan = desk_plan(Construction::kSingleShuffle);
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw std::invalid_argument("plan JSON: top level must be an object");
    static const std::set<std::string> kKnown = {
        "construction", "n",         "grad_bound", "lambda",     "lambda_max", "k_values",
        "seeds",        "x0_preset", "eta_rule",   "couple_rng", "seed_base",  "schemes"};
    for (const auto& [key, value] : doc.items()) {
      if (!kKnown.contains(key)) throw std::invalid_argument(fmt::format("plan JSON: unknown field '{}'", key));
    }
    if (doc.contains("construction")) plan.construction = parse_construction(doc["construction"].get<std::string>());
    if (doc.contains("n")) plan.n = doc["n"].get<std::size_t>();
    if (doc.contains("grad_bound")) plan.grad_bound = doc["grad_bound"].get<double>();
    if (doc.contains("lambda")) plan.lambda = doc["lambda"].get<double>();
    if (doc.contains("lambda_max")) plan.lambda_max = doc["lambda_max"].get<double>();
    if (doc.contains("k_values")) plan.k_values = doc["k_values"].get<std::vector<std::size_t>>();
    if (doc.contains("seeds")) plan.seeds = doc["seeds"].get<std::size_t>();
    if (doc.contains("x0_preset")) plan.x0_preset = parse_x0_preset(doc["x0_preset"].get<std::string>());
    if (doc.contains("eta_rule")) plan.eta_rule = parse_eta_rule(doc["eta_rule"].get<std::string>());
    if (doc.contains("couple_rng")) plan.couple_rng = doc["couple_rng"].get<bool>();
    if (doc.contains("seed_base")) plan.seed_base = doc["seed_base"].get<std::uint64_t>();
    if (doc.contains("schemes")) {
      plan.schemes.clear();
      for (const auto& s : doc["schemes"]) plan.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("plan JSON: {}", e.what()));
  }
  plan.validate();
  return plan;
}

SweepPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return plan_from_json(buffer.str());
}

SweepRecord make_record(std::string scheme, std::size_t k, std::uint64_t seed, double final_loss) {
  SweepRecord r;
  r.scheme = std::move(scheme);
  r.k = k;
  r.seed = seed;
  r.final_loss = final_loss;
  r.clamped = !(final_loss >= kLog10Floor);
  r.log10_loss = std::log10(r.clamped ? kLog10Floor : final_loss);
  return r;
}

std::uint64_t sweep_run_seed(const SweepPlan& plan, std::size_t seed_index) {
  return derive_seed(plan.seed_base, seed_index);
}

SweepResult run_sweep(const SweepPlan& plan, std::size_t jobs) {
  plan.validate();
  const Problem problem = plan.problem();
  const Vector x0 = plan.x0();

  SweepResult result;
  std::set<std::string> seen;
  for (const std::size_t k : plan.k_values) {
    const ValidationReport report = validate_assumptions(problem, x0, k);
    for (const auto& clause : report.clauses) {
      if (clause.passed) continue;
      std::string w = fmt::format("assumption '{}' fails at k = {}: measured {:.6g}, limit {:.6g}",
                                  clause.name, k, clause.measured, clause.limit);
      if (seen.insert(w).second) result.warnings.push_back(std::move(w));
    }
    const double eta = plan.eta_rule.eta_for(problem.size(), k, plan.lambda);
    if (eta * problem.smooth_l() > 1.0) {
      result.warnings.push_back(fmt::format("eta L = {:.6g} > 1 at k = {}", eta * problem.smooth_l(), k));
    }
  }

  const std::size_t per_scheme = plan.k_values.size() * plan.seeds;
  result.records.resize(plan.schemes.size() * per_scheme);
  detail::parallel_for(result.records.size(), jobs, [&](std::size_t task) {
    const std::size_t si = task / per_scheme;
    const std::size_t ki = (task % per_scheme) / plan.seeds;
    const std::size_t seed_index = task % plan.seeds;
    const std::size_t k = plan.k_values[ki];
    RunConfig cfg;
    cfg.scheme = plan.schemes[si];
    cfg.eta = plan.eta_rule.eta_for(problem.size(), k, plan.lambda);
    cfg.epochs = k;
    cfg.x0 = x0;
    cfg.seed = sweep_run_seed(plan, seed_index);
    cfg.couple_rng = plan.couple_rng;
    const Trajectory t = run_sgd(problem, cfg);
    result.records[task] = make_record(std::string(to_string(cfg.scheme)), k, cfg.seed, t.final_loss());
  });

  for (const auto& r : result.records) result.clamped += r.clamped ? 1 : 0;
  result.summaries = summarize(result.records);
  return result;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRecord>& records) {
  std::vector<SweepSummary> out;
  std::vector<std::vector<double>> values;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SweepSummary& s) { return s.scheme == r.scheme && s.k == r.k; });
    if (it == out.end()) {
      out.push_back({r.scheme, r.k, 0.0, 0.0, 0});
      values.emplace_back();
      it = out.end() - 1;
    }
    values[static_cast<std::size_t>(it - out.begin())].push_back(r.log10_loss);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    const double count = static_cast<double>(v.size());
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= count;
    double var = 0.0;
    for (const double x : v) var += (x - mean) * (x - mean);
    out[i].mean_log10_loss = mean;
    out[i].std_log10_loss = std::sqrt(var / count);
    out[i].n_seeds = v.size();
  }
  return out;
}

double mean_final_loss(const std::vector<SweepRecord>& records, std::string_view scheme,
                       std::size_t k) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.scheme == scheme && r.k == k) {
      total += r.final_loss;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument(fmt::format("no records for scheme '{}' at k = {}", scheme, k));
  return total / static_cast<double>(count);
}

SlopeFit fit_loglog_slope(std::span<const SweepSummary> points) {
  if (points.size() < 3) throw std::invalid_argument("slope fit needs at least 3 points");
  const double m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += std::log10(static_cast<double>(p.k)) / m;
    my += p.mean_log10_loss / m;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log10(static_cast<double>(p.k)) - mx;
    const double dy = p.mean_log10_loss - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs at least two distinct k values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

std::vector<SweepSummary> select_series(const std::vector<SweepSummary>& summaries,
                                        std::string_view scheme, std::size_t k_min,
                                        std::size_t k_max) {
  std::vector<SweepSummary> out;
  for (const auto& s : summaries) {
    if (s.scheme == scheme && s.k >= k_min && s.k <= k_max) out.push_back(s);
  }
  return out;
}

double fit_bound_constant(std::span<const SweepSummary> empirical, const BoundSpec& spec,
                          const SweepPlan& plan) {
  if (empirical.empty()) throw std::invalid_argument("bound fit: no points");
  BoundSpec unit = spec;
  unit.constant = 1.0;
  double offset = 0.0;
  for (const auto& s : empirical) {
    const BoundInputs in{plan.n, s.k, plan.grad_bound, plan.lambda, plan.lambda_max, 1.0};
    offset += s.mean_log10_loss - std::log10(evaluate(unit, in));
  }
  return std::pow(10.0, offset / static_cast<double>(empirical.size()));
}

std::vector<SweepSummary> bound_curve(const BoundSpec& spec, const SweepPlan& plan) {
  std::vector<SweepSummary> out;
  for (const std::size_t k : plan.k_values) {
    const BoundInputs in{plan.n, k, plan.grad_bound, plan.lambda, plan.lambda_max, 1.0};
    out.push_back({fmt::format("bound:{}", to_string(spec.theorem_id)), k,
                   std::log10(evaluate(spec, in)), 0.0, 0});
  }
  return out;
}

std::string records_to_csv(const std::vector<SweepRecord>& records,
                           const std::vector<std::string>& metadata) {
  std::string out = with_metadata(metadata);
  out += kRecordsCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{:.17g},{:.17g}\n", r.scheme, r.k, r.seed, r.final_loss, r.log10_loss);
  }
  return out;
}

std::vector<SweepRecord> parse_records_csv(std::string_view text) {
  return parse_csv<SweepRecord>(text, kRecordsCsvHeader, 5, [](const auto& c) {
    SweepRecord r;
    r.scheme = std::string(c[0]);
    r.k = static_cast<std::size_t>(to_u64(c[1]));
    r.seed = to_u64(c[2]);
    r.final_loss = to_double(c[3]);
    r.log10_loss = to_double(c[4]);
    r.clamped = !(r.final_loss >= kLog10Floor);
    return r;
  });
}

std::string summaries_to_csv(const std::vector<SweepSummary>& summaries,
                             const std::vector<std::string>& metadata) {
  std::string out = with_metadata(metadata);
  out += kSummariesCsvHeader;
  out += '\n';
  for (const auto& s : summaries) {
    out += fmt::format("{},{},{:.17g},{:.17g},{}\n", s.scheme, s.k, s.mean_log10_loss,
                       s.std_log10_loss, s.n_seeds);
  }
  return out;
}

std::vector<SweepSummary> parse_summaries_csv(std::string_view text) {
  return parse_csv<SweepSummary>(text, kSummariesCsvHeader, 5, [](const auto& c) {
    SweepSummary s;
    s.scheme = std::string(c[0]);
    s.k = static_cast<std::size_t>(to_u64(c[1]));
    s.mean_log10_loss = to_double(c[2]);
    s.std_log10_loss = to_double(c[3]);
    s.n_seeds = static_cast<std::size_t>(to_u64(c[4]));
    return s;
  });
}

std::vector<std::string> sweep_metadata(const SweepPlan& plan, const SweepResult& result) {
  std::string ks;
  for (std::size_t i = 0; i < plan.k_values.size(); ++i) ks += fmt::format("{}{}", i ? ";" : "", plan.k_values[i]);
  std::string schemes;
  for (std::size_t i = 0; i < plan.schemes.size(); ++i) {
    schemes += fmt::format("{}{}", i ? ";" : "", to_string(plan.schemes[i]));
  }
  return {
      "sgdlab sweep",
      fmt::format("construction={}", to_string(plan.construction)),
      fmt::format("n={}", plan.n),
      fmt::format("grad_bound={:.17g}", plan.grad_bound),
      fmt::format("lambda={:.17g}", plan.lambda),
      fmt::format("lambda_max={:.17g}", plan.lambda_max),
      fmt::format("k_values={}", ks),
      fmt::format("seeds={}", plan.seeds),
      fmt::format("seed_base={}", plan.seed_base),
      fmt::format("x0_preset={}", to_string(plan.x0_preset)),
      fmt::format("eta_rule={}", to_string(plan.eta_rule)),
      fmt::format("couple_rng={}", plan.couple_rng),
      fmt::format("schemes={}", schemes),
      fmt::format("rng_algorithm_id={}", kRngAlgorithmId),
      fmt::format("log10_floor={:g}", kLog10Floor),
      fmt::format("clamped_records={}", result.clamped),
  };
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path,
              const std::vector<std::string>& metadata) {
  write_text_file(path, records_to_csv(records, metadata));
}

void emit_csv(const std::vector<SweepSummary>& summaries, const std::filesystem::path& path,
              const std::vector<std::string>& metadata) {
  write_text_file(path, summaries_to_csv(summaries, metadata));
}

}  // namespace sgdlab
