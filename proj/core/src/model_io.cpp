#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "sgdlab/model.hpp"

namespace sgdlab {
namespace {

using nlohmann::json;

json to_array(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Vector from_array(const json& j, const char* field) {
  if (!j.is_array()) throw std::invalid_argument(fmt::format("problem JSON: '{}' must be an array", field));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

std::string problem_to_json(const Problem& p) {
  json doc;
  doc["n"] = p.size();
  doc["dim"] = p.dim();
  doc["lambda"] = p.lambda();
  doc["lambda_max"] = p.lambda_max();
  doc["smooth_l"] = p.smooth_l();
  doc["grad_bound"] = p.grad_bound();
  json components = json::array();
  for (const auto& c : p.components()) {
    components.push_back({{"curvatures", to_array(c.curvatures)}, {"linear", to_array(c.linear)}});
  }
  doc["components"] = std::move(components);
  if (p.conjugation()) {
    json rows = json::array();
    const Matrix& o = *p.conjugation();
    for (Eigen::Index r = 0; r < o.rows(); ++r) rows.push_back(to_array(o.row(r).transpose()));
    doc["conjugation"] = std::move(rows);
  }
  return doc.dump(2);
}

Problem problem_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("problem JSON: {}", e.what()));
  }
  try {
    std::vector<Component> components;
    for (const auto& c : doc.at("components")) {
      components.push_back({from_array(c.at("curvatures"), "curvatures"),
                            from_array(c.at("linear"), "linear")});
    }
    if (components.size() != doc.at("n").get<std::size_t>()) {
      throw std::invalid_argument("problem JSON: 'n' does not match the component count");
    }
    if (!components.empty() &&
        static_cast<std::size_t>(components.front().curvatures.size()) !=
            doc.at("dim").get<std::size_t>()) {
      throw std::invalid_argument("problem JSON: 'dim' does not match the component data");
    }
    ProblemParameters params{doc.at("lambda").get<double>(), doc.at("lambda_max").get<double>(),
                             doc.at("smooth_l").get<double>(), doc.at("grad_bound").get<double>()};
    std::optional<Matrix> conjugation;
    if (doc.contains("conjugation") && !doc["conjugation"].is_null()) {
      const auto& rows = doc["conjugation"];
      const auto d = static_cast<Eigen::Index>(rows.size());
      Matrix o(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        const Vector row = from_array(rows[static_cast<std::size_t>(r)], "conjugation");
        if (row.size() != d) throw std::invalid_argument("problem JSON: conjugation must be square");
        o.row(r) = row.transpose();
      }
      conjugation = std::move(o);
    }
    return Problem(std::move(components), params, std::move(conjugation));
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("problem JSON: {}", e.what()));
  }
}

void save_problem(const Problem& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << problem_to_json(p) << '\n';
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return problem_from_json(buffer.str());
}

}  // namespace sgdlab
