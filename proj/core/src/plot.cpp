#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "sgdlab/experiments.hpp"

namespace sgdlab {
namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string color_for(std::string_view series, std::size_t index) {
  if (series == "wr") return "#1f77b4";
  if (series == "ss") return "#d62728";
  if (series == "rr") return "#2ca02c";
  static constexpr const char* kOthers[] = {"#9467bd", "#8c564b", "#7f7f7f", "#e377c2", "#bcbd22"};
  return kOthers[index % std::size(kOthers)];
}

std::string legend_label(std::string_view series) {
  if (series == "wr") return "with replacement (wr)";
  if (series == "ss") return "single shuffling (ss)";
  if (series == "rr") return "random reshuffling (rr)";
  return std::string(series);
}

bool is_bound(std::string_view series) { return series.starts_with("bound:"); }

// Marker centered at (x, y): circle for wr, plus for ss, triangle for rr.
std::string marker(std::string_view series, double x, double y, const std::string& color) {
  if (series == "ss") {
    return fmt::format(
        "<path d=\"M{:.2f},{:.2f}h8M{:.2f},{:.2f}v8\" stroke=\"{}\" stroke-width=\"2\"/>\n", x - 4,
        y, x, y - 4, color);
  }
  if (series == "rr") {
    return fmt::format("<path d=\"M{:.2f},{:.2f}L{:.2f},{:.2f}L{:.2f},{:.2f}Z\" fill=\"{}\"/>\n",
                       x, y - 4.5, x + 4, y + 3, x - 4, y + 3, color);
  }
  return fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n", x, y, color);
}

}  // namespace

std::string render_svg(const std::vector<SweepSummary>& summaries, const SvgOptions& options) {
  std::vector<std::string> series;
  for (const auto& s : summaries) {
    if (std::find(series.begin(), series.end(), s.scheme) == series.end()) series.push_back(s.scheme);
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  std::vector<std::size_t> ks;
  for (const auto& s : summaries) {
    const double x = std::log10(static_cast<double>(std::max<std::size_t>(s.k, 1)));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, s.mean_log10_loss - s.std_log10_loss);
    ymax = std::max(ymax, s.mean_log10_loss + s.std_log10_loss);
    if (std::find(ks.begin(), ks.end(), s.k) == ks.end()) ks.push_back(s.k);
  }
  std::sort(ks.begin(), ks.end());
  if (summaries.empty()) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = -1.0;
    ymax = 0.0;
  }
  if (xmax - xmin < 1e-9) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax - ymin < 1.0) ymax = ymin + 1.0;

  const double w = options.width, h = options.height;
  const double left = 70, right = 230, top = 40, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      options.width, options.height, options.width, options.height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       left + pw / 2, escape_xml(options.title));
  }

  // Axes, ticks and labels.
  out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                     "stroke=\"black\"/>\n",
                     left, top, pw, ph);
  for (const std::size_t k : ks) {
    const double x = px(std::log10(static_cast<double>(std::max<std::size_t>(k, 1))));
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                       x, top + ph, top + ph + 5);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x,
                       top + ph + 18, k);
  }
  const double span = ymax - ymin;
  const double step = span <= 10 ? 1.0 : std::ceil(span / 10.0);
  for (double y = ymin; y <= ymax + 1e-9; y += step) {
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n",
                       left, py(y), left + pw);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", left - 6,
                       py(y) + 4, y);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">k</text>\n", left + pw / 2,
                     h - 18);
  out += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">"
      "log10 F(x_k)</text>\n",
      top + ph / 2);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const std::string& name = series[si];
    const std::string color = color_for(name, si);
    const bool bound = is_bound(name);
    std::string points;
    for (const auto& s : summaries) {
      if (s.scheme != name) continue;
      const double x = px(std::log10(static_cast<double>(std::max<std::size_t>(s.k, 1))));
      points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", x, py(s.mean_log10_loss));
      if (!bound) {
        out += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\" "
            "stroke-opacity=\"0.6\"/>\n",
            x, py(s.mean_log10_loss + s.std_log10_loss), py(s.mean_log10_loss - s.std_log10_loss),
            color);
        out += marker(name, x, py(s.mean_log10_loss), color);
      }
    }
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n",
                       points, color, bound ? " stroke-dasharray=\"6 4\"" : "");

    const double ly = top + 10 + 20 * static_cast<double>(si);
    const double lx = left + pw + 15;
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"1.5\"{}/>\n",
                       lx, ly, lx + 24, ly, color, bound ? " stroke-dasharray=\"6 4\"" : "");
    if (!bound) out += marker(name, lx + 12, ly, color);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 30, ly + 4,
                       escape_xml(legend_label(name)));
  }
  out += "</svg>\n";
  return out;
}

void emit_svg(const std::vector<SweepSummary>& summaries, const std::filesystem::path& path,
              const SvgOptions& options) {
  write_text_file(path, render_svg(summaries, options));
}

}  // namespace sgdlab
