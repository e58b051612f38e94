#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"

namespace fixpoint {

namespace {

constexpr double kLeft = 70.0, kRight = 770.0, kTop = 30.0, kBottom = 440.0;
constexpr double kLogFloor = -16.0;  // values below 1e-16 are clamped to the floor

double log_clamped(double v) {
  if (!(v > 1e-16)) return kLogFloor;
  return std::log10(v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Series {
  std::string color;
  std::string label;
  std::vector<double> x;  // iteration index
  std::vector<double> y;  // log10 scale
};

}  // namespace

std::string plot_svg_from_csv(const std::string& csv_text) {
  const Trace trace = trace_from_csv(csv_text);
  if (trace.records.empty()) throw config_error("empty trace");

  Series residual{"#1f77b4", "residual", {}, {}};
  Series dist{"#d62728", "dist_to_target", {}, {}};
  for (const auto& rec : trace.records) {
    const double n = static_cast<double>(rec.n);
    double rmax = 0.0;
    for (double r : rec.residuals) rmax = std::max(rmax, r);
    residual.x.push_back(n);
    residual.y.push_back(log_clamped(rmax));
    if (rec.dist_to_target) {
      dist.x.push_back(n);
      dist.y.push_back(log_clamped(*rec.dist_to_target));
    }
  }

  std::vector<const Series*> series{&residual};
  if (!dist.x.empty()) series.push_back(&dist);

  double x_min = residual.x.front(), x_max = residual.x.back();
  if (x_max <= x_min) x_max = x_min + 1.0;
  double y_min = 0.0, y_max = 0.0;
  bool first = true;
  for (const Series* s : series)
    for (double v : s->y) {
      if (first) {
        y_min = y_max = v;
        first = false;
      } else {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
  if (y_max - y_min < 1e-9) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const auto sx = [&](double n) {
    return kLeft + (n - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  const auto sy = [&](double v) {
    return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::string svg;
  svg +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"500\" "
      "viewBox=\"0 0 800 500\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + fmt(kRight) +
         "\" y2=\"" + fmt(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(kBottom) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + fmt(kLeft) + "\" y=\"460\" font-size=\"12\" text-anchor=\"middle\">" +
         fmt(x_min) + "</text>\n";
  svg += "<text x=\"" + fmt(kRight) + "\" y=\"460\" font-size=\"12\" text-anchor=\"middle\">" +
         fmt(x_max) + "</text>\n";
  svg += "<text x=\"400\" y=\"485\" font-size=\"12\" text-anchor=\"middle\">iteration</text>\n";
  svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(kBottom) +
         "\" font-size=\"12\" text-anchor=\"end\">" + fmt(y_min) + "</text>\n";
  svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(kTop + 4) +
         "\" font-size=\"12\" text-anchor=\"end\">" + fmt(y_max) + "</text>\n";
  svg +=
      "<text x=\"16\" y=\"235\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 235)\">log10 value</text>\n";

  double legend_y = kTop + 10.0;
  for (const Series* s : series) {
    if (s->x.size() > 1) {
      svg += "<polyline fill=\"none\" stroke=\"" + s->color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s->x.size(); ++i) {
        if (i) svg += ' ';
        svg += fmt(sx(s->x[i])) + "," + fmt(sy(s->y[i]));
      }
      svg += "\"/>\n";
    }
    if (s->x.size() <= 32) {
      for (std::size_t i = 0; i < s->x.size(); ++i)
        svg += "<circle cx=\"" + fmt(sx(s->x[i])) + "\" cy=\"" + fmt(sy(s->y[i])) +
               "\" r=\"3\" fill=\"" + s->color + "\"/>\n";
    }
    svg += "<rect x=\"600\" y=\"" + fmt(legend_y - 9) + "\" width=\"12\" height=\"12\" fill=\"" +
           s->color + "\"/>\n";
    svg += "<text x=\"618\" y=\"" + fmt(legend_y + 1) + "\" font-size=\"12\">" + s->label +
           "</text>\n";
    legend_y += 18.0;
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::filesystem::path& trace_csv, const std::filesystem::path& out_svg) {
  std::ifstream in(trace_csv, std::ios::binary);
  if (!in) throw config_error("cannot open trace file '" + trace_csv.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  write_text_atomic(out_svg, plot_svg_from_csv(buf.str()));
}

}  // namespace fixpoint
