#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rigidity/errors.hpp"

namespace lab {

using nlohmann::json;
using rigidity::Vec2;

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw rigidity::ConfigError("cannot write " + p.string());
  out << text;
  return p;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + fmt(values[i]);
  text_ += "\n";
}

json level_json(const rigidity::InequalityLevel& l) {
  return {{"grid", {{"n_x", l.grid.n_x}, {"n_phi", l.grid.n_phi}, {"n_s", l.grid.n_s}}},
          {"lhs", l.lhs},
          {"rhs", l.rhs},
          {"margin", l.margin},
          {"rhs_richardson_error", l.rhs_richardson_error},
          {"lhs_gradient_norm", l.lhs_gradient_norm},
          {"max_identity_residual", l.max_identity_residual},
          {"max_flow_residual", l.max_flow_residual},
          {"covered_area", l.covered_area},
          {"collar_area", l.collar_area}};
}

json report_json(const rigidity::InequalityReport& r) {
  return {{"label", r.label},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"margin", r.margin},
          {"drift", r.drift},
          {"tol_grid", r.tol_grid},
          {"holds", r.holds},
          {"collar", r.collar},
          {"collar_halved_lhs", r.collar_halved_lhs},
          {"tangency_margin", r.tangency_margin},
          {"levels", {level_json(r.coarse), level_json(r.fine)}}};
}

Svg::Svg(double xmin, double ymin, double xmax, double ymax, int width)
    : xmin_(xmin), ymin_(ymin), xmax_(xmax), ymax_(ymax), width_(width) {
  scale_ = width / (xmax - xmin);
  height_ = int(std::ceil((ymax - ymin) * scale_));
}

double Svg::sx(double x) const { return (x - xmin_) * scale_; }
double Svg::sy(double y) const { return (ymax_ - y) * scale_; }

void Svg::polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width, bool closed) {
  std::string d;
  char buf[64];
  for (const Vec2& p : pts) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(p.x), sy(p.y));
    d += buf;
  }
  body_ += std::string(closed ? "<polygon" : "<polyline") + " fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt(width) + "\" points=\"" + d + "\"/>\n";
}

void Svg::rect(double x0, double y0, double x1, double y1, const std::string& fill) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                sx(std::min(x0, x1)), sy(std::max(y0, y1)), std::abs(x1 - x0) * scale_, std::abs(y1 - y0) * scale_,
                fill.c_str());
  body_ += buf;
}

void Svg::text(double x, double y, const std::string& s, int size) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"%d\" font-family=\"sans-serif\">", sx(x),
                sy(y), size);
  body_ += buf + s + "</text>\n";
}

std::string Svg::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
         std::to_string(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::vector<Vec2> boundary_polyline(const rigidity::Domain& domain, int samples) {
  std::vector<Vec2> pts;
  const auto& b = domain.boundary();
  for (int i = 0; i < samples; ++i) pts.push_back(b.point(b.total_length() * i / samples));
  return pts;
}

std::string margin_svg(const rigidity::InequalityReport& r) {
  double top = std::max({r.coarse.lhs, r.coarse.rhs, r.fine.lhs, r.fine.rhs, 1e-300}) * 1.15;
  Svg svg(0.0, -0.15 * top, 4.0, top, 480);
  const rigidity::InequalityLevel* levels[2] = {&r.coarse, &r.fine};
  for (int i = 0; i < 2; ++i) {
    double x = 0.4 + 2.0 * i;
    svg.rect(x, 0.0, x + 0.5, levels[i]->lhs, "#d95f02");
    svg.rect(x + 0.6, 0.0, x + 1.1, levels[i]->rhs, "#1b9e77");
    svg.text(x, -0.08 * top, levels[i]->grid.str(), 11);
  }
  svg.text(0.1, 1.05 * top, "lhs (orange) vs rhs (green)", 12);
  return svg.str();
}

}  // namespace lab
