#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidity/hodograph.hpp"
#include "rigidity/rigidity_suite.hpp"

namespace lab {

namespace fs = std::filesystem;

// Writes text to dir/name, creating dir. Returns the full path.
fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text);

// Comma-separated rows with round-trip precision.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  std::string str() const { return text_; }

 private:
  std::string text_;
};

nlohmann::json report_json(const rigidity::InequalityReport& r);
nlohmann::json level_json(const rigidity::InequalityLevel& l);

// Minimal SVG canvas over a world box with y pointing up.
class Svg {
 public:
  Svg(double xmin, double ymin, double xmax, double ymax, int width = 600);
  void polyline(const std::vector<rigidity::Vec2>& pts, const std::string& stroke, double width = 1.0,
                bool closed = false);
  void rect(double x0, double y0, double x1, double y1, const std::string& fill);
  void text(double x, double y, const std::string& s, int size = 12);
  std::string str() const;

 private:
  double sx(double x) const;
  double sy(double y) const;
  double xmin_, ymin_, xmax_, ymax_, scale_;
  int width_, height_;
  std::string body_;
};

std::vector<rigidity::Vec2> boundary_polyline(const rigidity::Domain& domain, int samples = 256);

// Bars of lhs and rhs per grid level.
std::string margin_svg(const rigidity::InequalityReport& r);

}  // namespace lab
