#include "lyz/svg.hpp"

#include "lyz/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace lyz {

namespace {

constexpr int kSize = 480;
constexpr int kCurvePoints = 256;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string header(const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
     << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
     << "<title>" << title << "</title>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<line x1=\"0\" y1=\"" << kSize / 2 << "\" x2=\"" << kSize << "\" y2=\"" << kSize / 2
     << "\" stroke=\"#bbb\"/>\n"
     << "<line x1=\"" << kSize / 2 << "\" y1=\"0\" x2=\"" << kSize / 2 << "\" y2=\"" << kSize
     << "\" stroke=\"#bbb\"/>\n";
  return os.str();
}

std::string polyline(const std::vector<Vec>& pts, double scale, const char* color) {
  std::ostringstream os;
  os << "<polygon fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    os << fmt(kSize / 2.0 + scale * pts[i](0)) << ',' << fmt(kSize / 2.0 - scale * pts[i](1));
  }
  os << "\"/>\n";
  return os.str();
}

}  // namespace

std::string svg_level_sets(const Mat& A, const std::vector<double>& levels, const std::string& title) {
  require_square(A, 2, "svg_level_sets");
  static const char* colors[] = {"#1f4e9c", "#b03a2e", "#2e7d32", "#6a1b9a"};
  const Mat Ainv_sqrt = spd_inv_sqrt(symmetrize(A));
  std::vector<std::vector<Vec>> curves;
  double extent = 0.0;
  for (double t : levels) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("svg_level_sets: levels must lie in (0, 1)");
    // x^T A x = -log t
    const double r = std::sqrt(-std::log(t));
    std::vector<Vec> pts;
    for (int k = 0; k < kCurvePoints; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kCurvePoints;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      pts.push_back(r * Ainv_sqrt * u);
      extent = std::max(extent, pts.back().cwiseAbs().maxCoeff());
    }
    curves.push_back(std::move(pts));
  }
  const double scale = 0.45 * kSize / std::max(extent, 1e-12);
  std::string out = header(title);
  for (std::size_t i = 0; i < curves.size(); ++i) out += polyline(curves[i], scale, colors[i % 4]);
  out += "</svg>\n";
  return out;
}

std::string svg_polar_profile(const Mat& directions, const Vec& h, const std::string& title) {
  if (directions.cols() != 2 || directions.rows() != h.size() || h.size() < 3)
    throw DomainError("svg_polar_profile: expected a 2-D direction table matching h");
  std::vector<Vec> pts;
  double extent = 0.0;
  for (Eigen::Index j = 0; j < h.size(); ++j) {
    pts.push_back(h(j) * directions.row(j).transpose());
    extent = std::max(extent, pts.back().cwiseAbs().maxCoeff());
  }
  const double scale = 0.45 * kSize / std::max(extent, 1e-12);
  std::string out = header(title);
  out += polyline(pts, scale, "#1f4e9c");
  out += "</svg>\n";
  return out;
}

}  // namespace lyz
