#include "hcdefect/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hcdefect/errors.hpp"

namespace hcd {

namespace {

double norm2d(double x, double y) { return std::hypot(x, y); }

double point_norm(const Point& x, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += x[d] * x[d];
  return std::sqrt(s);
}

double segment_distance(const std::array<double, 2>& p, const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
  double dx = b[0] - a[0], dy = b[1] - a[1];
  double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm2d(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

bool point_in_polygon(const std::array<double, 2>& p,
                      const std::vector<std::array<double, 2>>& poly) {
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    bool cross = ((poly[i][1] > p[1]) != (poly[j][1] > p[1])) &&
                 (p[0] < (poly[j][0] - poly[i][0]) * (p[1] - poly[i][1]) /
                                 (poly[j][1] - poly[i][1]) +
                             poly[i][0]);
    if (cross) inside = !inside;
  }
  return inside;
}

}  // namespace

const char* phase_name(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Inclusion: return "inclusion";
    case PhaseLabel::Matrix: return "matrix";
    case PhaseLabel::Defect: return "defect";
    case PhaseLabel::BoundaryInclusion: return "boundary-inclusion";
  }
  return "?";
}

void CellGeometry::validate() const {
  if (dimension != 2 && dimension != 3)
    throw GeometryError("geometry.dimension: must be 2 or 3");
  if (!(a0 > 0.0)) throw GeometryError("geometry.a0: must be positive");
  if (!(a1 > 0.0)) throw GeometryError("geometry.a1: must be positive");
  if (!(inclusion_radius > 0.0))
    throw GeometryError("geometry.inclusion.radius: must be positive");
  double margin = std::numeric_limits<double>::max();
  for (int d = 0; d < dimension; ++d) {
    double c = inclusion_center[d];
    margin = std::min({margin, c, 1.0 - c});
  }
  if (!(inclusion_radius < margin))
    throw GeometryError(
        "geometry.inclusion.radius: closure of the inclusion must lie strictly inside the "
        "unit cell (radius " +
        std::to_string(inclusion_radius) + " >= margin " + std::to_string(margin) + ")");
}

double CellGeometry::inclusion_volume() const {
  double rho = inclusion_radius;
  return dimension == 2 ? M_PI * rho * rho : 4.0 / 3.0 * M_PI * rho * rho * rho;
}

void DefectSpec::validate(int dimension) const {
  if (!(a2 > 0.0)) throw GeometryError("defect.a2: must be positive");
  if (shape == Shape::Ball) {
    if (!(radius > 0.0)) throw GeometryError("defect.radius: must be positive");
  } else {
    if (dimension != 2) throw GeometryError("defect.shape: polygon defects are 2D only");
    if (polygon.size() < 3) throw GeometryError("defect.polygon: needs at least 3 vertices");
  }
}

bool DefectSpec::contains(const Point& x, int dimension) const {
  if (shape == Shape::Ball) return point_norm(x, dimension) <= radius;
  std::array<double, 2> p{x[0], x[1]};
  return point_in_polygon(p, polygon) || boundary_distance(x, 2) == 0.0;
}

double DefectSpec::boundary_distance(const Point& x, int dimension) const {
  if (shape == Shape::Ball) return std::abs(point_norm(x, dimension) - radius);
  std::array<double, 2> p{x[0], x[1]};
  double d = std::numeric_limits<double>::max();
  size_t n = polygon.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    d = std::min(d, segment_distance(p, polygon[j], polygon[i]));
  return d;
}

void BoundaryInclusionPolicy::validate() const {
  switch (mode) {
    case Mode::DoublePorosity:
      if (!(a_tilde0 > 0.0)) throw GeometryError("validation.policy.a_tilde0: must be positive");
      break;
    case Mode::OrderOne:
      if (!(A0 > 0.0)) throw GeometryError("validation.policy.A0: must be positive");
      break;
    case Mode::PowerLaw:
      if (!(A_hat0 > 0.0)) throw GeometryError("validation.policy.A_hat0: must be positive");
      if (!(theta > 0.0) || theta > 2.0)
        throw GeometryError("validation.policy.theta: must lie in (0, 2]");
      break;
  }
}

double BoundaryInclusionPolicy::value(double eps) const {
  switch (mode) {
    case Mode::DoublePorosity: return a_tilde0 * eps * eps;
    case Mode::OrderOne: return A0;
    case Mode::PowerLaw: return A_hat0 * std::pow(eps, 2.0 - theta);
  }
  return a_tilde0 * eps * eps;
}

PhaseLabel classify_point(const CellGeometry& geom, const DefectSpec& defect, double eps,
                          const Point& x) {
  if (!(eps > 0.0)) throw GeometryError("classify_point: eps must be positive");
  const int dim = geom.dimension;
  // Closed defect wins ties on its boundary.
  if (defect.contains(x, dim)) return PhaseLabel::Defect;

  // Locate the inclusion copy of the cell containing x. The closure of the
  // reference inclusion is strictly interior to the cell, so the copy of a
  // point's own cell is the only candidate.
  Point center{0, 0, 0};
  double local2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    double cell = std::floor(x[d] / eps);
    center[d] = eps * (cell + geom.inclusion_center[d]);
    double dloc = x[d] - center[d];
    local2 += dloc * dloc;
  }
  double r = eps * geom.inclusion_radius;
  if (!(local2 < r * r)) return PhaseLabel::Matrix;  // interface ties resolve to matrix

  // Inside an inclusion copy (and outside the defect); split on whether the
  // copy's closed ball meets the defect boundary.
  double dist = defect.boundary_distance(center, dim);
  if (dist <= r) return PhaseLabel::BoundaryInclusion;
  return PhaseLabel::Inclusion;
}

double coefficient_at(const CellGeometry& geom, const DefectSpec& defect,
                      const BoundaryInclusionPolicy& policy, double eps, const Point& x) {
  switch (classify_point(geom, defect, eps, x)) {
    case PhaseLabel::Inclusion: return geom.a0 * eps * eps;
    case PhaseLabel::Matrix: return geom.a1;
    case PhaseLabel::Defect: return defect.a2;
    case PhaseLabel::BoundaryInclusion: return policy.value(eps);
  }
  return geom.a1;
}

InclusionCopies inclusion_copies_in_disk(const CellGeometry& geom, double eps, double r_dom) {
  InclusionCopies out;
  out.radius = eps * geom.inclusion_radius;
  long kmax = static_cast<long>(std::ceil((r_dom + eps) / eps)) + 1;
  for (long i = -kmax; i <= kmax; ++i) {
    for (long j = -kmax; j <= kmax; ++j) {
      double cx = eps * (i + geom.inclusion_center[0]);
      double cy = eps * (j + geom.inclusion_center[1]);
      if (norm2d(cx, cy) <= r_dom + out.radius) out.centers.push_back({cx, cy});
    }
  }
  return out;
}

}  // namespace hcd
