#pragma once

#include <array>
#include <vector>

namespace hcd {

using Point = std::array<double, 3>;  // z ignored in 2D

// Phases of the composite medium: periodic soft inclusions, the stiff
// matrix, a compact defect at the origin, and the inclusion copies cut by
// the defect boundary.
enum class PhaseLabel { Inclusion, Matrix, Defect, BoundaryInclusion };

const char* phase_name(PhaseLabel label);

// Reference periodicity cell Q = [0,1)^n with a single ball inclusion.
struct CellGeometry {
  int dimension = 2;
  Point inclusion_center{0.5, 0.5, 0.5};
  double inclusion_radius = 0.3;
  double a0 = 1.0;  // inclusion stiffness prefactor, scaled a0 * eps^2
  double a1 = 1.0;  // matrix stiffness

  void validate() const;  // throws GeometryError
  // Volume of the reference inclusion Q0 (|Q| = 1).
  double inclusion_volume() const;
};

// Compact defect centered at the origin: a ball, or a 2D polygon.
struct DefectSpec {
  enum class Shape { Ball, Polygon };
  Shape shape = Shape::Ball;
  double radius = 1.0;
  double a2 = 1.0;
  std::vector<std::array<double, 2>> polygon;  // CCW, used when shape == Polygon

  void validate(int dimension) const;
  bool contains(const Point& x, int dimension) const;  // closed defect region
  // Distance from a point to the defect boundary (exact for ball and polygon).
  double boundary_distance(const Point& x, int dimension) const;
};

// Stiffness assigned to inclusion copies cut by the defect boundary.
struct BoundaryInclusionPolicy {
  enum class Mode { DoublePorosity, OrderOne, PowerLaw };
  Mode mode = Mode::DoublePorosity;
  double a_tilde0 = 1.0;  // DoublePorosity: a_tilde0 * eps^2
  double A0 = 1.0;        // OrderOne: A0
  double A_hat0 = 1.0;    // PowerLaw: A_hat0 * eps^(2-theta)
  double theta = 1.0;     // in (0, 2]

  void validate() const;
  double value(double eps) const;
};

// Phase of a point of R^n in the eps-periodic medium with the defect.
PhaseLabel classify_point(const CellGeometry& geom, const DefectSpec& defect, double eps,
                          const Point& x);

// Piecewise-constant coefficient field a(x, eps).
double coefficient_at(const CellGeometry& geom, const DefectSpec& defect,
                      const BoundaryInclusionPolicy& policy, double eps, const Point& x);

// Centers (in physical coordinates) and radius of all inclusion copies whose
// closed ball intersects the disk |x| <= r_dom. 2D helper for meshing.
struct InclusionCopies {
  std::vector<std::array<double, 2>> centers;
  double radius = 0.0;
};
InclusionCopies inclusion_copies_in_disk(const CellGeometry& geom, double eps, double r_dom);

}  // namespace hcd
