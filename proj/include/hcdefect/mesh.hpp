#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hcd {

// Boundary / interface face markers.
inline constexpr int kMarkerOuter = 1;
inline constexpr int kMarkerInclusionInterface = 2;
inline constexpr int kMarkerDefectInterface = 3;

// Element region tags used by the meshers.
inline constexpr int kTagInclusion = 0;
inline constexpr int kTagMatrix = 1;
inline constexpr int kTagDefect = 2;
inline constexpr int kTagExterior = 3;

// Conforming triangle mesh with per-element region tags and marked
// boundary/interface edges. All elements are positively oriented.
struct SimplicialMesh {
  int dim = 2;
  std::vector<double> coords;     // interleaved x,y
  std::vector<int> elems;         // 3 vertex ids per element
  std::vector<int> elem_tag;      // region tag per element
  std::vector<int> bfaces;        // 2 vertex ids per marked edge
  std::vector<int> bface_marker;  // marker per edge

  int num_vertices() const { return static_cast<int>(coords.size() / 2); }
  int num_elements() const { return static_cast<int>(elems.size() / 3); }
  int num_bfaces() const { return static_cast<int>(bfaces.size() / 2); }

  double x(int v) const { return coords[2 * v]; }
  double y(int v) const { return coords[2 * v + 1]; }
  std::array<int, 3> element(int e) const {
    return {elems[3 * e], elems[3 * e + 1], elems[3 * e + 2]};
  }
  double element_area(int e) const;
  std::array<double, 2> barycenter(int e) const;

  // Ensures positive orientation by swapping vertices where needed.
  void fix_orientation();
  // Structural invariants: positive areas, interior edges shared by exactly
  // two elements. Throws NumericError on violation.
  void check_conforming() const;

  // Vertex ids for which pred(x, y) holds.
  std::vector<int> select_vertices(const std::function<bool(double, double)>& pred) const;
};

// Uniform triangulation of an axis-aligned rectangle, nx-by-ny cells split
// into two triangles each. Outer edges are marked kMarkerOuter.
SimplicialMesh rect_grid(double x0, double y0, double x1, double y1, int nx, int ny);

// Unit-cell grid helper used by periodic-identification tests.
SimplicialMesh unit_square_grid(int n);

// Fitted polar mesh of a disk of radius `radius` centered at (cx, cy); the
// circle is approximated by a polygon with edge length <= h. The boundary
// circle is marked with `boundary_marker`.
SimplicialMesh disk_mesh(double cx, double cy, double radius, double h, int boundary_marker);

// Periodicity cell [0,1]^2 with a centered disk inclusion of radius rho.
// Inclusion elements carry kTagInclusion, matrix elements kTagMatrix; the
// circle is marked kMarkerInclusionInterface and the square kMarkerOuter.
// The mesh is exactly symmetric under the dihedral symmetries of the cell,
// and opposite boundary faces match bitwise under unit translations.
SimplicialMesh cell_mesh(double rho, double h);

// Disk of radius r_outer with the circle r = r_interface fitted as a mesh
// ring; inside elements are tagged kTagDefect, outside kTagExterior. The
// angular resolution is chosen from r_interface and h only, so enlarging
// r_outer leaves the interior discretization identical.
SimplicialMesh truncated_disk_mesh(double r_interface, double r_outer, double h);

// ---- Interface-fitted cutting of a background grid ----------------------

struct CutCircle {
  double cx = 0.0, cy = 0.0, r = 1.0;
  int marker = kMarkerOuter;
};

// Splits mesh elements crossed by the circles so every final element lies
// on one side of each circle (polygonal interface approximation with the
// crossing points exactly on the circles). `locator` maps an element
// barycenter to indices of candidate circles (empty -> element untouched).
void cut_by_circles(SimplicialMesh& mesh, const std::vector<CutCircle>& circles,
                    const std::function<void(double, double, std::vector<int>&)>& locator,
                    double snap_fraction = 0.15);

// Drops elements for which keep(barycenter) is false, removing unused
// vertices and dangling marked edges.
void filter_elements(SimplicialMesh& mesh, const std::function<bool(double, double)>& keep);

// ---- Plain ASCII import/export -------------------------------------------

void write_mesh(std::ostream& os, const SimplicialMesh& mesh);
SimplicialMesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const SimplicialMesh& mesh);
SimplicialMesh load_mesh(const std::string& path);

}  // namespace hcd
