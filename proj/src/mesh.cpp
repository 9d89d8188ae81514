#include "hcdefect/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hcdefect/errors.hpp"

namespace hcd {

namespace {

constexpr double kPi = 3.14159265358979323846;

double tri_area(double ax, double ay, double bx, double by, double cx, double cy) {
  return 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
}

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

// Directions (cos, sin) at angles (k + offset) * 2*pi/N, offset 0 or 1/2,
// N divisible by 8. Values are generated on the first octant and completed
// by exact coordinate reflections, so the set is bitwise symmetric under
// the dihedral group of the square.
std::vector<std::array<double, 2>> symmetric_directions(int N, double offset) {
  std::vector<std::array<double, 2>> dir(N);
  int eighth = N / 8;
  auto place = [&](int idx, double px, double py) {
    idx = ((idx % N) + N) % N;
    dir[idx] = {px, py};
  };
  int kmax = (offset == 0.0) ? eighth : eighth - 1;
  for (int k = 0; k <= kmax; ++k) {
    double theta = (k + offset) * 2.0 * kPi / N;
    double c = std::cos(theta), s = std::sin(theta);
    if (offset == 0.0 && k == 0) {
      c = 1.0;
      s = 0.0;
    }
    if (offset == 0.0 && k == eighth) s = c;  // exact diagonal
    int q = (offset == 0.0) ? 0 : 1;
    place(k, c, s);
    place(N / 4 - q - k, s, c);
    place(N / 4 + k, -s, c);
    place(N / 2 - q - k, -c, s);
    place(N / 2 + k, -c, -s);
    place(3 * N / 4 - q - k, -s, -c);
    place(3 * N / 4 + k, s, -c);
    place(N - q - k, c, -s);
  }
  return dir;
}

// Builder that appends union-jack bands between consecutive vertex rings.
struct PolarBuilder {
  SimplicialMesh mesh;

  int add_vertex(double px, double py) {
    mesh.coords.push_back(px);
    mesh.coords.push_back(py);
    return mesh.num_vertices() - 1;
  }
  void add_tri(int a, int b, int c, int tag) {
    mesh.elems.insert(mesh.elems.end(), {a, b, c});
    mesh.elem_tag.push_back(tag);
  }
  // Ring A (inner), ring B (outer), ring M of quad centers, all of size N.
  void add_band(const std::vector<int>& A, const std::vector<int>& B, const std::vector<int>& M,
                int tag) {
    int N = static_cast<int>(A.size());
    for (int k = 0; k < N; ++k) {
      int kp = (k + 1) % N;
      add_tri(A[k], A[kp], M[k], tag);
      add_tri(A[kp], B[kp], M[k], tag);
      add_tri(B[kp], B[k], M[k], tag);
      add_tri(B[k], A[k], M[k], tag);
    }
  }
  void add_fan(int center, const std::vector<int>& ring, int tag) {
    int N = static_cast<int>(ring.size());
    for (int k = 0; k < N; ++k) add_tri(center, ring[k], ring[(k + 1) % N], tag);
  }
  void mark_ring(const std::vector<int>& ring, int marker) {
    int N = static_cast<int>(ring.size());
    for (int k = 0; k < N; ++k) {
      mesh.bfaces.insert(mesh.bfaces.end(), {ring[k], ring[(k + 1) % N]});
      mesh.bface_marker.push_back(marker);
    }
  }
  std::vector<int> circular_ring(double cx, double cy, double radius,
                                 const std::vector<std::array<double, 2>>& dirs) {
    std::vector<int> ids(dirs.size());
    for (size_t k = 0; k < dirs.size(); ++k)
      ids[k] = add_vertex(cx + radius * dirs[k][0], cy + radius * dirs[k][1]);
    return ids;
  }
};

int angular_count(double arc_length, double h) {
  int n = static_cast<int>(std::ceil(arc_length / (8.0 * h)));
  return 8 * std::max(2, n);
}

}  // namespace

double SimplicialMesh::element_area(int e) const {
  auto [a, b, c] = element(e);
  return tri_area(x(a), y(a), x(b), y(b), x(c), y(c));
}

std::array<double, 2> SimplicialMesh::barycenter(int e) const {
  auto [a, b, c] = element(e);
  return {(x(a) + x(b) + x(c)) / 3.0, (y(a) + y(b) + y(c)) / 3.0};
}

void SimplicialMesh::fix_orientation() {
  for (int e = 0; e < num_elements(); ++e)
    if (element_area(e) < 0.0) std::swap(elems[3 * e + 1], elems[3 * e + 2]);
}

void SimplicialMesh::check_conforming() const {
  std::unordered_map<uint64_t, int> count;
  count.reserve(elems.size());
  double max_area = 0.0;
  for (int e = 0; e < num_elements(); ++e) max_area = std::max(max_area, element_area(e));
  for (int e = 0; e < num_elements(); ++e) {
    double area = element_area(e);
    if (!(area > 1e-14 * max_area))
      throw NumericError("mesh: degenerate element " + std::to_string(e) + " (area " +
                         std::to_string(area) + ")");
    auto [a, b, c] = element(e);
    for (auto [u, v] : {std::pair{a, b}, {b, c}, {c, a}}) ++count[edge_key(u, v)];
  }
  for (auto& [key, n] : count)
    if (n > 2)
      throw NumericError("mesh: edge shared by " + std::to_string(n) + " elements (non-conforming)");
}

std::vector<int> SimplicialMesh::select_vertices(
    const std::function<bool(double, double)>& pred) const {
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v)
    if (pred(x(v), y(v))) out.push_back(v);
  return out;
}

SimplicialMesh rect_grid(double x0, double y0, double x1, double y1, int nx, int ny) {
  SimplicialMesh m;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      m.coords.push_back(x0 + (x1 - x0) * i / nx);
      m.coords.push_back(y0 + (y1 - y0) * j / ny);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.elems.insert(m.elems.end(), {a, b, c});
      m.elems.insert(m.elems.end(), {a, c, d});
      m.elem_tag.push_back(kTagMatrix);
      m.elem_tag.push_back(kTagMatrix);
    }
  for (int i = 0; i < nx; ++i) {
    m.bfaces.insert(m.bfaces.end(), {vid(i, 0), vid(i + 1, 0)});
    m.bface_marker.push_back(kMarkerOuter);
    m.bfaces.insert(m.bfaces.end(), {vid(i + 1, ny), vid(i, ny)});
    m.bface_marker.push_back(kMarkerOuter);
  }
  for (int j = 0; j < ny; ++j) {
    m.bfaces.insert(m.bfaces.end(), {vid(nx, j), vid(nx, j + 1)});
    m.bface_marker.push_back(kMarkerOuter);
    m.bfaces.insert(m.bfaces.end(), {vid(0, j + 1), vid(0, j)});
    m.bface_marker.push_back(kMarkerOuter);
  }
  return m;
}

SimplicialMesh unit_square_grid(int n) { return rect_grid(0.0, 0.0, 1.0, 1.0, n, n); }

SimplicialMesh disk_mesh(double cx, double cy, double radius, double h, int boundary_marker) {
  if (!(radius > 0.0) || !(h > 0.0)) throw GeometryError("disk_mesh: radius and h must be positive");
  int N = angular_count(2.0 * kPi * radius, h);
  int m = std::max(1, static_cast<int>(std::lround(radius / h)));
  auto dirs = symmetric_directions(N, 0.0);
  auto mids = symmetric_directions(N, 0.5);

  PolarBuilder pb;
  int center = pb.add_vertex(cx, cy);
  std::vector<std::vector<int>> ring(m + 1);
  for (int j = 1; j <= m; ++j) ring[j] = pb.circular_ring(cx, cy, radius * j / m, dirs);
  pb.add_fan(center, ring[1], kTagInclusion);
  for (int j = 1; j < m; ++j) {
    std::vector<int> mid = pb.circular_ring(cx, cy, radius * (j + 0.5) / m, mids);
    pb.add_band(ring[j], ring[j + 1], mid, kTagInclusion);
  }
  pb.mark_ring(ring[m], boundary_marker);
  pb.mesh.fix_orientation();
  return std::move(pb.mesh);
}

SimplicialMesh truncated_disk_mesh(double r_interface, double r_outer, double h) {
  if (!(0.0 < r_interface && r_interface < r_outer))
    throw GeometryError("truncated_disk_mesh: need 0 < r_interface < r_outer");
  int N = angular_count(2.0 * kPi * r_interface, h);
  int m_in = std::max(2, static_cast<int>(std::lround(r_interface / h)));
  auto dirs = symmetric_directions(N, 0.0);
  auto mids = symmetric_directions(N, 0.5);

  PolarBuilder pb;
  int center = pb.add_vertex(0.0, 0.0);

  // Interior radii, then fixed-step exterior radii so that enlarging
  // r_outer extends the mesh without touching shared rings.
  std::vector<double> radii;
  for (int j = 1; j <= m_in; ++j) radii.push_back(r_interface * j / m_in);
  int iface_ring = m_in - 1;  // index into radii
  double r = r_interface;
  while (r + h < r_outer - 1e-12) {
    r += h;
    radii.push_back(r);
  }
  radii.push_back(r_outer);

  std::vector<std::vector<int>> ring(radii.size());
  for (size_t j = 0; j < radii.size(); ++j) ring[j] = pb.circular_ring(0.0, 0.0, radii[j], dirs);
  pb.add_fan(center, ring[0], kTagDefect);
  for (size_t j = 0; j + 1 < radii.size(); ++j) {
    double mid_r = 0.5 * (radii[j] + radii[j + 1]);
    std::vector<int> mid = pb.circular_ring(0.0, 0.0, mid_r, mids);
    int tag = (static_cast<int>(j) < iface_ring) ? kTagDefect : kTagExterior;
    pb.add_band(ring[j], ring[j + 1], mid, tag);
  }
  pb.mark_ring(ring[iface_ring], kMarkerDefectInterface);
  pb.mark_ring(ring.back(), kMarkerOuter);
  pb.mesh.fix_orientation();
  return std::move(pb.mesh);
}

SimplicialMesh cell_mesh(double rho, double h) {
  if (!(rho > 0.0 && rho < 0.5)) throw GeometryError("cell_mesh: need 0 < rho < 1/2");
  if (!(h > 0.0)) throw GeometryError("cell_mesh: h must be positive");
  const double cx = 0.5, cy = 0.5;
  int N = angular_count(std::max(2.0 * kPi * rho, 4.5), h);
  int eighth = N / 8;
  auto dirs = symmetric_directions(N, 0.0);
  auto mids = symmetric_directions(N, 0.5);

  PolarBuilder pb;

  // Inclusion disk.
  int m_in = std::max(1, static_cast<int>(std::lround(rho / h)));
  int center = pb.add_vertex(cx, cy);
  std::vector<std::vector<int>> ring(m_in + 1);
  for (int j = 1; j <= m_in; ++j) ring[j] = pb.circular_ring(cx, cy, rho * j / m_in, dirs);
  pb.add_fan(center, ring[1], kTagInclusion);
  for (int j = 1; j < m_in; ++j) {
    std::vector<int> mid = pb.circular_ring(cx, cy, rho * (j + 0.5) / m_in, mids);
    pb.add_band(ring[j], ring[j + 1], mid, kTagInclusion);
  }
  std::vector<int> circle = ring[m_in];

  // Matrix annulus between the circle and the square boundary. Points are
  // generated on the first octant (relative to the cell center) and
  // completed by exact reflections, so opposite faces match bitwise.
  int m_ann = std::max(1, static_cast<int>(std::ceil((0.5 * std::sqrt(2.0) - rho) / h)));

  auto reflect_fill = [&](std::vector<std::array<double, 2>>& rel, int k, double px, double py,
                          int q) {
    auto place = [&](int idx, double vx, double vy) {
      idx = ((idx % N) + N) % N;
      rel[idx] = {vx, vy};
    };
    place(k, px, py);
    place(N / 4 - q - k, py, px);
    place(N / 4 + k, -py, px);
    place(N / 2 - q - k, -px, py);
    place(N / 2 + k, -px, -py);
    place(3 * N / 4 - q - k, -py, -px);
    place(3 * N / 4 + k, py, -px);
    place(N - q - k, px, -py);
  };

  // Distance from the center to the square boundary along each octant ray.
  std::vector<double> t_main(eighth + 1), t_mid(eighth);
  for (int k = 0; k <= eighth; ++k) t_main[k] = 0.5 / dirs[k][0];
  for (int k = 0; k < eighth; ++k) t_mid[k] = 0.5 / mids[k][0];

  std::vector<std::vector<int>> aring(m_ann + 1);
  aring[0] = circle;
  for (int j = 1; j <= m_ann; ++j) {
    std::vector<std::array<double, 2>> rel(N);
    for (int k = 0; k <= eighth; ++k) {
      if (j == m_ann) {
        // Exact square-boundary point: x-offset 1/2, y-offset in [0, 1/2].
        double w = (k == eighth) ? 0.5 : 0.5 * dirs[k][1] / dirs[k][0];
        reflect_fill(rel, k, 0.5, w, 0);
      } else {
        double rr = rho + (t_main[k] - rho) * j / m_ann;
        reflect_fill(rel, k, rr * dirs[k][0], rr * dirs[k][1], 0);
      }
    }
    aring[j].resize(N);
    for (int k = 0; k < N; ++k) aring[j][k] = pb.add_vertex(cx + rel[k][0], cy + rel[k][1]);
  }
  for (int j = 0; j < m_ann; ++j) {
    std::vector<std::array<double, 2>> rel(N);
    for (int k = 0; k < eighth; ++k) {
      double rr = rho + (t_mid[k] - rho) * (j + 0.5) / m_ann;
      reflect_fill(rel, k, rr * mids[k][0], rr * mids[k][1], 1);
    }
    std::vector<int> mid(N);
    for (int k = 0; k < N; ++k) mid[k] = pb.add_vertex(cx + rel[k][0], cy + rel[k][1]);
    pb.add_band(aring[j], aring[j + 1], mid, kTagMatrix);
  }

  pb.mark_ring(circle, kMarkerInclusionInterface);
  pb.mark_ring(aring[m_ann], kMarkerOuter);
  pb.mesh.fix_orientation();
  return std::move(pb.mesh);
}

// ---- circle cutting -------------------------------------------------------

namespace {

struct CutState {
  SimplicialMesh* mesh;
  const std::vector<CutCircle>* circles;
  std::unordered_map<uint64_t, int> edge_split;  // accumulated over all passes
  std::set<std::pair<int, int>> iface_edges_seen;
  std::vector<std::array<int, 3>> iface;  // a, b, marker

  double phi(int v, const CutCircle& c) const {
    return std::hypot(mesh->x(v) - c.cx, mesh->y(v) - c.cy) - c.r;
  }

  int crossing_vertex(int a, int b, const CutCircle& c) {
    uint64_t key = edge_key(a, b);
    auto it = edge_split.find(key);
    if (it != edge_split.end()) return it->second;
    int lo = std::min(a, b), hi = std::max(a, b);
    double ax = mesh->x(lo) - c.cx, ay = mesh->y(lo) - c.cy;
    double dx = mesh->x(hi) - ax - c.cx, dy = mesh->y(hi) - ay - c.cy;
    double qa = dx * dx + dy * dy;
    double qb = 2.0 * (ax * dx + ay * dy);
    double qc = ax * ax + ay * ay - c.r * c.r;
    double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
    double sq = std::sqrt(disc);
    double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
    double t1 = qa != 0.0 ? q / qa : -1.0;
    double t2 = q != 0.0 ? qc / q : -1.0;
    double t = -1.0;
    for (double cand : {t1, t2})
      if (cand > 0.0 && cand < 1.0 && (t < 0.0 || std::abs(cand - 0.5) < std::abs(t - 0.5)))
        t = cand;
    if (t < 0.0) t = 0.5;
    double px = c.cx + ax + t * dx, py = c.cy + ay + t * dy;
    // Project exactly onto the circle.
    double nr = std::hypot(px - c.cx, py - c.cy);
    px = c.cx + c.r * (px - c.cx) / nr;
    py = c.cy + c.r * (py - c.cy) / nr;
    mesh->coords.push_back(px);
    mesh->coords.push_back(py);
    int vid = mesh->num_vertices() - 1;
    edge_split.emplace(key, vid);
    return vid;
  }

  void record_iface(int a, int b, int marker) {
    auto key = std::minmax(a, b);
    if (iface_edges_seen.insert(key).second) iface.push_back({a, b, marker});
  }
};

}  // namespace

void cut_by_circles(SimplicialMesh& mesh, const std::vector<CutCircle>& circles,
                    const std::function<void(double, double, std::vector<int>&)>& locator,
                    double snap_fraction) {
  // Snap pass: move grid vertices lying very close to a circle exactly onto
  // it, which avoids sliver triangles from near-vertex crossings.
  {
    std::vector<double> min_edge(mesh.num_vertices(), std::numeric_limits<double>::max());
    for (int e = 0; e < mesh.num_elements(); ++e) {
      auto [a, b, c] = mesh.element(e);
      for (auto [u, v] : {std::pair{a, b}, {b, c}, {c, a}}) {
        double len = std::hypot(mesh.x(u) - mesh.x(v), mesh.y(u) - mesh.y(v));
        min_edge[u] = std::min(min_edge[u], len);
        min_edge[v] = std::min(min_edge[v], len);
      }
    }
    std::vector<int> cand;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      cand.clear();
      locator(mesh.x(v), mesh.y(v), cand);
      int best = -1;
      double best_phi = std::numeric_limits<double>::max();
      for (int ci : cand) {
        double p = std::abs(std::hypot(mesh.x(v) - circles[ci].cx, mesh.y(v) - circles[ci].cy) -
                            circles[ci].r);
        if (p < best_phi) {
          best_phi = p;
          best = ci;
        }
      }
      if (best >= 0 && best_phi < snap_fraction * min_edge[v]) {
        const CutCircle& c = circles[best];
        double nx = mesh.x(v) - c.cx, ny = mesh.y(v) - c.cy;
        double nr = std::hypot(nx, ny);
        mesh.coords[2 * v] = c.cx + c.r * nx / nr;
        mesh.coords[2 * v + 1] = c.cy + c.r * ny / nr;
      }
    }
  }

  CutState st{&mesh, &circles, {}, {}, {}};

  for (int pass = 0; pass < 12; ++pass) {
    std::vector<int> new_elems, new_tags;
    new_elems.reserve(mesh.elems.size() + mesh.elems.size() / 4);
    std::vector<int> cand;
    bool any_cut = false;

    for (int e = 0; e < mesh.num_elements(); ++e) {
      auto [a, b, c] = mesh.element(e);
      int tag = mesh.elem_tag[e];
      auto bc = mesh.barycenter(e);
      cand.clear();
      locator(bc[0], bc[1], cand);

      bool cut = false;
      for (int ci : cand) {
        const CutCircle& circ = circles[ci];
        double weld = 1e-7 * circ.r;
        std::array<int, 3> vid{a, b, c};
        std::array<double, 3> phi;
        int npos = 0, nneg = 0;
        for (int i = 0; i < 3; ++i) {
          phi[i] = st.phi(vid[i], circ);
          if (std::abs(phi[i]) <= weld) phi[i] = 0.0;
          npos += phi[i] > 0.0;
          nneg += phi[i] < 0.0;
        }
        if (npos == 0 || nneg == 0) {
          // Not crossed; still record an edge lying on the circle.
          for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3;
            if (phi[i] == 0.0 && phi[j] == 0.0 && (npos + nneg) > 0)
              st.record_iface(vid[i], vid[j], circ.marker);
          }
          continue;
        }
        // Crossed. Either two crossed edges (lone vertex) or one crossed
        // edge plus a vertex already on the circle.
        if (npos + nneg == 3) {
          int lone = phi[0] * phi[1] > 0.0 ? 2 : (phi[0] * phi[2] > 0.0 ? 1 : 0);
          int va = vid[lone], vb = vid[(lone + 1) % 3], vc = vid[(lone + 2) % 3];
          int qab = st.crossing_vertex(va, vb, circ);
          int qac = st.crossing_vertex(va, vc, circ);
          new_elems.insert(new_elems.end(), {va, qab, qac});
          new_tags.push_back(tag);
          double d1 = std::hypot(mesh.x(qab) - mesh.x(vc), mesh.y(qab) - mesh.y(vc));
          double d2 = std::hypot(mesh.x(vb) - mesh.x(qac), mesh.y(vb) - mesh.y(qac));
          if (d1 <= d2) {
            new_elems.insert(new_elems.end(), {qab, vb, vc});
            new_elems.insert(new_elems.end(), {qab, vc, qac});
          } else {
            new_elems.insert(new_elems.end(), {qab, vb, qac});
            new_elems.insert(new_elems.end(), {vb, vc, qac});
          }
          new_tags.push_back(tag);
          new_tags.push_back(tag);
          st.record_iface(qab, qac, circ.marker);
        } else {
          int zi = phi[0] == 0.0 ? 0 : (phi[1] == 0.0 ? 1 : 2);
          int vz = vid[zi], vb = vid[(zi + 1) % 3], vc = vid[(zi + 2) % 3];
          int q = st.crossing_vertex(vb, vc, circ);
          new_elems.insert(new_elems.end(), {vz, vb, q});
          new_elems.insert(new_elems.end(), {vz, q, vc});
          new_tags.push_back(tag);
          new_tags.push_back(tag);
          st.record_iface(vz, q, circ.marker);
        }
        cut = true;
        any_cut = true;
        break;
      }
      if (!cut) {
        new_elems.insert(new_elems.end(), {a, b, c});
        new_tags.push_back(tag);
      }
    }
    mesh.elems = std::move(new_elems);
    mesh.elem_tag = std::move(new_tags);
    if (!any_cut) break;
  }

  // Propagate splits into previously marked edges, then append the
  // interface edges recorded while cutting.
  {
    std::vector<int> nb;
    std::vector<int> nm;
    for (int f = 0; f < mesh.num_bfaces(); ++f) {
      std::vector<std::pair<int, int>> stack{{mesh.bfaces[2 * f], mesh.bfaces[2 * f + 1]}};
      while (!stack.empty()) {
        auto [u, v] = stack.back();
        stack.pop_back();
        auto it = st.edge_split.find(edge_key(u, v));
        if (it == st.edge_split.end()) {
          nb.insert(nb.end(), {u, v});
          nm.push_back(mesh.bface_marker[f]);
        } else {
          stack.push_back({u, it->second});
          stack.push_back({it->second, v});
        }
      }
    }
    mesh.bfaces = std::move(nb);
    mesh.bface_marker = std::move(nm);
    for (auto& e : st.iface) {
      mesh.bfaces.insert(mesh.bfaces.end(), {e[0], e[1]});
      mesh.bface_marker.push_back(e[2]);
    }
  }
  mesh.fix_orientation();
}

void filter_elements(SimplicialMesh& mesh, const std::function<bool(double, double)>& keep) {
  std::vector<int> new_elems, new_tags;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto bc = mesh.barycenter(e);
    if (!keep(bc[0], bc[1])) continue;
    auto [a, b, c] = mesh.element(e);
    new_elems.insert(new_elems.end(), {a, b, c});
    new_tags.push_back(mesh.elem_tag[e]);
  }
  std::vector<int> remap(mesh.num_vertices(), -1);
  std::vector<double> new_coords;
  for (int& v : new_elems) {
    if (remap[v] < 0) {
      remap[v] = static_cast<int>(new_coords.size() / 2);
      new_coords.push_back(mesh.x(v));
      new_coords.push_back(mesh.y(v));
    }
    v = remap[v];
  }
  std::vector<int> nb, nm;
  for (int f = 0; f < mesh.num_bfaces(); ++f) {
    int u = mesh.bfaces[2 * f], v = mesh.bfaces[2 * f + 1];
    if (remap[u] >= 0 && remap[v] >= 0) {
      nb.insert(nb.end(), {remap[u], remap[v]});
      nm.push_back(mesh.bface_marker[f]);
    }
  }
  mesh.coords = std::move(new_coords);
  mesh.elems = std::move(new_elems);
  mesh.elem_tag = std::move(new_tags);
  mesh.bfaces = std::move(nb);
  mesh.bface_marker = std::move(nm);
}

// ---- ASCII I/O ------------------------------------------------------------

void write_mesh(std::ostream& os, const SimplicialMesh& mesh) {
  os << "hcdmesh 1\n";
  os << "dim " << mesh.dim << "\n";
  os << std::setprecision(17);
  os << "vertices " << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) os << mesh.x(v) << " " << mesh.y(v) << "\n";
  os << "elements " << mesh.num_elements() << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto [a, b, c] = mesh.element(e);
    os << a << " " << b << " " << c << " " << mesh.elem_tag[e] << "\n";
  }
  os << "bfaces " << mesh.num_bfaces() << "\n";
  for (int f = 0; f < mesh.num_bfaces(); ++f)
    os << mesh.bfaces[2 * f] << " " << mesh.bfaces[2 * f + 1] << " " << mesh.bface_marker[f]
       << "\n";
}

SimplicialMesh read_mesh(std::istream& is) {
  SimplicialMesh m;
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "hcdmesh" || version != 1) throw ConfigError("mesh file: bad header");
  std::string kw;
  int n = 0;
  is >> kw >> m.dim;
  if (kw != "dim" || m.dim != 2) throw ConfigError("mesh file: expected 'dim 2'");
  is >> kw >> n;
  if (kw != "vertices") throw ConfigError("mesh file: expected vertex block");
  m.coords.resize(2 * n);
  for (int i = 0; i < 2 * n; ++i) is >> m.coords[i];
  is >> kw >> n;
  if (kw != "elements") throw ConfigError("mesh file: expected element block");
  m.elems.resize(3 * n);
  m.elem_tag.resize(n);
  for (int e = 0; e < n; ++e)
    is >> m.elems[3 * e] >> m.elems[3 * e + 1] >> m.elems[3 * e + 2] >> m.elem_tag[e];
  is >> kw >> n;
  if (kw != "bfaces") throw ConfigError("mesh file: expected bface block");
  m.bfaces.resize(2 * n);
  m.bface_marker.resize(n);
  for (int f = 0; f < n; ++f) is >> m.bfaces[2 * f] >> m.bfaces[2 * f + 1] >> m.bface_marker[f];
  if (!is) throw ConfigError("mesh file: truncated");
  return m;
}

void save_mesh(const std::string& path, const SimplicialMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open mesh file for writing: " + path);
  write_mesh(os, mesh);
}

SimplicialMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open mesh file: " + path);
  return read_mesh(is);
}

}  // namespace hcd
