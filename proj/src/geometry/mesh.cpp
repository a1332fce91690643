#include "cluttergrasp/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace cluttergrasp {

Vec3 TriangleMesh::cross(std::size_t tri) const {
  const Vec3& a = corner(tri, 0);
  return (corner(tri, 1) - a).cross(corner(tri, 2) - a);
}

Vec3 TriangleMesh::face_normal(std::size_t tri) const { return cross(tri).normalized(); }

double TriangleMesh::area(std::size_t tri) const { return 0.5 * cross(tri).norm(); }

double TriangleMesh::surface_area() const {
  double total = 0.0;
  for (std::size_t i = 0; i < triangles.size(); ++i) total += area(i);
  return total;
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& t : triangles) {
    for (int k : t) box.extend(vertices[k]);
  }
  return box;
}

namespace {

// Resolves an OBJ vertex reference ("7", "7/2", "7//3", "-1") to a zero-based index.
int parse_face_index(const std::string& token, int vertex_count, const std::string& where) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw ValidationError(where + ": bad face index '" + token + "'");
  }
  if (idx < 0) idx = vertex_count + idx + 1;
  if (idx < 1 || idx > vertex_count) {
    throw ValidationError(where + ": face index " + head + " out of range");
  }
  return idx - 1;
}

}  // namespace

MeshLoadResult parse_obj(std::istream& in, const std::string& source_name) {
  MeshLoadResult out;
  TriangleMesh& mesh = out.mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source_name + ":" + std::to_string(line_no);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z()) || !p.allFinite()) {
        throw ValidationError(where + ": malformed vertex record");
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> corners;
      std::string tok;
      while (ss >> tok) {
        corners.push_back(parse_face_index(tok, static_cast<int>(mesh.vertices.size()), where));
      }
      if (corners.size() < 3) throw ValidationError(where + ": face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < corners.size(); ++k) {
        mesh.triangles.push_back({corners[0], corners[k], corners[k + 1]});
      }
    }
    // vn, vt, o, g, s, usemtl, mtllib: not needed for collision geometry.
  }
  out.dropped_degenerate = drop_degenerate(mesh);
  if (mesh.triangles.empty()) throw ValidationError(source_name + ": mesh has no valid triangles");
  return out;
}

MeshLoadResult load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mesh file " + path.string());
  return parse_obj(in, path.string());
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write mesh file " + path.string());
  write_obj(mesh, out);
}

int drop_degenerate(TriangleMesh& mesh) {
  const bool has_density = mesh.densities.size() == mesh.triangles.size();
  std::vector<Triangle> kept;
  std::vector<double> kept_density;
  kept.reserve(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || mesh.area(i) <= kDegenerateArea) continue;
    kept.push_back(t);
    if (has_density) kept_density.push_back(mesh.densities[i]);
  }
  const int dropped = static_cast<int>(mesh.triangles.size() - kept.size());
  mesh.triangles = std::move(kept);
  if (has_density) mesh.densities = std::move(kept_density);
  return dropped;
}

namespace {

// Maps every vertex to the lowest index sharing its exact position.
std::vector<int> weld_map(const TriangleMesh& mesh) {
  std::map<std::array<double, 3>, int> first;
  std::vector<int> remap(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    auto [it, inserted] = first.emplace(std::array<double, 3>{v.x(), v.y(), v.z()}, static_cast<int>(i));
    remap[i] = it->second;
  }
  return remap;
}

}  // namespace

bool is_watertight(const TriangleMesh& mesh) {
  const auto remap = weld_map(mesh);
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = remap[t[k]];
      int b = remap[t[(k + 1) % 3]];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  return !uses.empty() &&
         std::all_of(uses.begin(), uses.end(), [](const auto& kv) { return kv.second == 2; });
}

VolumeResult mesh_volume(const TriangleMesh& mesh) {
  // Signed tetrahedra against the bounding-box centre keeps the sum well conditioned.
  const Vec3 ref = mesh.bounds().center();
  double six_v = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - ref;
    const Vec3 b = mesh.vertices[t[1]] - ref;
    const Vec3 c = mesh.vertices[t[2]] - ref;
    six_v += a.dot(b.cross(c));
  }
  VolumeResult r;
  r.volume = std::abs(six_v) / 6.0;
  r.inverted = six_v < 0.0;
  r.watertight = is_watertight(mesh);
  return r;
}

Vec3 mesh_centroid(const TriangleMesh& mesh) {
  const Vec3 ref = mesh.bounds().center();
  double six_v = 0.0;
  Vec3 moment = Vec3::Zero();
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - ref;
    const Vec3 b = mesh.vertices[t[1]] - ref;
    const Vec3 c = mesh.vertices[t[2]] - ref;
    const double det = a.dot(b.cross(c));
    six_v += det;
    moment += det * (a + b + c) / 4.0;
  }
  if (std::abs(six_v) > 1e-18) return ref + moment / six_v;
  Vec3 acc = Vec3::Zero();
  double area_sum = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const double a = mesh.area(i);
    acc += a * (mesh.corner(i, 0) + mesh.corner(i, 1) + mesh.corner(i, 2)) / 3.0;
    area_sum += a;
  }
  return area_sum > 0.0 ? Vec3(acc / area_sum) : ref;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Pose& pose, double scale) {
  TriangleMesh out = mesh;
  const Mat3 r = pose.matrix();
  for (auto& v : out.vertices) v = r * (scale * v) + pose.translation;
  return out;
}

void append(TriangleMesh& mesh, const TriangleMesh& other) {
  const int offset = static_cast<int>(mesh.vertices.size());
  const bool keep_density = mesh.densities.size() == mesh.triangles.size() &&
                            other.densities.size() == other.triangles.size() &&
                            (!mesh.triangles.empty() || !other.densities.empty());
  mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& t : other.triangles) mesh.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  if (keep_density) {
    mesh.densities.insert(mesh.densities.end(), other.densities.begin(), other.densities.end());
  } else {
    mesh.densities.clear();
  }
}

void flip_winding(TriangleMesh& mesh) {
  for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
}

int connected_components(const TriangleMesh& mesh) {
  const auto remap = weld_map(mesh);
  std::vector<int> parent(mesh.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const auto& t : mesh.triangles) {
    unite(remap[t[0]], remap[t[1]]);
    unite(remap[t[1]], remap[t[2]]);
  }
  std::vector<char> seen(mesh.vertices.size(), 0);
  int count = 0;
  for (const auto& t : mesh.triangles) {
    const int root = find(remap[t[0]]);
    if (!seen[root]) {
      seen[root] = 1;
      ++count;
    }
  }
  return count;
}

double convex_hull_volume(const TriangleMesh& mesh) {
  // Deduplicated point set.
  std::vector<Vec3> pts;
  {
    std::map<std::array<double, 3>, int> seen;
    for (const auto& v : mesh.vertices) {
      if (seen.emplace(std::array<double, 3>{v.x(), v.y(), v.z()}, 0).second) pts.push_back(v);
    }
  }
  if (pts.size() < 4) return 0.0;
  const double scale = std::max(1e-12, mesh.bounds().extent().maxCoeff());
  const double eps = 1e-10 * scale;

  // Initial tetrahedron from extreme points.
  int i0 = 0, i1 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].x() < pts[i0].x()) i0 = static_cast<int>(i);
    if (pts[i].x() > pts[i1].x()) i1 = static_cast<int>(i);
  }
  if (i0 == i1) i1 = i0 == 0 ? 1 : 0;
  int i2 = -1;
  double best = eps;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - pts[i0]).cross(pts[i1] - pts[i0]).norm();
    if (d > best) {
      best = d;
      i2 = static_cast<int>(i);
    }
  }
  if (i2 < 0) return 0.0;
  int i3 = -1;
  best = eps * scale;
  const Vec3 base_n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(base_n.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = static_cast<int>(i);
    }
  }
  if (i3 < 0) return 0.0;

  struct Face {
    std::array<int, 3> v;
    Vec3 n;
    double off;
    bool alive = true;
  };
  std::vector<Face> faces;
  const Vec3 inner = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  auto make_face = [&](int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.n = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
    f.off = f.n.dot(pts[a]);
    if (f.n.dot(inner) - f.off > 0.0) {
      std::swap(f.v[1], f.v[2]);
      f.n = -f.n;
      f.off = -f.off;
    }
    faces.push_back(f);
  };
  make_face(i0, i1, i2);
  make_face(i0, i1, i3);
  make_face(i0, i2, i3);
  make_face(i1, i2, i3);

  // Far points first: they are likely hull vertices, so later interior points are rejected
  // against a small, nearly final hull.
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) dist[i] = (pts[i] - inner).squaredNorm();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });

  for (const int pi : order) {
    const std::size_t p = static_cast<std::size_t>(pi);
    if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].alive && faces[f].n.dot(pts[p]) - faces[f].off > eps) visible.push_back(f);
    }
    if (visible.empty()) continue;
    // Horizon: directed edges of visible faces whose reverse is not also on a visible face.
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t f : visible) {
      for (int k = 0; k < 3; ++k) edge_count[{faces[f].v[k], faces[f].v[(k + 1) % 3]}]++;
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [e, c] : edge_count) {
      if (!edge_count.count({e.second, e.first})) horizon.push_back(e);
    }
    for (std::size_t f : visible) faces[f].alive = false;
    std::erase_if(faces, [](const Face& f) { return !f.alive; });
    for (const auto& [a, b] : horizon) make_face(a, b, pi);
  }

  double six_v = 0.0;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    const Vec3 a = pts[f.v[0]] - inner;
    const Vec3 b = pts[f.v[1]] - inner;
    const Vec3 c = pts[f.v[2]] - inner;
    six_v += a.dot(b.cross(c));
  }
  return std::abs(six_v) / 6.0;
}

}  // namespace cluttergrasp
