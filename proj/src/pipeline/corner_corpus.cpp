#include "cluttergrasp/pipeline/corner_corpus.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "cluttergrasp/geometry/shapes.hpp"
#include "cluttergrasp/pipeline/pipeline.hpp"

namespace cluttergrasp {

namespace {

constexpr double kMm = 1e-3;
constexpr double kCell = 0.5 * kMm;

struct Part {
  std::string asset_id;
  TriangleMesh mesh;  // world coordinates
};

TriangleMesh slab(double half_x, double half_y, double thickness, std::function<double(double, double)> height,
                  std::function<bool(double, double)> solid = {}) {
  shapes::HeightfieldSpec hf;
  hf.x0 = -half_x;
  hf.x1 = half_x;
  hf.y0 = -half_y;
  hf.y1 = half_y;
  hf.cell = kCell;
  hf.bottom_z = 0.0;
  hf.height = [thickness, height](double x, double y) { return thickness + (height ? height(x, y) : 0.0); };
  hf.solid = std::move(solid);
  return shapes::heightfield_slab(hf);
}

TriangleMesh rotated_box(const Vec3& lo, const Vec3& hi, double yaw) {
  return transformed(shapes::box(lo, hi), Pose(Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())), Vec3::Zero()));
}

// Cup pressing straight down onto (0, 0, z).
SuctionCandidate top_candidate(double z, int target) {
  Mat3 r;
  r.col(0) = -Vec3::UnitZ();
  r.col(1) = Vec3::UnitX();
  r.col(2) = r.col(0).cross(r.col(1));
  SuctionCandidate c;
  c.pose = Pose::from_matrix(r, Vec3(0.0, 0.0, z));
  c.cup = suction_cup_15mm().name;
  c.target_instance = target;
  return c;
}

CornerCase make_case(std::string name, std::string description, std::vector<Part> parts, double top_z,
                     SealFailure expected, bool dexnet) {
  CornerCase c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.expected_failure = expected;
  c.expected_dexnet8 = dexnet;
  int id = 0;
  for (auto& p : parts) {
    SceneObject o;
    o.instance_id = id++;
    o.asset_id = p.asset_id;
    o.friction = 0.5;
    c.assets.add(make_asset(p.asset_id, std::move(p.mesh)));
    c.scene.objects.push_back(o);
  }
  assign_masses(c.scene, c.assets);
  c.candidate = top_candidate(top_z, 0);
  return c;
}

}  // namespace

std::vector<CornerCase> build_corner_cases() {
  const double t = 10 * kMm;
  const double diag = 22.5 * std::numbers::pi / 180.0;
  std::vector<CornerCase> out;

  {
    const Vec3 u(std::cos(diag), std::sin(diag), 0.0);
    auto groove = [u](double x, double y) {
      return std::abs(-u.y() * x + u.x() * y) < 3 * kMm ? -5 * kMm : 0.0;
    };
    auto solid = [](double x, double y) { return std::hypot(x, y) > 3 * kMm; };
    out.push_back(make_case("a_grooves_holes", "groove 6 mm wide, 5 mm deep and a 3 mm radius through-hole",
                            {{"corner/a_plate", slab(20 * kMm, 20 * kMm, t, groove, solid)}}, t, SealFailure::RayMiss,
                            true));
  }
  {
    TriangleMesh m = shapes::box(Vec3(-20, -20, 0) * kMm, Vec3(20, 20, 10) * kMm);
    append(m, shapes::box(Vec3(11, -4, 10) * kMm, Vec3(19, 4, 14) * kMm));
    out.push_back(make_case("b_protrusion", "4 mm protrusion under one perimeter vertex",
                            {{"corner/b_plate", std::move(m)}}, t, SealFailure::DeformationExceeded, false));
  }
  {
    const double lambda = 15 * kMm / std::numbers::sqrt2;
    auto rough = [lambda](double x, double y) {
      const double k = 2.0 * std::numbers::pi / lambda;
      return 3 * kMm * std::sin(k * x) * std::sin(k * y);
    };
    out.push_back(make_case("c_rough", "sinusoidal roughness, 3 mm amplitude",
                            {{"corner/c_plate", slab(20 * kMm, 20 * kMm, t, rough)}}, t,
                            SealFailure::DeformationExceeded, true));
  }
  {
    out.push_back(make_case("d_neighbour", "neighbour 0.5 mm beyond the target edge inside the cup footprint",
                            {{"corner/d_target", rotated_box(Vec3(-30, -25, 0) * kMm, Vec3(14, 25, 10) * kMm, diag)},
                             {"corner/d_neighbour",
                              rotated_box(Vec3(14.5, -25, 0) * kMm, Vec3(44.5, 25, 10) * kMm, diag)}},
                            t, SealFailure::WrongInstance, true));
  }
  {
    const double top = 20 * kMm, depth = 8 * kMm, radius = 20 * kMm;
    const double rim = std::sqrt(radius * radius - (radius - depth) * (radius - depth));
    auto dish = [=](double x, double y) {
      const double r = std::hypot(x, y);
      if (r >= rim) return 0.0;
      return -depth + radius - std::sqrt(radius * radius - r * r);
    };
    out.push_back(make_case("e_concave", "spherical dish, 20 mm radius, 8 mm deep",
                            {{"corner/e_block", slab(25 * kMm, 25 * kMm, top, dish)}}, top - depth,
                            SealFailure::DeformationExceeded, false));
  }
  {
    const double gap = 0.01 * kMm;
    out.push_back(make_case("f_overlap", "3 mm plate resting on the target over half the cup",
                            {{"corner/f_target", shapes::box(Vec3(-20, -20, 0) * kMm, Vec3(20, 20, 10) * kMm)},
                             {"corner/f_cover", shapes::box(Vec3(0.5 * kMm, -20 * kMm, t + gap),
                                                            Vec3(30 * kMm, 20 * kMm, t + gap + 3 * kMm))}},
                            t, SealFailure::WrongInstance, true));
  }
  return out;
}

void gen_corner_corpus(const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out / "assets", ec);
  fs::create_directories(out / "scenes", ec);
  if (ec || !fs::is_directory(out / "scenes")) throw ValidationError("cannot create corpus directory " + out.string());

  nlohmann::ordered_json manifest;
  std::string candidates;
  for (auto& c : build_corner_cases()) {
    for (const auto& id : c.assets.ids()) {
      const std::string file = id.substr(id.find('/') + 1) + ".obj";
      save_obj(*c.assets.get(id).mesh, out / "assets" / file);
      manifest[id] = {{"path", file}, {"density", c.assets.get(id).density}};
    }
    c.scene.asset_manifest = "../assets/manifest.json";
    save_scene(c.scene, out / "scenes" / (c.name + ".json"));
    candidates += suction_candidate_json(c.candidate, "scenes/" + c.name + ".json") + "\n";
  }
  std::ofstream m(out / "assets" / "manifest.json");
  std::ofstream cf(out / "candidates.ndjson", std::ios::binary);
  if (!m || !cf) throw ValidationError("cannot write corpus files under " + out.string());
  m << manifest.dump(2) << '\n';
  cf << candidates;
}

}  // namespace cluttergrasp
