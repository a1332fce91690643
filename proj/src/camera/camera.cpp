#include "cluttergrasp/camera/camera.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <thread>

#include <json.hpp>

#include "cluttergrasp/random.hpp"

namespace cluttergrasp {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ValidationError("intrinsics: fx and fy must be positive");
  if (width <= 0 || height <= 0) throw ValidationError("intrinsics: width and height must be positive");
  if (cx < 0.0 || cx > width || cy < 0.0 || cy > height) {
    throw ValidationError("intrinsics: principal point outside the image");
  }
}

void ViewpointConfig::validate() const {
  if (!(rho_min > 0.0) || rho_max < rho_min) throw ValidationError("viewpoint: invalid rho range");
  if (phi_max < phi_min) throw ValidationError("viewpoint: invalid phi range");
  if (theta_max < theta_min) throw ValidationError("viewpoint: invalid theta range");
}

Pose look_at_pose(const Vec3& position, const Vec3& target) {
  const Vec3 z = unit(target - position);
  Vec3 up = Vec3::UnitZ();
  if (z.cross(up).norm() < 1e-9) up = Vec3::UnitX();
  // Image y points down, so x = z cross up keeps the frame right-handed with y = z cross x.
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose::from_matrix(r, position);
}

Vec3 spherical_position(const ViewpointConfig& cfg, double rho, double phi, double theta) {
  return cfg.look_at + rho * Vec3(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi));
}

Pose sample_viewpoint(const ViewpointConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const double rho = rng.uniform(cfg.rho_min, cfg.rho_max);
  const double phi = rng.uniform(cfg.phi_min, cfg.phi_max);
  const double theta = rng.uniform(cfg.theta_min, cfg.theta_max);
  return look_at_pose(spherical_position(cfg, rho, phi, theta), cfg.look_at);
}

Vec3 pixel_direction(const CameraIntrinsics& k, double u, double v) {
  return Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0).normalized();
}

DepthFrame render_depth(const SceneGeometry& scene, const Pose& camera_pose, const CameraIntrinsics& intrinsics,
                        const RenderOptions& options) {
  intrinsics.validate();
  DepthFrame frame;
  frame.intrinsics = intrinsics;
  frame.camera_pose = camera_pose;
  const std::size_t n = static_cast<std::size_t>(intrinsics.width) * intrinsics.height;
  frame.depth.assign(n, 0.0);
  frame.instance_ids.assign(n, -1);
  frame.normals.assign(n, Vec3::Zero());
  const SceneAccel* accel = scene.accel();
  if (!accel) return frame;

  const Mat3 r = camera_pose.matrix();
  auto render_row = [&](int v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      const Vec3 d_cam = pixel_direction(intrinsics, u, v);
      Ray ray{camera_pose.translation, r * d_cam, options.max_range};
      const auto hit = accel->raycast(ray);
      if (!hit) continue;
      const std::size_t i = frame.index(u, v);
      frame.depth[i] = hit->distance * d_cam.z();
      frame.instance_ids[i] = hit->instance_id;
      frame.normals[i] = hit->face_normal;
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    for (int v = 0; v < intrinsics.height; ++v) render_row(v);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int v = w; v < intrinsics.height; v += workers) render_row(v);
      });
    }
    for (auto& t : pool) t.join();
  }

  if (options.depth_noise_mm > 0.0) {
    Rng rng(options.noise_seed);
    for (std::size_t i = 0; i < n; ++i) {
      if (frame.instance_ids[i] < 0) continue;
      frame.depth[i] = std::max(1e-6, frame.depth[i] + 1e-3 * options.depth_noise_mm * rng.normal());
    }
  }
  return frame;
}

std::map<int, std::vector<PointNormal>> depth_to_pointcloud(const DepthFrame& frame) {
  std::map<int, std::vector<PointNormal>> out;
  const auto& k = frame.intrinsics;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const std::size_t i = frame.index(u, v);
      const int id = frame.instance_ids[i];
      if (id < 0) continue;
      const double z = frame.depth[i];
      const Vec3 p_cam((u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z);
      PointNormal pn;
      pn.point = frame.camera_pose.apply(p_cam);
      pn.normal = frame.normals[i];
      pn.instance_id = id;
      out[id].push_back(pn);
    }
  }
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

void write_png16(const std::filesystem::path& path, int width, int height, const std::vector<std::uint16_t>& data) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw ValidationError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng error writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 2);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const std::uint16_t x = data[static_cast<std::size_t>(v) * width + u];
      row[2 * u] = static_cast<png_byte>(x >> 8);  // PNG stores big-endian samples
      row[2 * u + 1] = static_cast<png_byte>(x & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_depth_png(const DepthFrame& frame, const std::filesystem::path& path) {
  std::vector<std::uint16_t> data(frame.depth.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double units = std::round(frame.depth[i] * 1e4);
    data[i] = static_cast<std::uint16_t>(std::clamp(units, 0.0, 65535.0));
  }
  write_png16(path, frame.intrinsics.width, frame.intrinsics.height, data);
}

void write_instance_png(const DepthFrame& frame, const std::filesystem::path& path) {
  std::vector<std::uint16_t> data(frame.instance_ids.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int id = frame.instance_ids[i];
    if (id + 1 > 65535) throw ValidationError("instance id " + std::to_string(id) + " does not fit a 16-bit map");
    data[i] = static_cast<std::uint16_t>(std::max(0, id + 1));
  }
  write_png16(path, frame.intrinsics.width, frame.intrinsics.height, data);
}

std::vector<std::uint16_t> read_png16(const std::filesystem::path& path, int& width, int& height) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw ValidationError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("malformed PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError(path.string() + ": expected a 16-bit grayscale PNG");
  }
  std::vector<std::uint16_t> out(static_cast<std::size_t>(width) * height);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 2);
  for (int v = 0; v < height; ++v) {
    png_read_row(png, row.data(), nullptr);
    for (int u = 0; u < width; ++u) {
      out[static_cast<std::size_t>(v) * width + u] = static_cast<std::uint16_t>((row[2 * u] << 8) | row[2 * u + 1]);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::string frame_metadata_json(const DepthFrame& frame) {
  const auto& q = frame.camera_pose.rotation;
  const auto& t = frame.camera_pose.translation;
  const auto& k = frame.intrinsics;
  nlohmann::ordered_json j;
  j["camera_pose"] = {{"q", {q.w(), q.x(), q.y(), q.z()}}, {"t", {t.x(), t.y(), t.z()}}};
  j["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
  j["depth_units_m"] = 1e-4;
  j["instance_id_offset"] = 1;
  return j.dump(2);
}

}  // namespace cluttergrasp
