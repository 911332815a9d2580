#include "sfg/synth.hpp"

#include "sfg/fusion.hpp"
#include "sfg/geometry.hpp"
#include "sfg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace sfg::synth {

namespace {

constexpr double kMinHitParam = 1e-9;
constexpr double kMotionEpsilon = 1e-12;

/// Hit parameter of a ray against a shape in the shape's local frame, or
/// nullopt. The parameter is preserved by rigid transforms of the ray, so it
/// equals the camera-frame z-depth when the direction has unit z there.
std::optional<double> intersect_local(const Shape& shape, const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& dir) {
    if (shape.type == ShapeType::Plane) {
        if (std::abs(dir.z()) < 1e-15) return std::nullopt;
        const double s = -origin.z() / dir.z();
        if (s <= kMinHitParam) return std::nullopt;
        const double px = origin.x() + s * dir.x();
        const double py = origin.y() + s * dir.y();
        if (std::abs(px) > 0.5 * shape.extent.x() || std::abs(py) > 0.5 * shape.extent.y())
            return std::nullopt;
        return s;
    }

    // Slab test against the centered axis-aligned box.
    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        const double half = 0.5 * shape.extent[axis];
        const double o = origin[axis];
        const double d = dir[axis];
        if (std::abs(d) < 1e-15) {
            if (o < -half || o > half) return std::nullopt;
            continue;
        }
        double ta = (-half - o) / d;
        double tb = (half - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t_enter = std::max(t_enter, ta);
        t_exit = std::min(t_exit, tb);
        if (t_enter > t_exit) return std::nullopt;
    }
    if (t_enter > kMinHitParam) return t_enter;
    if (t_exit > kMinHitParam) return t_exit;  // origin inside the box
    return std::nullopt;
}

struct Hit {
    double param = std::numeric_limits<double>::infinity();
    int object_index = -1;  ///< -1 = scenery
    std::uint32_t class_id = 0;
};

std::uint64_t frame_seed(std::uint64_t seed, int frame, std::uint64_t stream) {
    // splitmix64 over (seed, frame, stream)
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(frame) + 1)) ^
                      (0xbf58476d1ce4e5b9ULL * (stream + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace

std::optional<std::string> validate(const SceneSpec& spec) {
    if (auto err = sfg::validate(spec.intrinsics)) return err;
    if (spec.frame_count < 2) return "frame count must be at least 2";
    if (static_cast<int>(spec.camera.size()) != spec.frame_count)
        return "camera trajectory length differs from frame count";
    for (const PoseSE3& pose : spec.camera) {
        if (auto err = sfg::validate(pose)) return err;
    }
    for (const SceneObject& object : spec.objects) {
        if (static_cast<int>(object.poses.size()) != spec.frame_count)
            return "object '" + object.name + "' lacks per-frame poses for all frames";
        if (fusion::class_id_of(object.class_name) == 0)
            return "object '" + object.name + "' has unknown class '" + object.class_name + "'";
    }
    for (const StaticSurface& surface : spec.statics) {
        if (fusion::class_id_of(surface.class_name) == 0)
            return "static surface has unknown class '" + surface.class_name + "'";
    }
    if (spec.depth_noise_sigma < 0.0 || spec.flow_noise_sigma < 0.0)
        return "negative noise sigma";
    return std::nullopt;
}

PoseSE3 relative_camera_motion(const SceneSpec& spec, int t) {
    return compose(invert(spec.camera[t + 1]), spec.camera[t]);
}

Trajectory camera_trajectory(const SceneSpec& spec) {
    Trajectory trajectory;
    trajectory.reserve(spec.camera.size());
    for (int t = 0; t < spec.frame_count; ++t)
        trajectory.push_back({static_cast<double>(t), spec.camera[t]});
    return trajectory;
}

FramePackage render_frame(const SceneSpec& spec, int t) {
    if (auto err = validate(spec)) throw Error("scene spec invalid: " + *err);
    if (t < 0 || t >= spec.frame_count - 1)
        throw Error("frame index " + std::to_string(t) + " out of range (flow needs frame t+1)");

    const CameraIntrinsics& k = spec.intrinsics;
    const PoseSE3& cam = spec.camera[t];
    const PoseSE3 world_from_next = spec.camera[t + 1];
    const PoseSE3 next_from_world = invert(world_from_next);

    // Per-surface data in the frame-t world.
    struct Surface {
        const Shape* shape;
        PoseSE3 local_from_world;
        int object_index;
        std::uint32_t class_id;
        bool moving;
        PoseSE3 world_motion;  ///< world-space motion t -> t+1 (identity for static)
    };
    std::vector<Surface> surfaces;
    surfaces.reserve(spec.statics.size() + spec.objects.size());
    for (const StaticSurface& s : spec.statics) {
        surfaces.push_back({&s.shape, invert(s.pose), -1,
                            fusion::class_id_of(s.class_name), false, PoseSE3::identity()});
    }
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const SceneObject& object = spec.objects[i];
        const PoseSE3 motion = compose(object.poses[t + 1], invert(object.poses[t]));
        const bool moving = identity_deviation(motion) > kMotionEpsilon;
        surfaces.push_back({&object.shape, invert(object.poses[t]), static_cast<int>(i),
                            fusion::class_id_of(object.class_name), moving, motion});
    }

    FramePackage package;
    package.frame = t;
    package.camera = cam;
    package.depth = DepthMap::constant(k.width, k.height, 0.0);
    package.class_mask = LabelMask::zeros(k.width, k.height, MaskKind::Class);
    package.instance_mask = LabelMask::zeros(k.width, k.height, MaskKind::Instance);
    package.gt_motion = LabelMask::zeros(k.width, k.height, MaskKind::BinaryMotion);
    package.full_flow = FlowField::zeros(k.width, k.height);

    for (int y = 0; y < k.height; ++y) {
        for (int x = 0; x < k.width; ++x) {
            // Unit-z camera ray; the hit parameter is the stored z-depth and
            // reproduces backproject() exactly.
            const Eigen::Vector3d dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
            const Eigen::Vector3d origin_w = cam.translation;
            const Eigen::Vector3d dir_w = cam.rotation * dir_cam;

            Hit best;
            const Surface* best_surface = nullptr;
            for (const Surface& surface : surfaces) {
                const Eigen::Vector3d o_l = surface.local_from_world.apply(origin_w);
                const Eigen::Vector3d d_l = surface.local_from_world.rotation * dir_w;
                const auto s = intersect_local(*surface.shape, o_l, d_l);
                if (s && *s < best.param) {
                    best.param = *s;
                    best.object_index = surface.object_index;
                    best.class_id = surface.class_id;
                    best_surface = &surface;
                }
            }

            if (!best_surface) {
                package.full_flow.set_valid(x, y, false);
                continue;  // sky: depth stays 0 (invalid)
            }

            package.depth.at(x, y) = best.param;
            package.class_mask.at(x, y) = best.class_id;
            if (best.object_index >= 0) {
                package.instance_mask.at(x, y) = static_cast<std::uint32_t>(best.object_index + 1);
                if (best_surface->moving) package.gt_motion.at(x, y) = 1;
            }

            const Eigen::Vector3d point_cam = best.param * dir_cam;
            Eigen::Vector3d point_world = cam.apply(point_cam);
            if (best_surface->moving) point_world = best_surface->world_motion.apply(point_world);
            const Eigen::Vector3d point_next = next_from_world.apply(point_world);
            if (!(point_next.z() > 0.0)) {
                package.full_flow.set_valid(x, y, false);
                continue;
            }
            const Eigen::Vector2d pixel(static_cast<double>(x), static_cast<double>(y));
            package.full_flow.at(x, y) = geometry::project(point_next, k) - pixel;
        }
    }

    if (spec.depth_noise_sigma > 0.0) {
        std::mt19937_64 rng(frame_seed(spec.seed, t, 1));
        std::normal_distribution<double> noise(0.0, spec.depth_noise_sigma);
        for (int y = 0; y < k.height; ++y)
            for (int x = 0; x < k.width; ++x)
                if (package.depth.valid_at(x, y)) package.depth.at(x, y) += noise(rng);
    }
    if (spec.flow_noise_sigma > 0.0) {
        std::mt19937_64 rng(frame_seed(spec.seed, t, 2));
        std::normal_distribution<double> noise(0.0, spec.flow_noise_sigma);
        for (int y = 0; y < k.height; ++y) {
            for (int x = 0; x < k.width; ++x) {
                if (!package.full_flow.valid_at(x, y)) continue;
                package.full_flow.at(x, y).x() += noise(rng);
                package.full_flow.at(x, y).y() += noise(rng);
            }
        }
    }

    return package;
}

ExportResult export_sequence(const SceneSpec& spec, const std::filesystem::path& out_dir) {
    if (auto err = validate(spec)) throw Error("scene spec invalid: " + *err);

    namespace fs = std::filesystem;
    std::error_code ec;
    for (const char* sub : {"depth", "flow", "class", "instance", "gtmask"}) {
        fs::create_directories(out_dir / sub, ec);
        if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
    }

    std::string manifest;
    char name[64];
    for (int t = 0; t < spec.frame_count - 1; ++t) {
        const FramePackage package = render_frame(spec, t);
        std::snprintf(name, sizeof(name), "%06d", t);
        const std::string depth_rel = std::string("depth/") + name + ".pfm";
        const std::string flow_rel = std::string("flow/") + name + ".flo";
        const std::string class_rel = std::string("class/") + name + ".pgm";
        const std::string instance_rel = std::string("instance/") + name + ".pgm";
        const std::string gtmask_rel = std::string("gtmask/") + name + ".pgm";

        io::write_pfm(package.depth, out_dir / depth_rel);
        io::write_flo(package.full_flow, out_dir / flow_rel);
        io::write_pgm(package.class_mask, out_dir / class_rel);
        io::write_pgm(package.instance_mask, out_dir / instance_rel);
        io::write_pgm(package.gt_motion, out_dir / gtmask_rel);

        manifest += std::to_string(t) + "," + depth_rel + "," + flow_rel + "," + class_rel +
                    "," + instance_rel + "," + gtmask_rel + "\n";
    }

    io::write_intrinsics(spec.intrinsics, out_dir / "intrinsics.txt");
    const Trajectory trajectory = camera_trajectory(spec);
    io::write_trajectory_tum(trajectory, out_dir / "poses_tum.txt");
    io::write_trajectory_kitti(trajectory, out_dir / "poses_kitti.txt");

    std::vector<std::uint32_t> class_ids;
    for (const StaticSurface& s : spec.statics) class_ids.push_back(fusion::class_id_of(s.class_name));
    for (const SceneObject& o : spec.objects) class_ids.push_back(fusion::class_id_of(o.class_name));
    std::sort(class_ids.begin(), class_ids.end());
    class_ids.erase(std::unique(class_ids.begin(), class_ids.end()), class_ids.end());
    std::string legend;
    for (const std::uint32_t id : class_ids)
        legend += std::to_string(id) + " " + fusion::class_name_of(id) + "\n";
    io::write_file_atomic(out_dir / "classes.txt", legend);

    const fs::path manifest_path = out_dir / "manifest.txt";
    io::write_file_atomic(manifest_path, manifest);
    return {manifest_path, spec.frame_count - 1};
}

}  // namespace sfg::synth
