#pragma once

#include "sfg/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sfg::synth {

enum class ShapeType { Plane, Box };

/// Plane: rectangle in the local z = 0 plane, extent.x() by extent.y(),
/// centered at the local origin. Box: axis-aligned in the local frame with
/// full side lengths extent, centered at the local origin.
struct Shape {
    ShapeType type = ShapeType::Box;
    Eigen::Vector3d extent = Eigen::Vector3d::Ones();
};

/// Scenery surface; never instanced, never moving.
struct StaticSurface {
    std::string class_name = "building";
    Shape shape;
    PoseSE3 pose;  ///< world-from-local
};

/// Instanced object with a per-frame rigid pose (constant = parked).
struct SceneObject {
    std::string name;
    std::string class_name = "car";
    Shape shape;
    std::vector<PoseSE3> poses;  ///< world-from-object, one per frame
};

/// Piecewise-rigid scene: camera trajectory plus posed surfaces. The camera
/// looks along +z, x right, y down (matching pixel axes).
struct SceneSpec {
    CameraIntrinsics intrinsics;
    int frame_count = 0;
    std::vector<PoseSE3> camera;  ///< world-from-camera, one per frame
    std::vector<StaticSurface> statics;
    std::vector<SceneObject> objects;
    std::uint64_t seed = 0;
    double depth_noise_sigma = 0.0;  ///< additive Gaussian on valid depth, meters
    double flow_noise_sigma = 0.0;   ///< additive Gaussian per flow component, pixels
};

std::optional<std::string> validate(const SceneSpec& spec);

/// Everything the pipeline consumes for one frame, rendered exactly.
struct FramePackage {
    int frame = 0;
    DepthMap depth;
    LabelMask class_mask;
    LabelMask instance_mask;  ///< ids are object index + 1
    LabelMask gt_motion;      ///< pixels on objects whose t -> t+1 motion is non-identity
    FlowField full_flow;      ///< camera motion + object motion, to frame t+1
    PoseSE3 camera;           ///< world-from-camera at t
};

/// Ray-cast frame t against the scene at t; the flow target is frame t+1,
/// so t must satisfy 0 <= t < frame_count - 1.
FramePackage render_frame(const SceneSpec& spec, int t);

/// Camera motion mapping frame-t camera coordinates into frame t+1.
PoseSE3 relative_camera_motion(const SceneSpec& spec, int t);

/// Camera trajectory with the frame index as the timestamp.
Trajectory camera_trajectory(const SceneSpec& spec);

struct ExportResult {
    std::filesystem::path manifest;
    int frames = 0;  ///< exported frame packages (frame_count - 1)
};

/// Write the rendered sequence: depth (PFM), flow (.flo), class/instance/
/// ground-truth-motion masks (PGM), camera poses (TUM + KITTI), intrinsics,
/// a class-id legend, and the manifest.
ExportResult export_sequence(const SceneSpec& spec, const std::filesystem::path& out_dir);

/// Parse the line-oriented scene description (see scenes/ for the grammar);
/// errors carry `origin:line`.
SceneSpec parse_scene_spec(const std::string& text, const std::string& origin);
SceneSpec load_scene_spec(const std::filesystem::path& path);

}  // namespace sfg::synth
