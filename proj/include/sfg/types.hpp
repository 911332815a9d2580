#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidDepthError : public Error {
public:
    using Error::Error;
};

class BehindCameraError : public Error {
public:
    using Error::Error;
};

class UnknownInstanceError : public Error {
public:
    using Error::Error;
};

class EmptySampleError : public Error {
public:
    using Error::Error;
};

class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Malformed file content; the message carries the path and the offending
/// line or byte position.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Pinhole camera parameters. Pixel coordinates are continuous, origin at
/// the top-left corner, x right, y down.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
};

/// Rigid transform on points: x_out = rotation * x_in + translation.
/// Stored as rotation matrix + translation; quaternions appear only at
/// serialization boundaries.
struct PoseSE3 {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rotation * x + translation; }

    static PoseSE3 identity() { return {}; }
};

/// Group composition: (a * b) applies b first, then a.
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);
PoseSE3 invert(const PoseSE3& pose);

inline PoseSE3 operator*(const PoseSE3& a, const PoseSE3& b) { return compose(a, b); }

/// Rotation angle in radians via the trace formula, clamped before acos.
double rotation_angle(const Eigen::Matrix3d& rotation);

/// Max abs deviation of compose(a, b) from the identity transform.
double identity_deviation(const PoseSE3& pose);

/// Per-pixel depth in meters on a row-major grid, origin top-left.
/// A value <= 0 or non-finite marks an invalid sample (depth hole).
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    static DepthMap constant(int width, int height, double value);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    bool valid_at(int x, int y) const {
        const double d = at(x, y);
        return std::isfinite(d) && d > 0.0;
    }
};

/// Per-pixel 2-vector displacement in pixels: u = +x right, v = +y down.
/// `valid` marks pixels whose source depth (and projection) were usable;
/// invalid pixels hold a designated zero flow.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<Eigen::Vector2d> values;
    std::vector<std::uint8_t> valid;

    static FlowField zeros(int width, int height);

    const Eigen::Vector2d& at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    Eigen::Vector2d& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    bool valid_at(int x, int y) const {
        return valid[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set_valid(int x, int y, bool v) {
        valid[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
};

/// Per-pixel non-negative scalar (flow residual magnitudes).
struct ResidualField {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
    bool normalized = false;
    /// Set by normalization when the field maximum was below epsilon; the
    /// whole frame is then treated as static.
    bool degenerate_static = false;

    static ResidualField zeros(int width, int height);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    bool valid_at(int x, int y) const {
        return valid[static_cast<std::size_t>(y) * width + x] != 0;
    }
};

enum class MaskKind {
    Instance,     ///< 0 = background, 1..n = detected objects
    Class,        ///< semantic class ids
    BinaryMotion  ///< 0 = static, 1 = dynamic
};

/// Per-pixel non-negative integer labels.
struct LabelMask {
    int width = 0;
    int height = 0;
    MaskKind kind = MaskKind::Instance;
    std::vector<std::uint32_t> values;

    static LabelMask zeros(int width, int height, MaskKind kind);

    std::uint32_t at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    std::uint32_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct StampedPose {
    double timestamp = 0.0;  ///< seconds
    PoseSE3 pose;
};

/// Timestamped pose sequence, timestamps strictly increasing.
using Trajectory = std::vector<StampedPose>;

/// Each validate() returns the first violated invariant, or nullopt when ok.
std::optional<std::string> validate(const CameraIntrinsics& intrinsics);
std::optional<std::string> validate(const PoseSE3& pose);
std::optional<std::string> validate(const DepthMap& depth);
std::optional<std::string> validate(const DepthMap& depth, const CameraIntrinsics& intrinsics);
std::optional<std::string> validate(const FlowField& flow);
std::optional<std::string> validate(const ResidualField& residual);
std::optional<std::string> validate(const LabelMask& mask);
std::optional<std::string> validate(const Trajectory& trajectory);

}  // namespace sfg
