#include "sfg/types.hpp"

#include <algorithm>
#include <cmath>

namespace sfg {

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
    PoseSE3 out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

PoseSE3 invert(const PoseSE3& pose) {
    PoseSE3 out;
    out.rotation = pose.rotation.transpose();
    out.translation = -(out.rotation * pose.translation);
    return out;
}

double rotation_angle(const Eigen::Matrix3d& rotation) {
    const double c = 0.5 * (rotation.trace() - 1.0);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double identity_deviation(const PoseSE3& pose) {
    const Eigen::Matrix3d dr = pose.rotation - Eigen::Matrix3d::Identity();
    return std::max(dr.cwiseAbs().maxCoeff(), pose.translation.cwiseAbs().maxCoeff());
}

DepthMap DepthMap::constant(int width, int height, double value) {
    DepthMap d;
    d.width = width;
    d.height = height;
    d.values.assign(static_cast<std::size_t>(width) * height, value);
    return d;
}

FlowField FlowField::zeros(int width, int height) {
    FlowField f;
    f.width = width;
    f.height = height;
    f.values.assign(static_cast<std::size_t>(width) * height, Eigen::Vector2d::Zero());
    f.valid.assign(static_cast<std::size_t>(width) * height, 1);
    return f;
}

ResidualField ResidualField::zeros(int width, int height) {
    ResidualField r;
    r.width = width;
    r.height = height;
    r.values.assign(static_cast<std::size_t>(width) * height, 0.0);
    r.valid.assign(static_cast<std::size_t>(width) * height, 1);
    return r;
}

LabelMask LabelMask::zeros(int width, int height, MaskKind kind) {
    LabelMask m;
    m.width = width;
    m.height = height;
    m.kind = kind;
    m.values.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
}

namespace {

constexpr double kPoseTolerance = 1e-9;

bool grid_sized(int width, int height, std::size_t n) {
    return width >= 1 && height >= 1 && n == static_cast<std::size_t>(width) * height;
}

}  // namespace

std::optional<std::string> validate(const CameraIntrinsics& k) {
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) return "non-positive focal length";
    if (k.width < 1 || k.height < 1) return "empty image size";
    if (!(k.cx >= 0.0 && k.cx < k.width)) return "principal point x outside image";
    if (!(k.cy >= 0.0 && k.cy < k.height)) return "principal point y outside image";
    return std::nullopt;
}

std::optional<std::string> validate(const PoseSE3& pose) {
    if (!pose.rotation.allFinite() || !pose.translation.allFinite()) return "non-finite pose";
    const double det = pose.rotation.determinant();
    if (det < 0.0) return "improper rotation";
    const Eigen::Matrix3d gram = pose.rotation.transpose() * pose.rotation;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kPoseTolerance)
        return "non-orthonormal rotation";
    if (std::abs(det - 1.0) > kPoseTolerance) return "non-unit determinant";
    if (identity_deviation(compose(pose, invert(pose))) > kPoseTolerance)
        return "inverse does not cancel";
    return std::nullopt;
}

std::optional<std::string> validate(const DepthMap& depth) {
    if (!grid_sized(depth.width, depth.height, depth.values.size()))
        return "dimension mismatch";
    return std::nullopt;
}

std::optional<std::string> validate(const DepthMap& depth, const CameraIntrinsics& k) {
    if (auto err = validate(depth)) return err;
    if (depth.width != k.width || depth.height != k.height)
        return "dimension mismatch against intrinsics";
    return std::nullopt;
}

std::optional<std::string> validate(const FlowField& flow) {
    if (!grid_sized(flow.width, flow.height, flow.values.size()))
        return "dimension mismatch";
    if (flow.valid.size() != flow.values.size()) return "validity mask size mismatch";
    for (std::size_t i = 0; i < flow.values.size(); ++i) {
        if (flow.valid[i] && !flow.values[i].allFinite())
            return "non-finite flow at valid pixel";
    }
    return std::nullopt;
}

std::optional<std::string> validate(const ResidualField& residual) {
    if (!grid_sized(residual.width, residual.height, residual.values.size()))
        return "dimension mismatch";
    if (residual.valid.size() != residual.values.size()) return "validity mask size mismatch";
    double max_valid = 0.0;
    bool any_valid = false;
    for (std::size_t i = 0; i < residual.values.size(); ++i) {
        if (!residual.valid[i]) continue;
        any_valid = true;
        const double v = residual.values[i];
        if (!std::isfinite(v) || v < 0.0) return "negative or non-finite residual";
        max_valid = std::max(max_valid, v);
    }
    if (residual.normalized && any_valid && max_valid > 0.0 &&
        std::abs(max_valid - 1.0) > 1e-12) {
        return "normalized field maximum is not 1";
    }
    return std::nullopt;
}

std::optional<std::string> validate(const LabelMask& mask) {
    if (!grid_sized(mask.width, mask.height, mask.values.size()))
        return "dimension mismatch";
    if (mask.kind == MaskKind::BinaryMotion) {
        for (const std::uint32_t v : mask.values) {
            if (v > 1) return "non-binary motion mask";
        }
    }
    return std::nullopt;
}

std::optional<std::string> validate(const Trajectory& trajectory) {
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        if (!(trajectory[i].timestamp > trajectory[i - 1].timestamp))
            return "non-monotone timestamps";
    }
    for (const StampedPose& sp : trajectory) {
        if (auto err = validate(sp.pose)) return err;
    }
    return std::nullopt;
}

}  // namespace sfg
