#include "sfg/geometry.hpp"

#include <cmath>

namespace sfg::geometry {

Eigen::Vector3d backproject(const Eigen::Vector2d& pixel, double depth,
                            const CameraIntrinsics& k) {
    if (!std::isfinite(depth) || depth <= 0.0)
        throw InvalidDepthError("invalid depth " + std::to_string(depth));
    return {depth * ((pixel.x() - k.cx) / k.fx),
            depth * ((pixel.y() - k.cy) / k.fy),
            depth};
}

Eigen::Vector2d project(const Eigen::Vector3d& point, const CameraIntrinsics& k) {
    if (!(point.z() > 0.0))
        throw BehindCameraError("point behind camera, z = " + std::to_string(point.z()));
    return {k.fx * point.x() / point.z() + k.cx,
            k.fy * point.y() / point.z() + k.cy};
}

FlowField rigid_flow(const DepthMap& depth, const PoseSE3& motion,
                     const CameraIntrinsics& k) {
    if (auto err = validate(depth, k))
        throw DimensionMismatchError("rigid_flow: " + *err);

    FlowField flow = FlowField::zeros(depth.width, depth.height);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            if (!depth.valid_at(x, y)) {
                flow.set_valid(x, y, false);
                continue;
            }
            const Eigen::Vector2d pixel(static_cast<double>(x), static_cast<double>(y));
            const Eigen::Vector3d point = backproject(pixel, depth.at(x, y), k);
            const Eigen::Vector3d moved = motion.apply(point);
            if (!(moved.z() > 0.0)) {
                flow.set_valid(x, y, false);
                continue;
            }
            flow.at(x, y) = project(moved, k) - pixel;
        }
    }
    return flow;
}

}  // namespace sfg::geometry
