#pragma once

#include "sfg/types.hpp"

namespace sfg::geometry {

/// Lift a pixel with known depth to a camera-frame 3D point:
/// (depth*(x-cx)/fx, depth*(y-cy)/fy, depth). Throws InvalidDepthError on
/// non-positive or non-finite depth.
Eigen::Vector3d backproject(const Eigen::Vector2d& pixel, double depth,
                            const CameraIntrinsics& k);

/// Pinhole projection (fx*x/z + cx, fy*y/z + cy). The result is continuous
/// and may lie outside the image; callers decide whether that matters.
/// Throws BehindCameraError when z <= 0.
Eigen::Vector2d project(const Eigen::Vector3d& point, const CameraIntrinsics& k);

/// Synthesize the 2D flow induced purely by camera motion over a static
/// scene: per valid pixel p, project(motion * backproject(p, depth(p))) - p.
/// Invalid-depth pixels and pixels whose transformed point falls behind the
/// camera get zero flow and are cleared in the validity mask.
FlowField rigid_flow(const DepthMap& depth, const PoseSE3& motion,
                     const CameraIntrinsics& k);

}  // namespace sfg::geometry
