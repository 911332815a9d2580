#pragma once

#include "sfg/types.hpp"

#include <optional>

namespace sfg::motionseg {

/// Two-center clustering outcome on normalized residual values.
struct ClusterResult {
    double static_center = 0.0;  ///< c_s, always <= moving_center
    double moving_center = 0.0;  ///< c_m
    LabelMask assignments;       ///< binary-motion labels on the field grid
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;  ///< all values equal (or no signal): everything static
};

struct KMeansOptions {
    int max_iterations = 100;
    double tolerance = 1e-6;  ///< stop when both centers move less than this
};

struct SegmentationOptions {
    KMeansOptions kmeans;
    /// When the two cluster centers end up closer than this on the
    /// normalized scale, the whole frame is declared static.
    double min_center_separation = 0.05;
    /// Debug path: label residual >= threshold as moving instead of clustering.
    std::optional<double> fixed_threshold;
};

struct FlowGuidedMask {
    LabelMask mask;  ///< binary motion, invalid pixels always 0
    ClusterResult clusters;
    bool forced_static = false;  ///< separation guard tripped
};

/// Per-pixel Euclidean norm of (full - rigid); invalid where either input is.
ResidualField residual_field(const FlowField& full, const FlowField& rigid);

/// Divide by the maximum over valid pixels. A maximum below 1e-12 yields the
/// all-zero field with degenerate_static set.
ResidualField normalize(const ResidualField& residual);

/// Lloyd's algorithm with k = 2 on the 1-D valid-pixel values, centers
/// initialized at the minimum and maximum. Ties label static.
ClusterResult kmeans2(const ResidualField& normalized, const KMeansOptions& options = {});

/// Full chain: residual -> normalize -> cluster -> binary mask.
FlowGuidedMask flow_guided_mask(const FlowField& full, const FlowField& rigid,
                                const SegmentationOptions& options = {});

}  // namespace sfg::motionseg
