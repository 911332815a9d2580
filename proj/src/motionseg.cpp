#include "sfg/motionseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sfg::motionseg {

namespace {

constexpr double kNormalizeEpsilon = 1e-12;

ClusterResult degenerate_result(const ResidualField& field, double center) {
    ClusterResult out;
    out.static_center = center;
    out.moving_center = center;
    out.assignments = LabelMask::zeros(field.width, field.height, MaskKind::BinaryMotion);
    out.converged = true;
    out.degenerate = true;
    return out;
}

}  // namespace

ResidualField residual_field(const FlowField& full, const FlowField& rigid) {
    if (full.width != rigid.width || full.height != rigid.height)
        throw DimensionMismatchError("residual_field: flow dimensions differ");

    ResidualField out = ResidualField::zeros(full.width, full.height);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!full.valid[i] || !rigid.valid[i]) {
            out.valid[i] = 0;
            continue;
        }
        out.values[i] = (full.values[i] - rigid.values[i]).norm();
    }
    return out;
}

ResidualField normalize(const ResidualField& residual) {
    ResidualField out = residual;
    out.normalized = true;

    double max_value = 0.0;
    for (std::size_t i = 0; i < residual.values.size(); ++i) {
        if (residual.valid[i]) max_value = std::max(max_value, residual.values[i]);
    }
    if (max_value < kNormalizeEpsilon) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        out.degenerate_static = true;
        return out;
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.valid[i]) out.values[i] = residual.values[i] / max_value;
    }
    return out;
}

ClusterResult kmeans2(const ResidualField& field, const KMeansOptions& options) {
    if (field.degenerate_static) return degenerate_result(field, 0.0);

    double min_v = std::numeric_limits<double>::infinity();
    double max_v = -std::numeric_limits<double>::infinity();
    std::size_t valid_count = 0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (!field.valid[i]) continue;
        ++valid_count;
        min_v = std::min(min_v, field.values[i]);
        max_v = std::max(max_v, field.values[i]);
    }
    if (valid_count == 0) return degenerate_result(field, 0.0);
    if (valid_count < 2 || max_v == min_v) return degenerate_result(field, min_v);

    double c_static = min_v;
    double c_moving = max_v;
    int iterations = 0;
    bool converged = false;

    while (iterations < options.max_iterations) {
        ++iterations;
        // Assignment reduces to a midpoint threshold in 1-D; sums run in
        // fixed row-major order so results are reproducible bit-for-bit.
        const double midpoint = 0.5 * (c_static + c_moving);
        double sum_static = 0.0, sum_moving = 0.0;
        std::size_t n_static = 0, n_moving = 0;
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            if (!field.valid[i]) continue;
            const double v = field.values[i];
            if (v <= midpoint) {
                sum_static += v;
                ++n_static;
            } else {
                sum_moving += v;
                ++n_moving;
            }
        }
        const double next_static = n_static > 0 ? sum_static / n_static : c_static;
        const double next_moving = n_moving > 0 ? sum_moving / n_moving : c_moving;
        const double movement =
            std::max(std::abs(next_static - c_static), std::abs(next_moving - c_moving));
        c_static = next_static;
        c_moving = next_moving;
        if (movement < options.tolerance) {
            converged = true;
            break;
        }
    }

    ClusterResult out;
    out.static_center = std::min(c_static, c_moving);
    out.moving_center = std::max(c_static, c_moving);
    out.iterations = iterations;
    out.converged = converged;
    out.assignments = LabelMask::zeros(field.width, field.height, MaskKind::BinaryMotion);

    const double midpoint = 0.5 * (out.static_center + out.moving_center);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (!field.valid[i]) continue;
        // Value exactly on the midpoint is a tie: labeled static.
        out.assignments.values[i] = field.values[i] > midpoint ? 1 : 0;
    }
    return out;
}

FlowGuidedMask flow_guided_mask(const FlowField& full, const FlowField& rigid,
                                const SegmentationOptions& options) {
    const ResidualField normalized = normalize(residual_field(full, rigid));

    FlowGuidedMask out;
    if (options.fixed_threshold) {
        const double threshold = *options.fixed_threshold;
        out.mask = LabelMask::zeros(normalized.width, normalized.height, MaskKind::BinaryMotion);
        for (std::size_t i = 0; i < normalized.values.size(); ++i) {
            if (normalized.valid[i] && normalized.values[i] >= threshold)
                out.mask.values[i] = 1;
        }
        out.clusters = degenerate_result(normalized, threshold);
        out.clusters.degenerate = false;
        return out;
    }

    out.clusters = kmeans2(normalized, options.kmeans);
    if (!out.clusters.degenerate &&
        out.clusters.moving_center - out.clusters.static_center < options.min_center_separation) {
        out.forced_static = true;
        out.mask = LabelMask::zeros(normalized.width, normalized.height, MaskKind::BinaryMotion);
        return out;
    }
    out.mask = out.clusters.assignments;
    return out;
}

}  // namespace sfg::motionseg
