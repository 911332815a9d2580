#pragma once

#include "sfg/types.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sfg::fusion {

/// Canonical class-id table shared by the scene synthesizer and the mask
/// pipeline. Movable classes occupy ids 1..7; scenery classes start at 100.
/// Returns 0 for unknown names.
std::uint32_t class_id_of(const std::string& name);
std::string class_name_of(std::uint32_t id);

/// A-priori movable classes, id -> name.
struct MovableClassSet {
    std::vector<std::pair<std::uint32_t, std::string>> classes;

    /// car, bus, motorcycle, bicycle, truck, person, rider.
    static MovableClassSet defaults();
    static MovableClassSet from_names(std::span<const std::string> names);

    bool contains(std::uint32_t class_id) const;
};

/// Per-instance motion decision.
struct InstanceReport {
    std::uint32_t instance = 0;  ///< dense candidate id
    std::uint32_t class_id = 0;
    std::uint64_t pixels = 0;   ///< |Omega_q|
    std::uint64_t flagged = 0;  ///< motion-flagged pixels inside Omega_q
    double ratio = 0.0;         ///< flagged / pixels
    bool dynamic = false;       ///< ratio >= threshold
};

/// Movable-class candidate instances extracted from the semantic rasters.
struct CandidateMask {
    LabelMask mask;  ///< instance kind, ids renumbered densely 1..n
    std::vector<std::uint32_t> original_ids;  ///< indexed by dense id - 1
    std::vector<std::uint32_t> class_ids;     ///< indexed by dense id - 1
};

/// Keep instance pixels whose instance belongs to a movable class, renumber
/// the survivors densely in ascending original-id order, zero the rest.
/// Where class and instance rasters disagree at a pixel, the instance raster
/// wins and the instance's majority class decides.
CandidateMask semantic_guided_mask(const LabelMask& class_mask,
                                   const LabelMask& instance_mask,
                                   const MovableClassSet& movable);

/// Fraction of instance q's pixels flagged by the motion mask.
double instance_ratio(std::uint32_t q, const LabelMask& candidates,
                      const LabelMask& motion);

struct SemanticFlowMask {
    LabelMask mask;  ///< instance kind; a kept instance retains its whole pixel domain
    std::vector<InstanceReport> reports;  ///< one per candidate instance, ordered by id
};

/// Per-instance fusion: instance q keeps its full pixel domain iff its
/// motion-pixel ratio reaches the threshold, otherwise it is zeroed.
SemanticFlowMask semantic_flow_guided_mask(const LabelMask& candidates,
                                           const LabelMask& motion,
                                           double ratio_threshold = 0.5);
SemanticFlowMask semantic_flow_guided_mask(const CandidateMask& candidates,
                                           const LabelMask& motion,
                                           double ratio_threshold = 0.5);

/// CSV header: frame,instance,class,pixels,flagged,ratio,decision
std::string reports_csv_header();
void append_reports_csv(std::string& out, int frame, std::span<const InstanceReport> reports);

/// Collapse an instance mask to binary motion (any nonzero label -> 1).
LabelMask binarize(const LabelMask& instance_mask);

}  // namespace sfg::fusion
