#include "sfg/fusion.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <map>

namespace sfg::fusion {

namespace {

struct ClassEntry {
    std::uint32_t id;
    const char* name;
};

constexpr ClassEntry kClassTable[] = {
    {1, "car"},      {2, "bus"},     {3, "motorcycle"}, {4, "bicycle"},
    {5, "truck"},    {6, "person"},  {7, "rider"},      {100, "building"},
    {101, "road"},   {102, "ground"}, {103, "wall"},    {104, "tree"},
    {105, "pole"},   {106, "terrain"},
};

void require_same_grid(const LabelMask& a, const LabelMask& b, const char* where) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatchError(std::string(where) + ": mask dimensions differ");
}

}  // namespace

std::uint32_t class_id_of(const std::string& name) {
    for (const ClassEntry& e : kClassTable) {
        if (name == e.name) return e.id;
    }
    return 0;
}

std::string class_name_of(std::uint32_t id) {
    for (const ClassEntry& e : kClassTable) {
        if (id == e.id) return e.name;
    }
    return std::to_string(id);
}

MovableClassSet MovableClassSet::defaults() {
    MovableClassSet set;
    for (const ClassEntry& e : kClassTable) {
        if (e.id <= 7) set.classes.emplace_back(e.id, e.name);
    }
    return set;
}

MovableClassSet MovableClassSet::from_names(std::span<const std::string> names) {
    MovableClassSet set;
    for (const std::string& name : names) {
        const std::uint32_t id = class_id_of(name);
        if (id == 0) throw Error("unknown movable class name: " + name);
        set.classes.emplace_back(id, name);
    }
    return set;
}

bool MovableClassSet::contains(std::uint32_t class_id) const {
    return std::any_of(classes.begin(), classes.end(),
                       [class_id](const auto& c) { return c.first == class_id; });
}

CandidateMask semantic_guided_mask(const LabelMask& class_mask,
                                   const LabelMask& instance_mask,
                                   const MovableClassSet& movable) {
    require_same_grid(class_mask, instance_mask, "semantic_guided_mask");

    // Majority class per instance; the instance raster is trusted where the
    // two rasters disagree.
    std::map<std::uint32_t, std::map<std::uint32_t, std::uint64_t>> class_votes;
    for (std::size_t i = 0; i < instance_mask.values.size(); ++i) {
        const std::uint32_t q = instance_mask.values[i];
        if (q == 0) continue;
        ++class_votes[q][class_mask.values[i]];
    }

    std::map<std::uint32_t, std::uint32_t> renumbered;  // original -> dense id
    CandidateMask out;
    for (const auto& [q, votes] : class_votes) {
        std::uint32_t majority_class = 0;
        std::uint64_t best = 0;
        for (const auto& [cls, count] : votes) {
            if (count > best) {
                best = count;
                majority_class = cls;
            }
        }
        if (!movable.contains(majority_class)) continue;
        const auto dense = static_cast<std::uint32_t>(renumbered.size() + 1);
        renumbered[q] = dense;
        out.original_ids.push_back(q);
        out.class_ids.push_back(majority_class);
    }

    out.mask = LabelMask::zeros(instance_mask.width, instance_mask.height, MaskKind::Instance);
    for (std::size_t i = 0; i < instance_mask.values.size(); ++i) {
        const std::uint32_t q = instance_mask.values[i];
        if (q == 0) continue;
        const auto it = renumbered.find(q);
        if (it != renumbered.end()) out.mask.values[i] = it->second;
    }
    return out;
}

double instance_ratio(std::uint32_t q, const LabelMask& candidates,
                      const LabelMask& motion) {
    require_same_grid(candidates, motion, "instance_ratio");
    if (q == 0) throw UnknownInstanceError("instance 0 is background");

    std::uint64_t pixels = 0;
    std::uint64_t flagged = 0;
    for (std::size_t i = 0; i < candidates.values.size(); ++i) {
        if (candidates.values[i] != q) continue;
        ++pixels;
        if (motion.values[i] != 0) ++flagged;
    }
    if (pixels == 0)
        throw UnknownInstanceError("instance " + std::to_string(q) + " not present");
    return static_cast<double>(flagged) / static_cast<double>(pixels);
}

SemanticFlowMask semantic_flow_guided_mask(const LabelMask& candidates,
                                           const LabelMask& motion,
                                           double ratio_threshold) {
    require_same_grid(candidates, motion, "semantic_flow_guided_mask");
    if (!(ratio_threshold > 0.0) || ratio_threshold > 1.0)
        throw Error("ratio threshold must be in (0, 1]");

    std::uint32_t max_id = 0;
    for (const std::uint32_t v : candidates.values) max_id = std::max(max_id, v);

    std::vector<std::uint64_t> pixels(max_id + 1, 0);
    std::vector<std::uint64_t> flagged(max_id + 1, 0);
    for (std::size_t i = 0; i < candidates.values.size(); ++i) {
        const std::uint32_t q = candidates.values[i];
        if (q == 0) continue;
        ++pixels[q];
        if (motion.values[i] != 0) ++flagged[q];
    }

    SemanticFlowMask out;
    std::vector<std::uint8_t> keep(max_id + 1, 0);
    for (std::uint32_t q = 1; q <= max_id; ++q) {
        if (pixels[q] == 0) continue;
        InstanceReport report;
        report.instance = q;
        report.pixels = pixels[q];
        report.flagged = flagged[q];
        report.ratio = static_cast<double>(flagged[q]) / static_cast<double>(pixels[q]);
        report.dynamic = report.ratio >= ratio_threshold;
        keep[q] = report.dynamic ? 1 : 0;
        out.reports.push_back(report);
    }

    out.mask = LabelMask::zeros(candidates.width, candidates.height, MaskKind::Instance);
    for (std::size_t i = 0; i < candidates.values.size(); ++i) {
        const std::uint32_t q = candidates.values[i];
        if (q != 0 && keep[q]) out.mask.values[i] = q;
    }
    return out;
}

SemanticFlowMask semantic_flow_guided_mask(const CandidateMask& candidates,
                                           const LabelMask& motion,
                                           double ratio_threshold) {
    SemanticFlowMask out = semantic_flow_guided_mask(candidates.mask, motion, ratio_threshold);
    for (InstanceReport& report : out.reports) {
        const std::size_t idx = report.instance - 1;
        if (idx < candidates.class_ids.size()) report.class_id = candidates.class_ids[idx];
    }
    return out;
}

std::string reports_csv_header() { return "frame,instance,class,pixels,flagged,ratio,decision\n"; }

void append_reports_csv(std::string& out, int frame,
                        std::span<const InstanceReport> reports) {
    char line[256];
    for (const InstanceReport& r : reports) {
        std::snprintf(line, sizeof(line), "%d,%u,%s,%" PRIu64 ",%" PRIu64 ",%.17g,%s\n",
                      frame, r.instance, class_name_of(r.class_id).c_str(),
                      r.pixels, r.flagged, r.ratio, r.dynamic ? "dynamic" : "static");
        out += line;
    }
}

LabelMask binarize(const LabelMask& instance_mask) {
    LabelMask out = LabelMask::zeros(instance_mask.width, instance_mask.height,
                                     MaskKind::BinaryMotion);
    for (std::size_t i = 0; i < instance_mask.values.size(); ++i) {
        out.values[i] = instance_mask.values[i] != 0 ? 1 : 0;
    }
    return out;
}

}  // namespace sfg::fusion
