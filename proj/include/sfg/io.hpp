#pragma once

#include "sfg/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace sfg::io {

/// Middlebury .flo: little-endian magic float 202021.25, int32 width/height,
/// then row-major interleaved (u, v) single-precision pairs.
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& flow, const std::filesystem::path& path);

/// Grayscale PFM ("Pf"), negative scale = little-endian, rows stored
/// bottom-to-top. Invalid depth is stored as 0.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DepthMap& depth, const std::filesystem::path& path);

/// Binary PGM (P5); 16-bit big-endian samples when any label exceeds 255.
LabelMask read_pgm(const std::filesystem::path& path, MaskKind kind = MaskKind::Instance);
void write_pgm(const LabelMask& mask, const std::filesystem::path& path);

/// TUM text trajectory: `timestamp tx ty tz qx qy qz qw` per line, '#'
/// comments allowed. Poses are world-from-camera.
Trajectory read_trajectory_tum(const std::filesystem::path& path);
void write_trajectory_tum(const Trajectory& trajectory, const std::filesystem::path& path);

/// KITTI text trajectory: 12 values per line, the 3x4 [R|t] row-major;
/// the line index doubles as the timestamp.
Trajectory read_trajectory_kitti(const std::filesystem::path& path);
void write_trajectory_kitti(const Trajectory& trajectory, const std::filesystem::path& path);

/// Single text line `fx fy cx cy width height`.
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);
void write_intrinsics(const CameraIntrinsics& intrinsics, const std::filesystem::path& path);

/// Write via a temp file in the same directory plus an atomic rename, so
/// concurrent pipeline workers never expose partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace sfg::io
