#pragma once

#include <filesystem>
#include <string>

#include "seamforge/types.hpp"

namespace seamforge::pcio {

/// ASCII PLY with float x,y,z and optional nx,ny,nz properties. Values are
/// serialized with 9 significant digits, which round-trips 32-bit floats
/// exactly. Readers return ParseError with a line number on malformed input
/// and DataError on non-finite values.
PointCloud read_ply(const std::filesystem::path& path);
void write_ply(const PointCloud& cloud, const std::filesystem::path& path);

/// Session directory: session.json plus one PLY per frame.
/// session.json schema:
///   { "hand_eye": [16 floats, row-major],
///     "frames": [ { "ply": "frame_000.ply", "end_effector_pose": [16 floats] }, ... ],
///     "metadata": { string: string, optional },
///     "true_end_effector_poses": [[16 floats], ...]  (optional, synthetic truth) }
/// Frame camera poses are end_effector_pose * hand_eye. Rotations must be
/// orthonormal with positive determinant within 1e-6 or InvalidPose is raised.
ScanSession read_session(const std::filesystem::path& dir);
void write_session(const ScanSession& session, const std::filesystem::path& dir);

/// Welding path CSV: header "x,y,z,rx,ry,rz", one row per pose, positions in
/// meters and rotation vector in radians, 9 significant digits.
void write_path_csv(const Path& path_points, const std::filesystem::path& path);
Path read_path_csv(const std::filesystem::path& path);

/// Formats with "%.9g" (the precision used by every writer above).
std::string format_g9(double value);

/// Writes content to path atomically (temp file in the same directory, then
/// rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace seamforge::pcio
