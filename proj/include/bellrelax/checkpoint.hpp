#pragma once

// Binary checkpoint of (psi, Ttilde, step) for resuming or re-analysing runs.
//
// Layout, all little-endian:
//   offset  size  field
//   0       8     magic "BBBCKPT\0"
//   8       4     u32 format version (kCheckpointVersion)
//   12      4     u32 N (sites per direction; n = N*N)
//   16      8     u64 step
//   24      8     f64 L
//   32      8     f64 epsilon
//   40      16n   psi as (re, im) f64 pairs, site order
//   40+16n  8n^2  Ttilde, column-major f64

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>

namespace bellrelax {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  int N = 0;
  std::int64_t step = 0;
  double L = 1.0;
  double epsilon = 0.0;
  Eigen::VectorXcd psi;
  Eigen::MatrixXd cumulative;

  double t_over_L() const { return static_cast<double>(step) * epsilon / L; }
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Throws ValidationError on unreadable files, bad magic, a version
/// mismatch (the message names the expected version) or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bellrelax
