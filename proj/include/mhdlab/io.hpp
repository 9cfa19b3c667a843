#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhdlab/energy.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

inline constexpr std::uint16_t kSnapshotMajor = 1;
inline constexpr std::uint16_t kSnapshotMinor = 0;

/// Decoded snapshot file: header plus named sample arrays.
struct SnapshotData {
  std::uint16_t major = kSnapshotMajor;
  std::uint16_t minor = kSnapshotMinor;
  std::uint32_t n = 0;
  double length = 0.0;
  double time = 0.0;
  std::vector<std::string> names;
  std::string metadata = "{}";  // JSON text
  std::vector<std::vector<double>> fields;
  /// Set when the file carried a newer minor version.
  std::string warning;
};

/// Layout: "MHDW", u16 major, u16 minor, u32 N, f64 L, f64 time,
/// u32 field count, names (u16 length + bytes), u32 metadata length + JSON,
/// then N^3 little-endian f64 per field, x fastest.
void write_snapshot_data(const SnapshotData& d, const std::string& path);
SnapshotData read_snapshot_data(const std::string& path);

/// Writes u, b, v, c, p, q and non-zero F, G entries.
void write_snapshot(const SimState& s, const Grid& g, const std::string& path);
SimState read_snapshot(const std::string& path, std::string* warning = nullptr);

/// CSV with header t_a, t_b, twelve ledger terms, slack; 17 significant digits.
void write_ledgers(const std::vector<EnergyLedger>& rows, const std::string& path);
std::vector<EnergyLedger> read_ledgers(const std::string& path);

/// 17-significant-digit decimal.
std::string format_double(double v);

}  // namespace mhdlab
