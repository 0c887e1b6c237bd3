#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

namespace sdnabr {

// One encoding of the video. Index 0 is the lowest quality.
struct Version {
  int index = 0;
  int qp = 0;  // metadata only
  double avg_bitrate_kbps = 0.0;
  std::vector<double> segment_bitrates_kbps;

  bool operator==(const Version&) const = default;
};

// Declared average and computed mean must agree within this fraction.
inline constexpr double kAverageTolerance = 0.01;

// Version ladder of the reference VBR test video (12 versions, 2 s segments).
inline constexpr std::array<double, 12> kReferenceLadderKbps = {
    354, 472, 638, 882, 1234, 1779, 2588, 3823, 5613, 8028, 11156, 15227};
inline constexpr std::array<int, 12> kReferenceLadderQp = {46, 43, 40, 37, 34, 31,
                                                           28, 25, 22, 19, 16, 13};
inline constexpr int kReferenceSegmentCount = 327;
inline constexpr double kReferenceSegmentDurationS = 2.0;

// Immutable, validated version ladder with per-segment VBR bitrates.
class VideoCatalog {
 public:
  // Throws ValidationError naming the version/segment that breaks an
  // invariant.
  static VideoCatalog Create(double segment_duration_s, std::vector<Version> versions);

  double segment_duration_s() const { return segment_duration_s_; }
  std::span<const Version> versions() const { return versions_; }
  const Version& version(int index) const;
  int num_versions() const { return static_cast<int>(versions_.size()); }
  int num_segments() const { return num_segments_; }
  // Highest version index (L).
  int top_index() const { return num_versions() - 1; }
  double avg_bitrate(int version) const { return this->version(version).avg_bitrate_kbps; }
  double segment_bitrate(int version, int segment) const;

  bool operator==(const VideoCatalog&) const = default;

 private:
  VideoCatalog() = default;

  double segment_duration_s_ = 0.0;
  int num_segments_ = 0;
  std::vector<Version> versions_;
};

// Size of one segment: bitrate x duration. Throws std::out_of_range.
double segment_size_kbits(const VideoCatalog& catalog, int version, int segment);

VideoCatalog parse_catalog(const nlohmann::json& doc);
nlohmann::json catalog_to_json(const VideoCatalog& catalog);
VideoCatalog load_catalog(const std::filesystem::path& path);
void save_catalog(const VideoCatalog& catalog, const std::filesystem::path& path);

// Deterministic VBR fixture. All versions share one scene-complexity
// profile (plus a little per-version noise) so bitrates rise and fall
// together across the ladder. Per-segment bitrates stay within
// +/- vbr_swing of each average and their mean matches it.
VideoCatalog generate_synthetic_catalog(std::uint64_t seed, int num_versions, int num_segments,
                                        std::span<const double> avg_bitrates_kbps,
                                        double vbr_swing,
                                        double segment_duration_s = kReferenceSegmentDurationS,
                                        std::span<const int> qps = {});

// The bundled reference fixture: seed 1, reference ladder, swing 0.5.
VideoCatalog generate_reference_catalog();

}  // namespace sdnabr
