#include "sdnabr/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sdnabr/errors.hpp"

namespace sdnabr {
namespace {

std::string version_label(std::size_t position) {
  return "versions[" + std::to_string(position) + "]";
}

// Uniform in [-1, 1) from raw engine bits; std distributions are not
// reproducible across standard library implementations.
double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

VideoCatalog VideoCatalog::Create(double segment_duration_s, std::vector<Version> versions) {
  if (!(segment_duration_s > 0.0) || !std::isfinite(segment_duration_s)) {
    throw ValidationError("segment_duration_s must be positive");
  }
  if (versions.empty()) {
    throw ValidationError("versions: catalog needs at least one version");
  }
  const std::size_t num_segments = versions.front().segment_bitrates_kbps.size();
  if (num_segments == 0) {
    throw ValidationError(version_label(0) + ".segment_bitrates_kbps: needs at least one segment");
  }
  for (std::size_t v = 0; v < versions.size(); ++v) {
    const Version& ver = versions[v];
    const std::string label = version_label(v);
    if (ver.index != static_cast<int>(v)) {
      throw ValidationError(label + ".index: expected " + std::to_string(v) + ", got " +
                            std::to_string(ver.index));
    }
    if (ver.segment_bitrates_kbps.size() != num_segments) {
      throw ValidationError(label + ".segment_bitrates_kbps: expected " +
                            std::to_string(num_segments) + " segments, got " +
                            std::to_string(ver.segment_bitrates_kbps.size()));
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < num_segments; ++s) {
      const double rate = ver.segment_bitrates_kbps[s];
      if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ValidationError(label + ".segment_bitrates_kbps[" + std::to_string(s) +
                              "]: bitrate must be positive");
      }
      sum += rate;
    }
    if (!(ver.avg_bitrate_kbps > 0.0)) {
      throw ValidationError(label + ".avg_bitrate_kbps: must be positive");
    }
    const double mean = sum / static_cast<double>(num_segments);
    if (std::abs(mean - ver.avg_bitrate_kbps) > kAverageTolerance * ver.avg_bitrate_kbps) {
      std::ostringstream msg;
      msg << label << ".avg_bitrate_kbps: declared " << ver.avg_bitrate_kbps
          << " differs from segment mean " << mean << " by more than 1%";
      throw ValidationError(msg.str());
    }
    if (v > 0 && !(ver.avg_bitrate_kbps > versions[v - 1].avg_bitrate_kbps)) {
      throw ValidationError(label + ".avg_bitrate_kbps: versions must be strictly ascending");
    }
  }

  VideoCatalog catalog;
  catalog.segment_duration_s_ = segment_duration_s;
  catalog.num_segments_ = static_cast<int>(num_segments);
  catalog.versions_ = std::move(versions);
  return catalog;
}

const Version& VideoCatalog::version(int index) const {
  if (index < 0 || index >= num_versions()) {
    throw std::out_of_range("version index " + std::to_string(index) + " out of range");
  }
  return versions_[static_cast<std::size_t>(index)];
}

double VideoCatalog::segment_bitrate(int version, int segment) const {
  const Version& ver = this->version(version);
  if (segment < 0 || segment >= num_segments_) {
    throw std::out_of_range("segment index " + std::to_string(segment) + " out of range");
  }
  return ver.segment_bitrates_kbps[static_cast<std::size_t>(segment)];
}

double segment_size_kbits(const VideoCatalog& catalog, int version, int segment) {
  return catalog.segment_bitrate(version, segment) * catalog.segment_duration_s();
}

VideoCatalog parse_catalog(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("catalog: expected a JSON object");
  if (!doc.contains("segment_duration_s") || !doc["segment_duration_s"].is_number()) {
    throw ValidationError("segment_duration_s: missing or not a number");
  }
  if (!doc.contains("versions") || !doc["versions"].is_array()) {
    throw ValidationError("versions: missing or not an array");
  }
  std::vector<Version> versions;
  std::size_t position = 0;
  for (const auto& item : doc["versions"]) {
    const std::string label = version_label(position++);
    try {
      Version ver;
      ver.index = item.at("index").get<int>();
      ver.qp = item.at("qp").get<int>();
      ver.avg_bitrate_kbps = item.at("avg_bitrate_kbps").get<double>();
      ver.segment_bitrates_kbps = item.at("segment_bitrates_kbps").get<std::vector<double>>();
      versions.push_back(std::move(ver));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(label + ": " + e.what());
    }
  }
  return VideoCatalog::Create(doc["segment_duration_s"].get<double>(), std::move(versions));
}

nlohmann::json catalog_to_json(const VideoCatalog& catalog) {
  nlohmann::json versions = nlohmann::json::array();
  for (const Version& ver : catalog.versions()) {
    versions.push_back({{"index", ver.index},
                        {"qp", ver.qp},
                        {"avg_bitrate_kbps", ver.avg_bitrate_kbps},
                        {"segment_bitrates_kbps", ver.segment_bitrates_kbps}});
  }
  return {{"segment_duration_s", catalog.segment_duration_s()}, {"versions", versions}};
}

VideoCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("catalog: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("catalog: " + path.string() + ": " + e.what());
  }
  return parse_catalog(doc);
}

void save_catalog(const VideoCatalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << catalog_to_json(catalog).dump(1) << '\n';
}

VideoCatalog generate_synthetic_catalog(std::uint64_t seed, int num_versions, int num_segments,
                                        std::span<const double> avg_bitrates_kbps,
                                        double vbr_swing, double segment_duration_s,
                                        std::span<const int> qps) {
  if (num_versions < 1 || num_segments < 1) {
    throw ValidationError("num_versions and num_segments must be at least 1");
  }
  if (avg_bitrates_kbps.size() != static_cast<std::size_t>(num_versions)) {
    throw ValidationError("avg_bitrates: expected one average per version");
  }
  if (!qps.empty() && qps.size() != avg_bitrates_kbps.size()) {
    throw ValidationError("qps: expected one QP per version");
  }
  for (std::size_t v = 1; v < avg_bitrates_kbps.size(); ++v) {
    if (!(avg_bitrates_kbps[v] > avg_bitrates_kbps[v - 1])) {
      throw ValidationError("avg_bitrates: must be strictly ascending");
    }
  }
  if (!(vbr_swing >= 0.0 && vbr_swing < 1.0)) {
    throw ValidationError("vbr_swing: must lie in [0, 1)");
  }

  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::size_t>(num_segments);

  // Shared scene complexity: AR(1) drift with occasional scene cuts.
  std::vector<double> scene(n);
  double level = symmetric_unit(rng);
  for (std::size_t s = 0; s < n; ++s) {
    const double draw = symmetric_unit(rng);
    if (symmetric_unit(rng) > 0.84) {
      level = draw;
    } else {
      level = 0.85 * level + 0.15 * draw;
    }
    scene[s] = level;
  }

  std::vector<Version> versions;
  versions.reserve(static_cast<std::size_t>(num_versions));
  for (int v = 0; v < num_versions; ++v) {
    std::vector<double> shape(n);
    for (std::size_t s = 0; s < n; ++s) {
      shape[s] = 0.85 * scene[s] + 0.15 * symmetric_unit(rng);
    }
    double mean = 0.0;
    for (double x : shape) mean += x;
    mean /= static_cast<double>(n);
    double peak = 0.0;
    for (double& x : shape) {
      x -= mean;
      peak = std::max(peak, std::abs(x));
    }
    const double avg = avg_bitrates_kbps[static_cast<std::size_t>(v)];
    Version ver;
    ver.index = v;
    ver.qp = qps.empty() ? 0 : qps[static_cast<std::size_t>(v)];
    ver.avg_bitrate_kbps = avg;
    ver.segment_bitrates_kbps.reserve(n);
    for (double x : shape) {
      const double unit = peak > 0.0 ? x / peak : 0.0;
      ver.segment_bitrates_kbps.push_back(avg * (1.0 + vbr_swing * unit));
    }
    versions.push_back(std::move(ver));
  }
  return VideoCatalog::Create(segment_duration_s, std::move(versions));
}

VideoCatalog generate_reference_catalog() {
  return generate_synthetic_catalog(1, static_cast<int>(kReferenceLadderKbps.size()),
                                    kReferenceSegmentCount, kReferenceLadderKbps, 0.5,
                                    kReferenceSegmentDurationS, kReferenceLadderQp);
}

}  // namespace sdnabr
