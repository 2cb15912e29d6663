#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "platdesign/config.hpp"
#include "platdesign/ssd.hpp"

namespace platdesign {

inline constexpr const char* kArtifactFormatVersion = "1.0.0";

/// Everything needed to recompute operating characteristics at any n and
/// any thresholds without new simulation.
struct AnchorArtifact {
    std::string format_version = kArtifactFormatVersion;
    DesignConfig config;
    Thresholds thresholds;  // thresholds in force after calibration
    TauSampleSet samples_a;
    TauSampleSet samples_b;
    std::optional<TauSampleSet> null_samples;
    AnchorModelSet models;

    friend bool operator==(const AnchorArtifact&, const AnchorArtifact&) = default;
};

AnchorArtifact make_artifact(const DesignConfig& config, const Algorithm1Result& result);

/// File layout: one header line {"digest":"sha256:<hex>","format_version":...}
/// followed by the payload JSON. The digest covers the payload bytes.
std::string serialize_artifact(const AnchorArtifact& a);
AnchorArtifact deserialize_artifact(const std::string& bytes);

void write_artifact(const AnchorArtifact& a, const std::filesystem::path& path);
AnchorArtifact read_artifact(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

/// Whole-file helpers; throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace platdesign
