#pragma once

#include <string>

#include "platdesign/artifact.hpp"
#include "platdesign/config.hpp"

namespace fixtures {

inline std::string source_path(const std::string& rel) { return std::string(PLATDESIGN_SOURCE_DIR) + "/" + rel; }

/// Bundled design with a small replicate count.
inline platdesign::DesignConfig small_config(std::size_t replicates = 200) {
    auto c = platdesign::parse_config(source_path("configs/sstarlet.toml"));
    c.replicates = replicates;
    c.parallelism = 1;
    return c;
}

/// Anchors for small_config(), built once per process.
inline const platdesign::AnchorArtifact& small_artifact() {
    static const platdesign::AnchorArtifact a = [] {
        const auto c = small_config();
        return platdesign::make_artifact(c, platdesign::run_algorithm1(c.algorithm1_inputs()));
    }();
    return a;
}

}  // namespace fixtures
