#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "platdesign/artifact.hpp"

namespace platdesign {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using QueryParams = std::multimap<std::string, std::string>;

/// Read-only registry of anchor artifacts answering operating-characteristic
/// queries. Thread-safe; cached artifacts are never mutated.
class DesignService {
   public:
    static constexpr std::size_t kDefaultMaxUpload = std::size_t{512} << 20;
    static constexpr std::size_t kMaxCurvePoints = 5000;

    explicit DesignService(std::size_t max_upload = kDefaultMaxUpload, std::string cors_origin = "*");

    /// Registers an artifact under a fresh id.
    std::string add(AnchorArtifact artifact);

    /// Socket-free request dispatch.
    HttpResponse handle(const std::string& method, const std::string& path, const QueryParams& query,
                        const std::string& body);

    const std::string& cors_origin() const noexcept { return cors_origin_; }
    std::size_t max_upload() const noexcept { return max_upload_; }

   private:
    std::shared_ptr<const AnchorArtifact> find(const std::string& id) const;
    HttpResponse load(const std::string& body);
    HttpResponse oc(const std::string& id, const QueryParams& query) const;
    HttpResponse curves(const std::string& id, const QueryParams& query) const;
    HttpResponse get(const std::string& path, const QueryParams& query) const;

    std::size_t max_upload_;
    std::string cors_origin_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const AnchorArtifact>> designs_;
    std::size_t next_id_ = 1;
};

/// JSON summary returned on load: id, config summary, anchor metadata.
std::string design_summary_json(const std::string& id, const AnchorArtifact& a);

/// Blocks serving HTTP on host:port.
void serve(DesignService& service, const std::string& host, int port);

}  // namespace platdesign
