#include "platdesign/artifact.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "platdesign/errors.hpp"
#include "platdesign/json_io.hpp"

namespace platdesign {

namespace {

int major_version(const std::string& v) {
    const auto dot = v.find('.');
    try {
        return std::stoi(v.substr(0, dot));
    } catch (const std::exception&) {
        throw IoError("artifact: malformed format_version '" + v + "'");
    }
}

void check_version(const std::string& v) {
    if (major_version(v) != 1) throw IoError("artifact: unsupported format_version '" + v + "'");
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
        throw IoError("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

AnchorArtifact make_artifact(const DesignConfig& config, const Algorithm1Result& result) {
    AnchorArtifact a;
    a.config = config;
    a.thresholds = result.thresholds;
    a.samples_a = result.alt_a;
    a.samples_b = result.alt_b;
    if (!result.null_a.replicates.empty()) a.null_samples = result.null_a;
    a.models = result.models;
    return a;
}

std::string serialize_artifact(const AnchorArtifact& a) {
    Json p{{"format_version", a.format_version},
           {"config", to_json(a.config)},
           {"thresholds", to_json(a.thresholds)},
           {"samples_a", to_json(a.samples_a)},
           {"samples_b", to_json(a.samples_b)},
           {"null_samples", a.null_samples ? to_json(*a.null_samples) : Json(nullptr)},
           {"models", to_json(a.models)}};
    const std::string payload = p.dump();
    const Json header{{"digest", "sha256:" + sha256_hex(payload)}, {"format_version", a.format_version}};
    return header.dump() + "\n" + payload;
}

AnchorArtifact deserialize_artifact(const std::string& bytes) {
    const auto nl = bytes.find('\n');
    if (nl == std::string::npos) throw IoError("artifact: missing header line");
    Json header;
    try {
        header = Json::parse(bytes.substr(0, nl));
    } catch (const Json::exception& e) {
        throw IoError(std::string("artifact: malformed header: ") + e.what());
    }
    if (!header.is_object() || !header.contains("digest") || !header.contains("format_version")) {
        throw IoError("artifact: header lacks digest or format_version");
    }
    check_version(header["format_version"].get<std::string>());
    const std::string payload = bytes.substr(nl + 1);
    const std::string expected = header["digest"].get<std::string>();
    if (expected != "sha256:" + sha256_hex(payload)) throw IoError("artifact: digest mismatch");

    try {
        const Json p = Json::parse(payload);
        AnchorArtifact a;
        a.format_version = p.at("format_version").get<std::string>();
        check_version(a.format_version);
        a.config = config_from_json(p.at("config"));
        a.thresholds = thresholds_from_json(p.at("thresholds"));
        a.samples_a = sample_set_from_json(p.at("samples_a"));
        a.samples_b = sample_set_from_json(p.at("samples_b"));
        if (!p.at("null_samples").is_null()) a.null_samples = sample_set_from_json(p.at("null_samples"));
        a.models = models_from_json(p.at("models"));
        return a;
    } catch (const Json::exception& e) {
        throw IoError(std::string("artifact: malformed payload: ") + e.what());
    } catch (const DomainError& e) {
        throw IoError(std::string("artifact: invalid value: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_artifact(const AnchorArtifact& a, const std::filesystem::path& path) { write_file(path, serialize_artifact(a)); }

AnchorArtifact read_artifact(const std::filesystem::path& path) { return deserialize_artifact(read_file(path)); }

}  // namespace platdesign
