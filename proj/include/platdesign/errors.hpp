#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace platdesign {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Inconsistent or invalid design / prior / artifact configuration.
/// Carries one message per offending field.
class ConfigError : public std::runtime_error {
   public:
    explicit ConfigError(const std::string& msg)
        : std::runtime_error(msg), fields_{msg} {}
    explicit ConfigError(std::vector<std::string> fields)
        : std::runtime_error(join(fields)), fields_(std::move(fields)) {}

    const std::vector<std::string>& fields() const noexcept { return fields_; }

   private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> fields_;
};

/// No candidate satisfies a target; `best` is the closest value achieved
/// (minimum FWER for calibration, best minimum power for the n search).
class InfeasibleError : public std::runtime_error {
   public:
    InfeasibleError(const std::string& msg, double best, long best_n = -1)
        : std::runtime_error(msg), best_(best), best_n_(best_n) {}
    double best() const noexcept { return best_; }
    long best_n() const noexcept { return best_n_; }

   private:
    double best_;
    long best_n_;
};

/// File read/write failure, unknown artifact version, digest mismatch.
class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace platdesign
