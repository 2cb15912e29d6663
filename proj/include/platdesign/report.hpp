#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "platdesign/oc.hpp"

namespace platdesign {

struct CurveRow {
    long n_interim = 0;
    long n_final = 0;
    int arm = 1;
    std::string scenario;
    std::string source;  // estimated | simulated
    double probability = 0.0;

    friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

/// One row per (n, arm) of the per-arm non-inferiority probability.
std::vector<CurveRow> curve_rows(const std::vector<OperatingCharacteristics>& curve, const std::string& scenario,
                                 const std::string& source);

std::string curves_csv(const std::vector<CurveRow>& rows);
std::vector<CurveRow> parse_curves_csv(const std::string& text);
void emit_curves(const std::vector<CurveRow>& rows, const std::filesystem::path& path);

inline constexpr std::array<const char*, 4> kTable3Columns = {"clearly_acceptable", "acceptable", "barely_acceptable",
                                                              "unacceptable"};

struct Table3Row {
    std::string treatment;  // arm whose probability is reported
    std::string setting;    // profiles of the other original arm(s)
    std::string source;     // estimated | simulated
    std::array<double, 4> probability{};

    friend bool operator==(const Table3Row&, const Table3Row&) = default;
};

std::string table3_csv(const std::vector<Table3Row>& rows);
void emit_table3(const std::vector<Table3Row>& rows, const std::filesystem::path& path);

/// Shortest decimal that round-trips.
std::string format_double(double x);

}  // namespace platdesign
