#include "platdesign/report.hpp"

#include <charconv>
#include <sstream>

#include "platdesign/artifact.hpp"
#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

const char* kCurveHeader = "n_interim,n_final,arm,scenario,source,probability";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw IoError("curves csv line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::vector<CurveRow> curve_rows(const std::vector<OperatingCharacteristics>& curve, const std::string& scenario,
                                 const std::string& source) {
    std::vector<CurveRow> rows;
    for (const auto& oc : curve) {
        for (int j = 0; j < 3; ++j) {
            rows.push_back({oc.n_interim, oc.n_final, j + 1, scenario, source, oc.power[static_cast<std::size_t>(j)]});
        }
    }
    return rows;
}

std::string curves_csv(const std::vector<CurveRow>& rows) {
    std::string out = kCurveHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.n_interim) + ',' + std::to_string(r.n_final) + ',' + std::to_string(r.arm) + ',' +
               r.scenario + ',' + r.source + ',' + format_double(r.probability) + '\n';
    }
    return out;
}

std::vector<CurveRow> parse_curves_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != split(kCurveHeader, ',')) {
        throw IoError("curves csv: unexpected header");
    }
    std::vector<CurveRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw IoError("curves csv line " + std::to_string(lineno) + ": expected 6 fields");
        rows.push_back({parse_number<long>(f[0], lineno), parse_number<long>(f[1], lineno),
                        parse_number<int>(f[2], lineno), f[3], f[4], parse_number<double>(f[5], lineno)});
    }
    return rows;
}

void emit_curves(const std::vector<CurveRow>& rows, const std::filesystem::path& path) {
    write_file(path, curves_csv(rows));
}

std::string table3_csv(const std::vector<Table3Row>& rows) {
    std::string out = "treatment,setting,source";
    for (const char* c : kTable3Columns) out += std::string(",") + c;
    out += '\n';
    for (const auto& r : rows) {
        out += r.treatment + ',' + r.setting + ',' + r.source;
        for (double p : r.probability) out += ',' + format_double(p);
        out += '\n';
    }
    return out;
}

void emit_table3(const std::vector<Table3Row>& rows, const std::filesystem::path& path) {
    write_file(path, table3_csv(rows));
}

}  // namespace platdesign
