#include "bct/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bct/error.hpp"

namespace bct {

std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw internal_error("double formatting failed");
    return {buf, end};
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw data_error("malformed number '" + text + "'");
    return value;
}

Report::Report() { lines_.push_back("format-version 1"); }

void Report::add(const std::string& key, const std::string& value) {
    lines_.push_back(key + " " + value);
}

void Report::add(const std::string& key, double value) { add(key, format_double(value)); }

void Report::add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

void Report::add_raw(const std::string& line) { lines_.push_back(line); }

std::string Report::to_text() const {
    std::string out;
    for (const auto& line : lines_) {
        out += line;
        out += '\n';
    }
    return out;
}

void add_summary(Report& report, const EntropySummary& s, const std::string& prefix) {
    report.add(prefix + "count", static_cast<std::uint64_t>(s.count));
    report.add(prefix + "mean", s.mean);
    report.add(prefix + "sd", s.sd);
    report.add(prefix + "level", s.level);
    report.add(prefix + "ci-lo", s.ci_lo);
    report.add(prefix + "ci-hi", s.ci_hi);
    report.add(prefix + "min", s.min);
    report.add(prefix + "max", s.max);
    report.add(prefix + "bins", static_cast<std::uint64_t>(s.frequencies.size()));
    for (std::size_t b = 0; b < s.frequencies.size(); ++b) {
        report.add_raw(prefix + "bin " + format_double(s.bin_edges[b]) + " " +
                       format_double(s.bin_edges[b + 1]) + " " + format_double(s.frequencies[b]));
    }
}

std::string summary_to_csv(const EntropySummary& s) {
    std::string out = "bin_lo,bin_hi,frequency\n";
    for (std::size_t b = 0; b < s.frequencies.size(); ++b) {
        out += format_double(s.bin_edges[b]);
        out += ',';
        out += format_double(s.bin_edges[b + 1]);
        out += ',';
        out += format_double(s.frequencies[b]);
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw data_error("read failed on '" + path + "'");
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw data_error("write failed on '" + path + "'");
}

}  // namespace bct
