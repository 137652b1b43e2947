#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bct/entropy.hpp"

namespace bct {

/// Shortest decimal string that parses back to exactly the same double;
/// deterministic, so equal runs give byte-identical files.
std::string format_double(double value);

/// Parse a double, rejecting trailing junk.
double parse_double(const std::string& text);

/// Ordered key-value document ("key value" lines, format-version first).
class Report {
  public:
    Report();

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::uint64_t value);
    void add_raw(const std::string& line);

    std::string to_text() const;

  private:
    std::vector<std::string> lines_;
};

/// Key-value summary block plus an inline histogram table.
void add_summary(Report& report, const EntropySummary& summary, const std::string& prefix = "");

/// "bin_lo,bin_hi,frequency" CSV of the histogram.
std::string summary_to_csv(const EntropySummary& summary);

/// Whole-file helpers with data errors naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bct
