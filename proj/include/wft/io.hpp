#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "wft/analysis.hpp"
#include "wft/driver.hpp"

namespace wft::io {

/// Shortest round-trip-safe text: 17 significant digits.
std::string format_number(double x);
/// RFC-4180 field quoting.
std::string quote(const std::string& field);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    CsvWriter& operator<<(double x);
    CsvWriter& operator<<(long x);
    CsvWriter& operator<<(int x) { return *this << static_cast<long>(x); }
    CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long>(x); }
    CsvWriter& operator<<(const std::string& s);
    CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
    void end_row();

private:
    void sep();
    std::ostream& out_;
    std::size_t cols_, col_ = 0;
};

void write_profiles(std::ostream& out, const RunHistory& h, const std::vector<double>& times,
                    const std::vector<double>& xs);
void write_fronts(std::ostream& out, const RunHistory& h);
void write_functionals(std::ostream& out, const RunHistory& h);
/// One row per front segment per k; needs a report built with records.
void write_entropy(std::ostream& out, const RunHistory& h, const EntropyReport& r);
/// Per-k minima and the aggregate totals.
void write_entropy_summary(std::ostream& out, const EntropyReport& r);
void write_ladder(std::ostream& out, const std::vector<LadderRow>& rows);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string iso_timestamp();

/// Writes text to dir/name, creating dir when needed.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text);

}  // namespace wft::io
