#pragma once

#include "poolmax/matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace poolmax::io {

/// A panel read from CSV: one named column per asset/dimension.
struct NamedPanel {
    std::vector<std::string> names;
    DataMatrix data;
};

/// Shortest decimal text that round-trips to the same double.
[[nodiscard]] std::string format_number(double value);

/// Parses a CSV with a header row of column identifiers and a numeric body.
/// Blank lines are skipped. Errors: ParseError (with line number),
/// RaggedRows (with line number), and the DataMatrix errors (TooSmall when
/// fewer than two data rows, NonFinite).
[[nodiscard]] NamedPanel parse_panel_csv(std::istream& in);
[[nodiscard]] NamedPanel read_panel_csv(const std::filesystem::path& path);

/// Same schema as the reader; numbers in format_number form.
void write_panel_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& values);

/// Raw numeric body, no DataMatrix validation (forecast panels may contain
/// +inf, and single-row series files are legal).
struct RawPanel {
    std::vector<std::string> names;
    Matrix values;
};
[[nodiscard]] RawPanel parse_raw_csv(std::istream& in);
[[nodiscard]] RawPanel read_raw_csv(const std::filesystem::path& path);

}  // namespace poolmax::io
