#include "poolmax/io.hpp"

#include "poolmax/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace poolmax::io {

namespace {

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line_no, std::size_t col) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw CellError(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                            ": cannot parse '" + std::string(field) + "' as a number",
                        line_no, col);
    }
    return value;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

RawPanel parse_raw_csv(std::istream& in) {
    RawPanel panel;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (!have_header) {
            for (auto f : fields) panel.names.emplace_back(f);
            have_header = true;
            continue;
        }
        if (fields.size() != panel.names.size()) {
            throw CellError(ErrorKind::RaggedRows,
                            "line " + std::to_string(line_no) + ": expected " + std::to_string(panel.names.size()) +
                                " fields, found " + std::to_string(fields.size()),
                            line_no, fields.size());
        }
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) row[c] = parse_number(fields[c], line_no, c);
        rows.push_back(std::move(row));
    }
    if (!have_header) fail(ErrorKind::TooSmall, "CSV input is empty");
    panel.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(panel.names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
    }
    return panel;
}

RawPanel read_raw_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_raw_csv(in);
}

NamedPanel parse_panel_csv(std::istream& in) {
    RawPanel raw = parse_raw_csv(in);
    return NamedPanel{std::move(raw.names), DataMatrix(std::move(raw.values))};
}

NamedPanel read_panel_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& values) {
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_number(values(i, c));
        out << '\n';
    }
}

}  // namespace poolmax::io
