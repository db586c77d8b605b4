#include "phonongate/cli/csv.hpp"

#include <cmath>
#include <cstdio>

#include "phonongate/errors.hpp"

namespace phonongate::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(header.size()) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
    if (header.empty()) throw ParameterError("CSV header must be non-empty");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::check_width(std::size_t n) const {
    if (n != width_) {
        throw LayoutError(path_.filename().string() + ": row has " + std::to_string(n) + " cells, header has " +
                          std::to_string(width_));
    }
}

void CsvWriter::row(std::span<const double> values) {
    check_width(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
    ++rows_;
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    check_width(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, double>) {
                    out_ << format_number(c);
                } else {
                    out_ << c;
                }
            },
            cells[i]);
    }
    out_ << '\n';
    ++rows_;
}

}  // namespace phonongate::cli
