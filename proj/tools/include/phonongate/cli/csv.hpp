#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace phonongate::cli {

/// 17 significant digits, "nan"/"inf" spelled out.
std::string format_number(double v);

using Cell = std::variant<double, long long, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(std::span<const double> values);
    void row(const std::vector<Cell>& cells);

    const std::filesystem::path& path() const noexcept { return path_; }
    std::size_t rows() const noexcept { return rows_; }

private:
    void check_width(std::size_t n) const;

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
    std::size_t rows_ = 0;
};

}  // namespace phonongate::cli
