#pragma once

// Deterministic CSV formatting and crash-safe file writes.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace wgqed {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 12 significant digits in scientific notation; "nan"/"inf"/"-inf" for
// non-finite values and no negative zero, so equal data gives equal bytes.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    std::string s(buf);
    if (s.rfind("-0.00000000000e+00", 0) == 0) s.erase(0, 1);
    return s;
}

class CsvTable {
public:
    explicit CsvTable(const std::vector<std::string>& header) : columns_(header.size()) { append(header); }

    void add(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("csv row has wrong column count");
        append(cells);
    }

    const std::string& str() const noexcept { return text_; }
    std::size_t rows() const noexcept { return rows_ - 1; }

private:
    void append(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) text_ += ',';
            text_ += cells[k];
        }
        text_ += '\n';
        ++rows_;
    }

    std::size_t columns_;
    std::string text_;
    std::size_t rows_ = 0;
};

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("output directory does not exist: " + dir.string());
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place: " + path.string());
    }
}

}  // namespace wgqed
