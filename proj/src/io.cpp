#include "ase/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace ase {

void append_number(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("append_number: formatting failed");
    }
    out.append(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                                 ec.message());
    }
}

std::string CsvTable::render() const {
    if (header.size() != columns.size()) {
        throw std::invalid_argument("CsvTable: header and column counts differ");
    }
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != rows) {
            throw std::invalid_argument("CsvTable: ragged columns");
        }
    }
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j > 0) {
            out.push_back(',');
        }
        out += header[j];
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j > 0) {
                out.push_back(',');
            }
            append_number(out, columns[j][i]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace ase
