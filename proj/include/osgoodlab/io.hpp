#ifndef OSGOODLAB_IO_HPP
#define OSGOODLAB_IO_HPP

#include "osgoodlab/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace osgoodlab::io {

/// Scientific notation with 17 significant digits, '.' separator.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row() {
        rows_.emplace_back();
        return *this;
    }
    CsvTable& add(double v) { return add_raw(format_double(v)); }
    CsvTable& add(int v) { return add_raw(std::to_string(v)); }
    CsvTable& add(std::size_t v) { return add_raw(std::to_string(v)); }
    CsvTable& add(const std::string& s) { return add_raw(s); }
    CsvTable& add(const char* s) { return add_raw(s); }
    CsvTable& add(bool b) { return add_raw(b ? "true" : "false"); }

    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::ostringstream out;
        join(out, header_);
        for (const auto& r : rows_) {
            if (r.size() != header_.size()) throw StructuralError("CsvTable: row width differs from header");
            join(out, r);
        }
        return out.str();
    }

private:
    CsvTable& add_raw(std::string s) {
        if (rows_.empty()) throw StructuralError("CsvTable: add before row()");
        rows_.back().push_back(std::move(s));
        return *this;
    }
    static void join(std::ostringstream& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw NumericalError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw NumericalError("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace osgoodlab::io

#endif // OSGOODLAB_IO_HPP
