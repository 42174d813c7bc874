#ifndef MMLAB_CSV_HPP
#define MMLAB_CSV_HPP

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmlab/errors.hpp"

namespace mmlab::csv {

/// Splits one CSV line. The file formats here are pure numeric/enum columns,
/// so no quoting or escaping is supported.
inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

/// Line-oriented reader that tracks the 1-based line number for error
/// messages. Strips a trailing '\r' so CRLF files load too.
class Reader {
  public:
    explicit Reader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw Error("cannot open " + path);
    }

    bool next_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        return true;
    }

    /// Reads and validates the header row.
    void expect_header(std::string_view header) {
        std::string line;
        if (!next_line(line) || line != header)
            throw Error(path_ + ": expected header '" + std::string(header) + "'");
    }

    const std::string& path() const { return path_; }
    int line_no() const { return line_no_; }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(path_ + ":" + std::to_string(line_no_) + ": " + why);
    }

  private:
    std::string path_;
    std::ifstream in_;
    int line_no_ = 0;
};

}  // namespace mmlab::csv

#endif  // MMLAB_CSV_HPP
