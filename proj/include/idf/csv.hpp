#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "idf/errors.hpp"

namespace idf::csv {

// Fixed dialect: comma separator, '.' decimal point, one header row, LF line
// endings, doubles at 6 decimals. Byte-stable for the determinism contract.
class Writer {
  public:
    Writer(const std::string& path, const std::vector<std::string>& header) : f_(path, std::ios::binary) {
        if (!f_) throw IoError("csv: cannot open " + path);
        for (size_t i = 0; i < header.size(); ++i) f_ << (i ? "," : "") << header[i];
        f_ << "\n";
    }

    Writer& field(const std::string& s) {
        sep();
        f_ << s;
        return *this;
    }
    Writer& field(const char* s) { return field(std::string(s)); }
    Writer& field(long v) {
        sep();
        f_ << v;
        return *this;
    }
    Writer& field(int v) { return field(static_cast<long>(v)); }
    Writer& field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        sep();
        f_ << buf;
        return *this;
    }

    void end_row() {
        f_ << "\n";
        first_ = true;
    }

    ~Writer() { f_.flush(); }

  private:
    void sep() {
        if (!first_) f_ << ",";
        first_ = false;
    }
    std::ofstream f_;
    bool first_ = true;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Simple reader for the same dialect (no quoting). Throws IoError naming the
// line number on malformed rows.
inline Table read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("csv: cannot open " + path);
    Table t;
    std::string line;
    int lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        size_t start = 0;
        for (;;) {
            size_t pos = s.find(',', start);
            if (pos == std::string::npos) {
                out.push_back(s.substr(start));
                break;
            }
            out.push_back(s.substr(start, pos - start));
            start = pos + 1;
        }
        return out;
    };
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line);
        if (lineno == 1) {
            t.header = fields;
            continue;
        }
        if (fields.size() != t.header.size())
            throw IoError("csv: " + path + " line " + std::to_string(lineno) +
                          ": expected " + std::to_string(t.header.size()) + " fields, got " +
                          std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw IoError("csv: " + path + " is empty");
    return t;
}

}  // namespace idf::csv
