// Minimal deterministic JSON writer for qcprog output: fixed key order,
// floats at 17 significant digits (round-trip exact for 64-bit doubles).
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qcp/vec.hpp"

namespace qcprog {

inline std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class JsonWriter {
  public:
    JsonWriter& begin_object() {
        sep();
        out_ += '{';
        return *this;
    }
    JsonWriter& end_object() {
        out_ += '}';
        return *this;
    }
    JsonWriter& begin_array() {
        sep();
        out_ += '[';
        return *this;
    }
    JsonWriter& end_array() {
        out_ += ']';
        return *this;
    }
    JsonWriter& key(const std::string& k) {
        sep();
        out_ += '"' + escape(k) + "\":";
        after_key_ = true;
        return *this;
    }
    JsonWriter& value(double v) {
        sep();
        out_ += format_double(v);
        return *this;
    }
    JsonWriter& value(std::int64_t v) {
        sep();
        out_ += std::to_string(v);
        return *this;
    }
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(bool v) {
        sep();
        out_ += v ? "true" : "false";
        return *this;
    }
    JsonWriter& value(const std::string& v) {
        sep();
        out_ += '"' + escape(v) + '"';
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& null() {
        sep();
        out_ += "null";
        return *this;
    }
    JsonWriter& value(const qcp::Vec& v) {
        begin_array();
        for (double x : v) value(x);
        return end_array();
    }
    JsonWriter& value(const std::vector<int>& v) {
        begin_array();
        for (int x : v) value(x);
        return end_array();
    }

    const std::string& str() const { return out_; }

  private:
    void sep() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (out_.empty() || out_.back() == '{' || out_.back() == '[') return;
        out_ += ',';
    }
    static std::string escape(const std::string& s) {
        std::string r;
        for (char c : s) {
            switch (c) {
                case '"': r += "\\\""; break;
                case '\\': r += "\\\\"; break;
                case '\n': r += "\\n"; break;
                case '\t': r += "\\t"; break;
                case '\r': r += "\\r"; break;
                default: r += c;
            }
        }
        return r;
    }

    std::string out_;
    bool after_key_ = false;
};

}  // namespace qcprog
