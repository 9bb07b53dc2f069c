#include "homsim/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace homsim::jsonio {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void Writer::item_prefix() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_in_scope_.empty()) {
        if (!first_in_scope_.back()) buf_ += ',';
        first_in_scope_.back() = false;
    }
}

Writer& Writer::begin_object() {
    item_prefix();
    buf_ += '{';
    first_in_scope_.push_back(true);
    return *this;
}

Writer& Writer::end_object() {
    buf_ += '}';
    first_in_scope_.pop_back();
    return *this;
}

Writer& Writer::begin_array() {
    item_prefix();
    buf_ += '[';
    first_in_scope_.push_back(true);
    return *this;
}

Writer& Writer::end_array() {
    buf_ += ']';
    first_in_scope_.pop_back();
    return *this;
}

Writer& Writer::key(std::string_view k) {
    item_prefix();
    buf_ += '"';
    buf_ += escape(k);
    buf_ += "\":";
    pending_key_ = true;
    return *this;
}

Writer& Writer::value(double v) {
    item_prefix();
    buf_ += format_double(v);
    return *this;
}

Writer& Writer::value(int v) {
    item_prefix();
    buf_ += std::to_string(v);
    return *this;
}

Writer& Writer::value(long long v) {
    item_prefix();
    buf_ += std::to_string(v);
    return *this;
}

Writer& Writer::value(std::size_t v) {
    item_prefix();
    buf_ += std::to_string(v);
    return *this;
}

Writer& Writer::value(bool v) {
    item_prefix();
    buf_ += v ? "true" : "false";
    return *this;
}

Writer& Writer::value(std::string_view v) {
    item_prefix();
    buf_ += '"';
    buf_ += escape(v);
    buf_ += '"';
    return *this;
}

Writer& Writer::value_null() {
    item_prefix();
    buf_ += "null";
    return *this;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace homsim::jsonio
