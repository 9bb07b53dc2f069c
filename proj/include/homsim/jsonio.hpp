#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal deterministic JSON emitter. Field order is insertion order and
// every floating-point number is printed with %.17g, so identical inputs
// produce byte-identical documents. (Parsing is done with nlohmann::json;
// this writer only controls the output side.)

namespace homsim::jsonio {

std::string format_double(double v);  // %.17g; nan/inf become "null"

class Writer {
public:
    Writer& begin_object();
    Writer& end_object();
    Writer& begin_array();
    Writer& end_array();
    Writer& key(std::string_view k);
    Writer& value(double v);
    Writer& value(int v);
    Writer& value(long long v);
    Writer& value(std::size_t v);
    Writer& value(bool v);
    Writer& value(std::string_view v);
    // without this, string literals would take the bool overload
    Writer& value(const char* v) { return value(std::string_view(v)); }
    Writer& value_null();

    const std::string& str() const { return buf_; }

private:
    void item_prefix();

    std::string buf_;
    std::vector<bool> first_in_scope_;
    bool pending_key_ = false;
};

std::string escape(std::string_view s);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace homsim::jsonio
