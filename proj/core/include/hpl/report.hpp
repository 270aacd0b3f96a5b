#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hpl::report {

// Minimal pretty-printing JSON emitter. Doubles are written with 17
// significant digits so a report round-trips bit-exactly; non-finite values
// become null. Numeric arrays are kept on one line.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view name);
    JsonWriter& value(double v);
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view v);
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& null();
    JsonWriter& numbers(std::span<const double> values);

    const std::string& str() const noexcept { return out_; }

private:
    void before_value();
    void newline();

    struct Level {
        bool object;
        std::size_t count;
    };
    std::string out_;
    std::vector<Level> stack_;
    bool after_key_ = false;
};

std::string format_double(double v);
std::string escape_json(std::string_view s);

}  // namespace hpl::report
