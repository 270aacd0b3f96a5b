#include "hpl/report.hpp"

#include <cmath>
#include <cstdio>

#include "hpl/errors.hpp"

namespace hpl::report {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string escape_json(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (const char c : s) {
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
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
    return out;
}

void JsonWriter::newline() {
    out_.push_back('\n');
    out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::before_value() {
    if (after_key_) {
        after_key_ = false;
        return;
    }
    if (stack_.empty()) return;
    if (stack_.back().object) throw Error("JSON object member written without a key");
    if (stack_.back().count++ > 0) out_.push_back(',');
    newline();
}

JsonWriter& JsonWriter::begin_object() {
    before_value();
    out_.push_back('{');
    stack_.push_back({true, 0});
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    const bool had_members = stack_.back().count > 0;
    stack_.pop_back();
    if (had_members) newline();
    out_.push_back('}');
    if (stack_.empty()) out_.push_back('\n');
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    before_value();
    out_.push_back('[');
    stack_.push_back({false, 0});
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    const bool had_items = stack_.back().count > 0;
    stack_.pop_back();
    if (had_items) newline();
    out_.push_back(']');
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
    if (stack_.empty() || !stack_.back().object) throw Error("JSON key outside an object");
    if (stack_.back().count++ > 0) out_.push_back(',');
    newline();
    out_ += escape_json(name);
    out_ += ": ";
    after_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    before_value();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    before_value();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
    before_value();
    out_ += escape_json(v);
    return *this;
}

JsonWriter& JsonWriter::null() {
    before_value();
    out_ += "null";
    return *this;
}

JsonWriter& JsonWriter::numbers(std::span<const double> values) {
    before_value();
    out_.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ += ", ";
        out_ += format_double(values[i]);
    }
    out_.push_back(']');
    return *this;
}

}  // namespace hpl::report
