#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fraclab::report {

/// Deterministic float formatting: 17 significant digits, locale-free.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Minimal JSON value with insertion-ordered objects and fixed number
/// formatting, so identical runs serialize byte-identically.
class Json {
public:
    using Array = std::vector<Json>;
    using Object = std::vector<std::pair<std::string, Json>>;

    Json() : value_(nullptr) {}
    Json(std::nullptr_t) : value_(nullptr) {}
    Json(bool b) : value_(b) {}
    Json(double d) : value_(d) {}
    Json(int i) : value_(static_cast<std::int64_t>(i)) {}
    Json(std::int64_t i) : value_(i) {}
    Json(std::uint64_t i) : value_(static_cast<std::int64_t>(i)) {}
    Json(const char* s) : value_(std::string(s)) {}
    Json(std::string s) : value_(std::move(s)) {}
    Json(Array a) : value_(std::move(a)) {}
    Json(Object o) : value_(std::move(o)) {}

    static Json object() { return Json(Object{}); }
    static Json array() { return Json(Array{}); }

    Json& set(const std::string& key, Json v) {
        auto& obj = std::get<Object>(value_);
        obj.emplace_back(key, std::move(v));
        return *this;
    }
    Json& push(Json v) {
        std::get<Array>(value_).push_back(std::move(v));
        return *this;
    }

    std::string dump(int indent = 0, int depth = 0) const {
        std::string out;
        write(out, indent, depth);
        return out;
    }

private:
    static void escape(std::string& out, const std::string& s) {
        out += '"';
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
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        out += '"';
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad = indent > 0 ? std::string(indent * (depth + 1), ' ') : "";
        const std::string padc = indent > 0 ? std::string(indent * depth, ' ') : "";
        const char* nl = indent > 0 ? "\n" : "";
        if (std::holds_alternative<std::nullptr_t>(value_)) {
            out += "null";
        } else if (std::holds_alternative<bool>(value_)) {
            out += std::get<bool>(value_) ? "true" : "false";
        } else if (std::holds_alternative<double>(value_)) {
            out += format_double(std::get<double>(value_));
        } else if (std::holds_alternative<std::int64_t>(value_)) {
            out += std::to_string(std::get<std::int64_t>(value_));
        } else if (std::holds_alternative<std::string>(value_)) {
            escape(out, std::get<std::string>(value_));
        } else if (std::holds_alternative<Array>(value_)) {
            const auto& arr = std::get<Array>(value_);
            if (arr.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            out += nl;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                out += pad;
                arr[i].write(out, indent, depth + 1);
                if (i + 1 < arr.size()) out += ',';
                out += nl;
            }
            out += padc;
            out += ']';
        } else {
            const auto& obj = std::get<Object>(value_);
            if (obj.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            out += nl;
            for (std::size_t i = 0; i < obj.size(); ++i) {
                out += pad;
                escape(out, obj[i].first);
                out += indent > 0 ? ": " : ":";
                obj[i].second.write(out, indent, depth + 1);
                if (i + 1 < obj.size()) out += ',';
                out += nl;
            }
            out += padc;
            out += '}';
        }
    }

    std::variant<std::nullptr_t, bool, double, std::int64_t, std::string, Array, Object> value_;
};

/// CSV assembly with the same float formatting.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    Csv& add_row(const std::vector<std::string>& cells) {
        rows_.push_back(cells);
        return *this;
    }

    std::string dump() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            out += header_[i];
            out += (i + 1 < header_.size()) ? "," : "";
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out += row[i];
                out += (i + 1 < row.size()) ? "," : "";
            }
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace fraclab::report
