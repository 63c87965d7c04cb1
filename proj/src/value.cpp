#include "scb/value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>

namespace scb {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Full-string numeric parse; *ok reports whether the whole string was a
// number. std::from_chars keeps this locale-free and deterministic.
double parse_number(std::string_view raw, bool* ok) {
    std::string_view s = trim(raw);
    *ok = false;
    if (s.empty()) return 0.0;
    if (s == "Infinity" || s == "+Infinity") {
        *ok = true;
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-Infinity") {
        *ok = true;
        return -std::numeric_limits<double>::infinity();
    }
    if (s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return 0.0;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) return 0.0;
    *ok = true;
    return out;
}

}  // namespace

double to_number(const Value& v) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    if (const bool* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    bool ok = false;
    return parse_number(std::get<std::string>(v), &ok);
}

std::string format_number(double d) {
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
    if (d == 0.0) return "0";
    // Counters and tick values should read as integers, not 2e+05.
    if (d == std::floor(d) && std::abs(d) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(d));
        return buf;
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    (void)ec;
    return std::string(buf, ptr);
}

std::string to_display_string(const Value& v) {
    if (const double* d = std::get_if<double>(&v)) return format_number(*d);
    if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    return std::get<std::string>(v);
}

bool to_bool(const Value& v) {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    if (const double* d = std::get_if<double>(&v)) return *d != 0.0 && !std::isnan(*d);
    const std::string& s = std::get<std::string>(v);
    if (s.empty() || s == "0") return false;
    return ascii_lower(s) != "false";
}

bool looks_numeric(const Value& v) {
    if (std::holds_alternative<double>(v) || std::holds_alternative<bool>(v)) return true;
    bool ok = false;
    parse_number(std::get<std::string>(v), &ok);
    return ok;
}

std::string ascii_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

int compare_values(const Value& a, const Value& b) {
    if (looks_numeric(a) && looks_numeric(b)) {
        double x = to_number(a), y = to_number(b);
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    std::string x = ascii_lower(to_display_string(a));
    std::string y = ascii_lower(to_display_string(b));
    return x.compare(y);
}

std::string quote_string(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

}  // namespace scb
