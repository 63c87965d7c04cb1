#pragma once

#include <string>
#include <variant>

namespace scb {

// Runtime value of a reporter block or literal. Coercions follow the loose
// Scratch style: everything converts to everything, nothing throws.
using Value = std::variant<double, std::string, bool>;

// Numeric coercion. Numeric-looking strings parse (decimal or scientific,
// optional sign, "Infinity"/"-Infinity"); anything else is 0. Booleans are
// 1/0.
double to_number(const Value& v);

// Display rendering, shared by say/think, join, and the VAR monitor dump.
// Integral doubles render without a decimal point; other finite doubles use
// the shortest round-trip decimal form.
std::string to_display_string(const Value& v);
std::string format_number(double d);

// Truthiness: "" / "0" / "false" (any case) are false, other strings true;
// 0 and NaN are false.
bool to_bool(const Value& v);

// Comparison used by eq/gt/lt: numeric when both sides look numeric,
// otherwise case-insensitive string comparison. Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b);

// True when the value would take the numeric path in compare_values.
bool looks_numeric(const Value& v);

std::string ascii_lower(std::string s);

// Double-quoted, backslash-escaped rendering for transcript payloads.
std::string quote_string(const std::string& s);

}  // namespace scb
