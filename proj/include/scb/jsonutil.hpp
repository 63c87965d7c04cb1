#pragma once

#include <cmath>

#include <json.hpp>

namespace scb {

// Integral doubles render as JSON integers so canonical output never says
// "3.0" where the store said 3.
inline nlohmann::json json_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
        return nlohmann::json(static_cast<long long>(v));
    return nlohmann::json(v);
}

}  // namespace scb
