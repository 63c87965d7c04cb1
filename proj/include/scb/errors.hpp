#pragma once

#include <stdexcept>
#include <string>

namespace scb {

// Base for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid seed/config input; names the offending field.
struct ConfigError : Error {
    using Error::Error;
};

// Unknown username or project id.
struct NotFoundError : Error {
    using Error::Error;
};

// Rejected write (e.g. non-finite cloud value).
struct ValidationError : Error {
    using Error::Error;
};

// Network or service failure; message names the endpoint.
struct TransportError : Error {
    using Error::Error;
};

// Contract misuse of a library object (e.g. flush during an active run).
struct ApiMisuseError : Error {
    using Error::Error;
};

}  // namespace scb
