#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rearrange {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed document or reply. `raw` keeps the offending text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw = {})
        : Error(what), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

// A scene/experience invariant was violated. `ids` names the offending objects.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> ids = {})
        : Error(what), ids_(std::move(ids)) {}
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

// Chat/embedding backend failure (transport, status, timeout).
class BackendError : public Error {
public:
    BackendError(const std::string& what, int status = 0)
        : Error(what), status_(status) {}
    // HTTP status when the server answered, 0 for transport failures.
    int status() const noexcept { return status_; }

private:
    int status_;
};

// Filesystem persistence failure in the experience store.
class StorageError : public Error {
public:
    using Error::Error;
};

}  // namespace rearrange
