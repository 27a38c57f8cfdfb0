#pragma once

#include <stdexcept>
#include <string>

namespace wgm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside the domain where a formula or conversion is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

// Vanishing denominator or singular matrix.
class SingularityError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& what)
        : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

// Requested problem size exceeds the configured dense-storage cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// A solver failed while evaluating a sweep; the message carries the grid point.
class SolverError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace wgm
