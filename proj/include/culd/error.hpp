#pragma once

#include <stdexcept>
#include <string>

namespace culd {

enum class ErrorKind {
    InvalidParameter,
    OutOfWindow,
    Range,
    InvalidWeight,
    InconsistentPair,
    OpenCircuit,
    DegenerateSchedule,
    InvalidSpec,
};

const char* to_string(ErrorKind kind);

// Raised by the simulation core. Configuration and I/O failures have their
// own types so the CLI can map them onto distinct exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key_path, const std::string& what)
        : std::runtime_error(key_path.empty() ? what : key_path + ": " + what),
          key_path_(std::move(key_path)) {}

    [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace culd
