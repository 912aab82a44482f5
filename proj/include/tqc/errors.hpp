#pragma once

#include <stdexcept>
#include <string>

namespace tqc {

// Input is not a valid (or not an X-structured) density matrix.
class InvalidState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad sweep configuration: unknown key, preset or out-of-range value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace tqc
