#pragma once

#include <stdexcept>
#include <string>

namespace dsps {

// Invalid user input or configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Integration or quadrature failure. Maps to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dsps
