#pragma once

#include <stdexcept>

namespace skt {

/// Invalid configuration: bad profile, scenario, or experiment config.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that fails parsing or validation.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace skt
