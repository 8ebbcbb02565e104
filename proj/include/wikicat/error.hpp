#pragma once

#include <stdexcept>
#include <string>

namespace wikicat {

// Bad input data: malformed files, dangling references, unknown labels.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inconsistent configuration, e.g. a category mapped by two competing labels.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

// Violated precondition on an API call (page passed where a category is expected, ...).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline std::string where(const std::string& file, std::size_t line) {
    return file + ":" + std::to_string(line);
}

}  // namespace wikicat
