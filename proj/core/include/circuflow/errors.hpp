#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace circuflow {

/// A network failed structural validation. `details` carries one line per violation.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, std::vector<std::string> details)
        : std::runtime_error(what), details_(std::move(details)) {}

    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    std::vector<std::string> details_;
};

/// Non-finite values appeared while integrating.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or schema problems in an input document.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& what, std::vector<std::string> diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

}  // namespace circuflow
