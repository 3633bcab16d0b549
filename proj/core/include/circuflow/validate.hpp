#pragma once

#include <string>
#include <vector>

#include "circuflow/network.hpp"

namespace circuflow {

struct Violation {
    std::string code;     // stable identifier, e.g. "duplicate_compartment_index"
    std::string subject;  // compartment id or connection id
    std::string message;

    std::string to_string() const;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(const std::string& code) const;
    std::vector<std::string> lines() const;
};

/// Structural validation. Never throws: every violated invariant is reported.
ValidationReport validate(const Network& net);

/// Throws ValidationError listing all violations when `validate` is not clean.
void require_valid(const Network& net);

}  // namespace circuflow
