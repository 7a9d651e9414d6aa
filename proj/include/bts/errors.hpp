#pragma once

#include <stdexcept>
#include <string>

namespace bts {

/// Bad inputs: malformed tables, out-of-range indices, inconsistent dimensions.
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A request the current problem representation cannot serve
/// (e.g. exact bounds on a belief with infinite support).
struct capability_error : validation_error {
    explicit capability_error(const std::string& what) : validation_error(what) {}
};

/// Budget or node-cap exhaustion.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// An operation applied to an object in the wrong state
/// (e.g. expanding a non-leaf, backing up a leaf with no stored value).
struct state_error : std::logic_error {
    explicit state_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bts
