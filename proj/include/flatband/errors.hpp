#pragma once

#include <stdexcept>
#include <string>

namespace flatband {

// Thrown when a lattice fails structural validation.
struct InvalidLattice : std::runtime_error {
    explicit InvalidLattice(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a bound or certificate is requested outside its validity domain
// (e.g. coupling ratio at or beyond the separation threshold).
struct ValidityError : std::domain_error {
    explicit ValidityError(const std::string& what) : std::domain_error(what) {}
};

} // namespace flatband
