#pragma once

#include <stdexcept>
#include <string>

namespace workreal {

/// Raised for out-of-domain arguments and mismatched dimensions.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a truncated Fock-space computation loses more probability
/// mass (or unitarity) than the declared budget allows.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double leaked_mass, double beta = 0.0, double r = 0.0)
        : std::runtime_error(what), leaked_mass_(leaked_mass), beta_(beta), r_(r) {}

    double leaked_mass() const noexcept { return leaked_mass_; }
    double beta() const noexcept { return beta_; }
    double r() const noexcept { return r_; }

private:
    double leaked_mass_;
    double beta_;
    double r_;
};

}  // namespace workreal
