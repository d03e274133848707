// errors.hpp — exception types shared across the library
#pragma once

#include <stdexcept>
#include <string>

namespace fermichain {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// spectral densities / measures
struct EmptySupportError : Error {
    using Error::Error;
};
struct NegativeDensityError : Error {
    using Error::Error;
};
struct EmptyMassError : Error {
    using Error::Error;
};
struct UnsupportedError : Error {
    using Error::Error;
};
struct NonzeroChemicalPotentialError : Error {
    using Error::Error;
};

// recurrence-coefficient breakdown; carries the first failing index
struct BreakdownError : Error {
    std::size_t index;
    explicit BreakdownError(std::size_t k)
        : Error("recurrence breakdown at coefficient index " + std::to_string(k)), index(k) {}
};

// Hamiltonian construction
struct NonAdjacentTermError : Error {
    using Error::Error;
};

// tensor trains
struct SiteMismatchError : Error {
    using Error::Error;
};
struct PolicyExhaustedError : Error {
    using Error::Error;
};

// experiment configs
struct ConfigInvalidError : Error {
    using Error::Error;
};

} // namespace fermichain
