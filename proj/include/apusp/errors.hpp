#pragma once

#include <stdexcept>
#include <string>

namespace apusp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSpec : Error {
    using Error::Error;
};
struct MissingTableEntry : Error {
    using Error::Error;
};
struct NonPositiveNorm : Error {
    using Error::Error;
};
struct NonPositiveWeight : Error {
    using Error::Error;
};
struct Overflow : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct BracketFailure : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct MenuMismatch : Error {
    using Error::Error;
};
struct EmptySample : Error {
    using Error::Error;
};
struct MissingMenu : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

}  // namespace apusp
