#pragma once

#include <stdexcept>
#include <string>

namespace thermocorr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSquareError : Error {
    using Error::Error;
};
struct NotHermitianError : Error {
    using Error::Error;
};
struct EmptyListError : Error {
    using Error::Error;
};
struct BadIndexError : Error {
    using Error::Error;
};
struct DimensionMismatchError : Error {
    using Error::Error;
};
struct SingleFactorError : Error {
    using Error::Error;
};
struct BudgetExceedsMaxError : Error {
    using Error::Error;
};
struct InvalidXStateError : Error {
    using Error::Error;
};
struct BadExcitationError : Error {
    using Error::Error;
};
struct FillTooLargeError : Error {
    using Error::Error;
};
struct NotEqualSpacingError : Error {
    using Error::Error;
};
struct NegativeAlphaError : Error {
    using Error::Error;
};
struct BadProtocolError : Error {
    using Error::Error;
};
struct AboveThresholdError : Error {
    using Error::Error;
};

// Precondition violations that have no dedicated category above.
struct PreconditionError : Error {
    using Error::Error;
};

} // namespace thermocorr
