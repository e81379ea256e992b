#pragma once

#include <stdexcept>
#include <string>

namespace lkc {

/// Base type for all library errors so callers can catch everything at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// n is not a sum of two integer squares; the torus eigenspace is empty.
struct NotRepresentable : Error {
    explicit NotRepresentable(long long n)
        : Error("n = " + std::to_string(n) + " is not a sum of two squares") {}
};

/// Polynomial or expansion order above the supported guard.
struct OrderTooLarge : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain of the function.
struct DomainError : Error {
    using Error::Error;
};

/// Odd index passed where the expansion only has even-order terms.
struct OddIndex : Error {
    using Error::Error;
};

/// |mu4| = 1 makes one of the standardized second-derivative fields
/// degenerate (kappa4 or kappa5 vanishes), so the pointwise Euler
/// characteristic expansion is undefined.
struct EpcDegenerate : Error {
    using Error::Error;
};

/// Grid too coarse for exact quadrature of the quartic field products.
struct ResolutionTooLow : Error {
    using Error::Error;
};

/// Chaos order outside what the projector implements.
struct OrderNotSupported : Error {
    using Error::Error;
};

/// Bad or unknown key, missing value, or inconsistent experiment config.
struct InvalidConfig : Error {
    using Error::Error;
};

/// Filesystem problem while reading or writing experiment artifacts.
struct IoFailure : Error {
    using Error::Error;
};

/// A records row that cannot be parsed back into a replicate record.
struct MalformedRecord : Error {
    using Error::Error;
};

} // namespace lkc
