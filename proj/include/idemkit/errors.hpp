#pragma once

#include <stdexcept>
#include <string>

namespace idemkit::errors {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NotIdempotent : Error { using Error::Error; };
struct BadDims : Error { using Error::Error; };
struct SingularPencil : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct BadParam : Error { using Error::Error; };
struct IsProjection : Error { using Error::Error; };

} // namespace idemkit::errors
