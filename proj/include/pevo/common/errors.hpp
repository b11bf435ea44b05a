#pragma once

#include <stdexcept>
#include <string>

namespace pevo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct OrderError : Error { using Error::Error; };
struct SeedInvalidError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct AliasingError : Error { using Error::Error; };
struct GuardBandError : Error { using Error::Error; };
struct InstabilityError : Error { using Error::Error; };
struct WrapError : Error { using Error::Error; };
struct MisuseError : Error { using Error::Error; };
struct ResourceError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace pevo
