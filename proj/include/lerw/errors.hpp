#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lerw {

/// A path never left the region it was expected to exit.
struct NotReached : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No index satisfied a search predicate.
struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear solve missed its residual tolerance.
struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An exact computation was asked to exceed the configured site cap.
struct CapExceeded : std::runtime_error {
  CapExceeded(std::size_t requested, std::size_t cap)
      : std::runtime_error("domain of " + std::to_string(requested) + " sites exceeds cap of " + std::to_string(cap) +
                           " sites"),
        requested_sites(requested),
        cap_sites(cap) {}
  std::size_t requested_sites;
  std::size_t cap_sites;
};

}  // namespace lerw
