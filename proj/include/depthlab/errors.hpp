#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depthlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point, map or matrix was used with a space of the wrong kind.
struct SpaceMismatch : Error {
  using Error::Error;
};

// A free-group word would grow past the configured max_word_len.
struct WordOverflow : Error {
  using Error::Error;
};

struct CapExceeded : Error {
  CapExceeded(std::size_t partial_count, int depth)
      : Error("representative cap exceeded at depth " + std::to_string(depth) + " after " +
              std::to_string(partial_count) + " representatives"),
        partial(partial_count),
        depth(depth) {}
  std::size_t partial;
  int depth;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace depthlab
