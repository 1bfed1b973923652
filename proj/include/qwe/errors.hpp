#pragma once

#include <stdexcept>
#include <string>

namespace qwe {

// Bad user input: malformed JSON, inconsistent generators, unknown scheme,
// references to missing legs, vanishing contractions, ...  CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds a configured cap (group enumeration size,
// memory estimate, transform size).  CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// An internal cross-check failed: two independent routes to the same value
// disagree.  Indicates a bug or corrupted state, never bad input.
// CLI exit code 4.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qwe
