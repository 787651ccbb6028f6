#pragma once

#include <stdexcept>
#include <string>

namespace ade {

// Single exception type for all operational errors (bad data, bad config,
// id mismatches). Messages carry file/line context where available.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

}  // namespace ade
