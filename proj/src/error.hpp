#pragma once

#include <stdexcept>
#include <string>

namespace fractile {

// Mirrors fractile_status in the public C header.
enum class Errc : int {
  ok = 0,
  invalid_argument = 1,
  unsupported = 2,
  overflow = 3,
  no_convergence = 4,
  contract = 5,
  capacity = 6,
  io = 7,
  internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace fractile
