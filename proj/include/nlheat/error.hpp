#pragma once

#include <stdexcept>
#include <string>

namespace nlheat {

enum class Errc {
  InvalidArgument,
  NonpositiveLength,
  ShapeMismatch,
  NonFinite,
  OutOfDomain,
  ProjectionStall,
  UnresolvedInterface,
  SeedConstruction,
  Parse,
  Validation,
  Io,
};

const char* errc_name(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C boundary can map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace nlheat
