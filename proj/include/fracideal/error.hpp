#pragma once

#include <stdexcept>
#include <string>

namespace fracideal {

  enum class ErrorKind {
    invalid_input,
    malformed_tower,
    tower_mismatch,
    undetermined,
    not_invertible,
    not_regular,
    bound_exceeded,
    invariant_failure,
  };

  inline char const* to_string(ErrorKind k) noexcept {
    switch (k) {
      case ErrorKind::invalid_input: return "invalid input";
      case ErrorKind::malformed_tower: return "malformed tower";
      case ErrorKind::tower_mismatch: return "tower mismatch";
      case ErrorKind::undetermined: return "undetermined";
      case ErrorKind::not_invertible: return "not invertible";
      case ErrorKind::not_regular: return "not regular";
      case ErrorKind::bound_exceeded: return "bound exceeded";
      case ErrorKind::invariant_failure: return "invariant failure";
    }
    return "error";
  }

  //! The single exception type thrown by the library. The message names the
  //! violated invariant and, where there is one, the offending node or path.
  class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          _kind(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return _kind; }

   private:
    ErrorKind _kind;
  };

}  // namespace fracideal
