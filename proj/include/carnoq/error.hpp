#pragma once

#include <stdexcept>
#include <string>

namespace carnoq {

// Structured error codes. The CLI maps categories to exit codes:
// usage/schema -> 1, domain -> 2, numerical -> 3.
enum class Errc {
  // usage / schema
  invalid_argument,
  schema,
  io,
  // domain
  not_square,
  not_skew,
  zero_matrix,
  not_invertible,
  not_orthogonal,
  not_completely_nontrivial,
  dependent_structure_matrices,
  too_many_verticals,
  mismatched_horizontal_spaces,
  dependent_verticals,
  affine_curve,
  zero_structure_matrix,
  not_contact,
  basepoint_mismatch,
  not_horizontal,
  // numerical
  eigensolver_failure,
  step_size_underflow,
  fit_failed,
};

enum class ErrorCategory { usage, domain, numerical };

ErrorCategory category(Errc code) noexcept;
const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory error_category() const noexcept { return category(code_); }

 private:
  Errc code_;
};

// 1 usage/schema, 2 domain, 3 numerical.
int exit_code(const Error& e) noexcept;

}  // namespace carnoq
