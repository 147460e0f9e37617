#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace scenoforge {

enum class DiagCode {
  UnknownNode,
  UnknownEdge,
  UnknownLane,
  DuplicateId,
  BadAttribute,
  UnknownAttribute,
  FormatError,
  Unreachable,
  TooShort,
  CountMismatch,
};

std::string_view diag_code_name(DiagCode code);

// One machine-readable problem. The message always contains the subject
// verbatim and is written so it can be pasted into a regeneration prompt
// unchanged.
struct Diagnostic {
  DiagCode code = DiagCode::FormatError;
  std::string subject;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

Diagnostic make_diag(DiagCode code, std::string subject, std::string message);

using Diagnostics = std::vector<Diagnostic>;

std::string to_string(const Diagnostic& diag);

// Result-or-diagnostics. Parsers and the compiler report failures as values,
// not exceptions; exceptions are reserved for environmental errors (I/O,
// network, exhausted transcripts).
template <typename T>
class Fallible {
 public:
  Fallible(T value) : state_(std::move(value)) {}
  Fallible(Diagnostic diag) : state_(Diagnostics{std::move(diag)}) {}
  Fallible(Diagnostics diags) : state_(std::move(diags)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  T& value() { return std::get<T>(state_); }
  const T& value() const { return std::get<T>(state_); }

  const Diagnostics& diagnostics() const { return std::get<Diagnostics>(state_); }

 private:
  std::variant<T, Diagnostics> state_;
};

}  // namespace scenoforge
