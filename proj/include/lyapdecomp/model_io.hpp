#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lyapdecomp/automaton.hpp"

namespace lyapdecomp {

class ModelError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kSemantic };

  ModelError(Kind kind, std::string message, std::size_t line = 0, std::size_t column = 0,
             std::vector<std::string> violations = {});

  Kind kind() const { return kind_; }
  /// 1-based; 0 when the error has no source position.
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  /// validate_automaton output when the model parsed but is ill-formed.
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> violations_;
};

/// Throws ModelError. Missing `converging_vars` defaults to all variables.
HybridAutomaton parse_model(std::string_view text);

/// Writes the canonical form; `converging_vars` is omitted when it lists
/// every variable.
std::string serialize_model(const HybridAutomaton& a);

HybridAutomaton load_model_file(const std::string& path);
void save_model_file(const HybridAutomaton& a, const std::string& path);

}  // namespace lyapdecomp
