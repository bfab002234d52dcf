#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "sosie/ast.hpp"

namespace sosie {

// Malformed source text; carries the position and an expected-token message.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string unit_path, SourcePos pos, const std::string& message)
      : std::runtime_error(unit_path + ":" + std::to_string(pos.line) + ":" +
                           std::to_string(pos.col) + ": " + message),
        unit_path_(std::move(unit_path)),
        pos_(pos),
        message_(message) {}

  const std::string& unit_path() const { return unit_path_; }
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  std::string unit_path_;
  SourcePos pos_;
  std::string message_;
};

// Ill-typed program; carries the offending statement id when one exists.
class TypeError : public std::runtime_error {
 public:
  TypeError(std::optional<StatementId> where, const std::string& message)
      : std::runtime_error((where ? where->to_string() + ": " : std::string()) + message),
        where_(std::move(where)),
        message_(message) {}

  const std::optional<StatementId>& where() const { return where_; }
  const std::string& message() const { return message_; }

 private:
  std::optional<StatementId> where_;
  std::string message_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace sosie
