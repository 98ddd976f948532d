#pragma once

#include <stdexcept>
#include <string>

namespace spinecho {

// Parse failures carry the source location that triggered them so callers can
// report "file:line:col: message" and map the condition to a dedicated exit code.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string file, int line, int col, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        file_(std::move(file)), line_(line), col_(col) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int col() const { return col_; }

private:
  std::string file_;
  int line_ = 0;
  int col_ = 0;
};

// Violated semantic preconditions: bad flag values, inconsistent experiment
// plans, mismatched spectrum grids. Distinct from ParseError so the CLI can
// map the two to different exit codes.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem and serialization failures.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinecho
