#pragma once

#include <stdexcept>
#include <string>

namespace selfint {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a type invariant (non-stochastic row, negative mass, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// The operation needs a unique recurrent class (or full irreducibility).
class DecomposableError : public Error {
 public:
  using Error::Error;
};

// A dense solve or eigen-decomposition failed on degenerate input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        detail_(what),
        line_(line) {}
  // "file:line: what", for errors raised while reading a named file.
  ParseError(const std::string& what, int line, const std::string& file)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        detail_(what),
        file_(file),
        line_(line) {}
  int line() const { return line_; }
  const std::string& file() const { return file_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::string file_;
  int line_;
};

// Kernel construction failed inside a simulation; carries the step index.
class KernelError : public Error {
 public:
  KernelError(const std::string& what, long step)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace selfint
