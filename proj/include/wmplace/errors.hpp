#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wmp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bookshelf / sidecar ingestion.
class ParseError : public Error {
 public:
  ParseError(const std::string &file, int line, const std::string &msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg),
        file_(file),
        line_(line) {}
  const std::string &file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

class MissingFile : public Error {
 public:
  explicit MissingFile(const std::string &path)
      : Error("missing file: " + path), path_(path) {}
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string &file, int line, const std::string &token)
      : ParseError(file, line, "syntax error near '" + token + "'"),
        token_(token) {}
  const std::string &token() const { return token_; }

 private:
  std::string token_;
};

class DanglingPinReference : public ParseError {
 public:
  using ParseError::ParseError;
};

class OverlappingRows : public ParseError {
 public:
  using ParseError::ParseError;
};

class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class InvalidDesign : public Error {
 public:
  using Error::Error;
};

class RegionInfeasible : public Error {
 public:
  using Error::Error;
};

class LegalizationOverflow : public Error {
 public:
  using Error::Error;
};

class NoValidWindow : public Error {
 public:
  using Error::Error;
};

class InsufficientCandidates : public Error {
 public:
  InsufficientCandidates(std::string axis, std::size_t needed,
                         std::size_t available)
      : Error("insufficient candidates along " + axis + ": needed " +
              std::to_string(needed) + ", available " +
              std::to_string(available)),
        axis_(std::move(axis)),
        needed_(needed),
        available_(available) {}
  const std::string &axis() const { return axis_; }
  std::size_t needed() const { return needed_; }
  std::size_t available() const { return available_; }

 private:
  std::string axis_;
  std::size_t needed_;
  std::size_t available_;
};

class NoTimingMargin : public Error {
 public:
  using Error::Error;
};

class CombinationalCycle : public Error {
 public:
  explicit CombinationalCycle(std::vector<int> cycle)
      : Error("combinational cycle through " + std::to_string(cycle.size()) +
              " cells"),
        cycle_(std::move(cycle)) {}
  const std::vector<int> &cycle() const { return cycle_; }

 private:
  std::vector<int> cycle_;
};

class InvalidBaseline : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptDocument : public Error {
 public:
  using Error::Error;
};

}  // namespace wmp
