#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zw {

// Base of every error the engine throws. Callers that only care about
// "something went wrong in the engine" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A value outside the domain of an operation (bad symbol index, point out
// of range, empty text where one is required).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An API used out of order, e.g. rolling back a token that is not on top.
class UsageError : public Error {
 public:
  using Error::Error;
};

class InvalidAlphabetError : public Error {
 public:
  using Error::Error;
};

class CorpusDecodeError : public Error {
 public:
  CorpusDecodeError(std::size_t offset, const std::string& what)
      : Error("invalid UTF-8 at byte offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class QuantizationError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

// Refused expansion of a zoom node narrower than the alphabet.
class ExpansionError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace zw
