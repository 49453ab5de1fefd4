#pragma once

#include <stdexcept>
#include <string>

namespace msfl {

// Geometry does not admit the requested operation (patch larger than image,
// pyramid level too coarse, radius past the border, ...).
class SizingError : public std::runtime_error {
public:
  explicit SizingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inconsistent or invalid configuration (dimension mismatch, bad flag combo).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver failed to converge or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class ChecksumError : public IoError {
public:
  explicit ChecksumError(const std::string& msg) : IoError(msg) {}
};

class VersionError : public IoError {
public:
  explicit VersionError(const std::string& msg) : IoError(msg) {}
};

class TruncationError : public IoError {
public:
  explicit TruncationError(const std::string& msg) : IoError(msg) {}
};

class KindMismatchError : public IoError {
public:
  explicit KindMismatchError(const std::string& msg) : IoError(msg) {}
};

// Writes a one-line warning to stderr. Used where a contract says the
// condition is tolerated but worth flagging (ridge fallback, clipped inputs).
void log_warn(const std::string& msg);

}  // namespace msfl
