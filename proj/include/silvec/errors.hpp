#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace silvec {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ImageError : public Error {
public:
  using Error::Error;
};

class EmptySilhouetteError : public Error {
public:
  EmptySilhouetteError() : Error("empty silhouette: no foreground pixels") {}
  explicit EmptySilhouetteError(const std::string& what) : Error(what) {}
};

class ParameterError : public Error {
public:
  using Error::Error;
};

// Singular normal equations in a least-squares segment fit.
class FitError : public Error {
public:
  FitError(std::size_t segment, const std::string& what)
      : Error("fit error on segment " + std::to_string(segment) + ": " + what), segment_(segment) {}

  std::size_t segment() const noexcept { return segment_; }

private:
  std::size_t segment_;
};

class SvgError : public Error {
public:
  using Error::Error;
};

class UnsupportedCommandError : public SvgError {
public:
  explicit UnsupportedCommandError(char cmd)
      : SvgError(std::string("unsupported path command '") + cmd + "'"), command_(cmd) {}

  char command() const noexcept { return command_; }

private:
  char command_;
};

class TopologyError : public SvgError {
public:
  using SvgError::SvgError;
};

class ImportError : public SvgError {
public:
  using SvgError::SvgError;
};

}  // namespace silvec
