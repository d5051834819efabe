#pragma once

#include <stdexcept>
#include <string>

namespace bitsampler {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a fixed-length bit string runs out of bits.
struct TapeExhausted : Error {
  TapeExhausted() : Error("bit tape exhausted") {}
};

struct AllZeroWeights : Error {
  AllZeroWeights() : Error("weight vector has no positive entry") {}
};

struct NonIntegerInverseEps : Error {
  explicit NonIntegerInverseEps(const std::string& eps)
      : Error("1/eps must be an integer, got eps = " + eps) {}
};

// Enumeration would need more tape bits than the configured budget.
struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

struct TooFewTrials : Error {
  explicit TooFewTrials(const std::string& what) : Error(what) {}
};

struct MismatchedSupport : Error {
  MismatchedSupport() : Error("distributions have different outcome spaces") {}
};

// Index file problems map to a distinct exit code in the CLI.
struct FormatError : Error {
  using Error::Error;
};
struct BadMagic : FormatError {
  BadMagic() : FormatError("not an SSMP index file") {}
};
struct BadVersion : FormatError {
  BadVersion() : FormatError("unsupported SSMP version") {}
};
struct TruncatedFile : FormatError {
  TruncatedFile() : FormatError("SSMP file shorter than declared") {}
};
struct ChecksumMismatch : FormatError {
  ChecksumMismatch() : FormatError("SSMP checksum mismatch") {}
};

}  // namespace bitsampler
