#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spectrasort {

enum class Errc {
  NoDataRows,
  NonMonotoneWavelengths,
  IntensityOutOfRange,
  SchemaMismatch,
  LabelOutOfRange,
  MixedGrids,
  ClassNameMismatch,
  UnknownSampleId,
  InsufficientRows,
  EmptyDataset,
  DimensionMismatch,
  SingleClass,
  BadK,
  TooFewRows,
  UnmappedClass,
  UnknownElement,
  VersionUnsupported,
  CorruptModel,
  InvalidArgument,
  Io,
};

std::string_view to_string(Errc code);

// Every failure the library reports is an Error carrying one of the codes
// above; the message adds the offending file, class or value.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace spectrasort
