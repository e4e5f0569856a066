#include "spectrasort/error.hpp"

namespace spectrasort {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NoDataRows: return "NoDataRows";
    case Errc::NonMonotoneWavelengths: return "NonMonotoneWavelengths";
    case Errc::IntensityOutOfRange: return "IntensityOutOfRange";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::MixedGrids: return "MixedGrids";
    case Errc::ClassNameMismatch: return "ClassNameMismatch";
    case Errc::UnknownSampleId: return "UnknownSampleId";
    case Errc::InsufficientRows: return "InsufficientRows";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingleClass: return "SingleClass";
    case Errc::BadK: return "BadK";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::UnmappedClass: return "UnmappedClass";
    case Errc::UnknownElement: return "UnknownElement";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::CorruptModel: return "CorruptModel";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spectrasort
