#pragma once

#include <stdexcept>
#include <string>

namespace thz {

// Base of all domain errors. `category()` is the stable machine-readable tag
// the CLI prints next to its exit status.
class Error : public std::runtime_error {
  public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

  private:
    std::string category_;
};

class ParseError : public Error {
  public:
    ParseError(int line_no, const std::string& what)
        : Error("parse", "line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
    int line_no() const noexcept { return line_no_; }

  private:
    int line_no_;
};

// Out-of-range or inconsistent value; `field()` names the offending quantity.
class ValidationError : public Error {
  public:
    ValidationError(std::string field, const std::string& what)
        : Error("validation", what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class EmptyCatalogError : public Error {
  public:
    explicit EmptyCatalogError(const std::string& what) : Error("empty_catalog", what) {}
};

// Requested frequencies not covered by a catalog or channel grid.
class CoverageError : public Error {
  public:
    explicit CoverageError(const std::string& what) : Error("coverage", what) {}
};

class GridMismatchError : public Error {
  public:
    explicit GridMismatchError(const std::string& what) : Error("grid_mismatch", what) {}
};

// Zero-forcing hit an in-band amplitude null; `freq_ghz()` locates it.
class NonInvertibleChannelError : public Error {
  public:
    NonInvertibleChannelError(double freq_ghz, const std::string& what)
        : Error("non_invertible", what), freq_ghz_(freq_ghz) {}
    double freq_ghz() const noexcept { return freq_ghz_; }

  private:
    double freq_ghz_;
};

// Phase requested where the amplitude is below the evaluation floor.
class MaskedPhaseError : public Error {
  public:
    explicit MaskedPhaseError(const std::string& what) : Error("masked_phase", what) {}
};

// Trellis or enumeration size exceeds the configured budget.
class ComplexityError : public Error {
  public:
    explicit ComplexityError(const std::string& what) : Error("complexity", what) {}
};

}  // namespace thz
