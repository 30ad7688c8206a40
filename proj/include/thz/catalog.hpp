#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thz/types.hpp"

namespace thz {

enum class Molecule { H2O, O2 };

// One spectroscopic resonance. Strength is the integrated absorption cross
// section at 296 K in catalog units ("cat296" = 1e-21 cm^2 GHz per molecule,
// integrated over frequency in GHz). Widths are half-widths at half maximum.
struct LineRecord {
    Molecule molecule = Molecule::H2O;
    double f0_ghz = 0.0;
    double strength_cat296 = 0.0;
    double gamma_air_ghz_per_atm = 0.0;
    double gamma_self_ghz_per_atm = 0.0;
    double n_temp = 0.0;
    double e_lower_cm1 = 0.0;
};

struct LineCatalog {
    std::vector<LineRecord> lines;  // sorted ascending by f0
    double f_min_ghz = 0.0;
    double f_max_ghz = 0.0;
};

struct AtmosphereState {
    AtmosphereState(double temperature_k, double relative_humidity, double pressure_total_atm);

    double temperature_k;
    double relative_humidity;    // fraction in [0, 1]
    double pressure_total_atm;
};

// Reference temperature the catalog strengths are quoted at.
inline constexpr double kCatalogRefTempK = 296.0;

// CSV catalog ingestion. The format is fixed:
//   line 1: #units,GHz,cat296,GHz_per_atm,GHz_per_atm,unitless,cm-1
//   line 2: molecule,f0,strength,gamma_air,gamma_self,n_temp,e_lower
//   data rows follow; lines starting with '#' are comments.
LineCatalog parse_catalog(std::string_view text);
std::string serialize_catalog(const LineCatalog& catalog);

// The curated catalog shipped with the library (H2O lines to ~2 THz plus the
// O2 60 GHz complex and its THz lines), embedded at build time.
const LineCatalog& builtin_catalog();

// Buck equation over water; monotonically increasing in T.
double saturation_vapor_pressure_atm(double temperature_k);

// RH x saturation pressure, in atm.
double water_vapor_partial_pressure_atm(const AtmosphereState& atmos);

const char* to_string(Molecule m);

}  // namespace thz
