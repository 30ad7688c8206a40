#pragma once

#include "thz/catalog.hpp"
#include "thz/types.hpp"

namespace thz {

// Complex excess refractivity n(f) - 1 of humid air. The imaginary part is
// non-negative and encodes absorption; the real part is dispersion.
struct RefractivitySpectrum {
    FreqGrid grid;
    std::vector<cplx> refractivity;
    AtmosphereState atmos;
};

// Sum of Van Vleck-Weisskopf line shapes over the catalog, scaled by the
// molecular number densities implied by `atmos`. Pressure broadening uses
// gamma = gamma_air * p_dry + gamma_self * p_H2O, scaled by (296/T)^n_temp.
RefractivitySpectrum complex_refractivity(const LineCatalog& catalog,
                                          const AtmosphereState& atmos, const FreqGrid& grid);

// Line-of-sight channel over `distance_m` meters:
//   |h| = exp(-2 pi f d Im(n)/c),  arg h = -2 pi f d Re(n)/c.
// The non-dispersive bulk propagation delay (distance/c) is excluded; it
// carries zero GDD and would dominate the phase dynamic range.
ChannelResponse los_transfer(const RefractivitySpectrum& spectrum, double distance_m);

// Power attenuation (4 pi f / c) Im(n) (10/ln10), in dB per meter.
double attenuation_db_per_m(double freq_ghz, cplx refractivity);

}  // namespace thz
