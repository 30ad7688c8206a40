#include "thz/atmosphere.hpp"

#include <cmath>
#include <sstream>

namespace thz {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kBoltzmann = 1.380649e-23;       // J/K
constexpr double kC2 = 1.43880;                   // hc/k, cm K
constexpr double kGhzToCm1 = 1.0 / 29.9792458;    // GHz -> cm^-1
constexpr double kSpeedOfLightCm = 2.99792458e10; // cm/s
constexpr double kAtmToPa = 101325.0;
constexpr double kCat296ToCm2Ghz = 1e-21;
constexpr double kO2MixingRatio = 0.20946;

// Temperature scaling of line intensity relative to 296 K: rotational
// partition function (T^1.5 for H2O, T for O2), Boltzmann population of the
// lower state, and the stimulated-emission factor.
double strength_at(const LineRecord& line, double t_k) {
    const double nu0 = line.f0_ghz * kGhzToCm1;
    const double q_exp = line.molecule == Molecule::H2O ? 1.5 : 1.0;
    const double q_ratio = std::pow(kCatalogRefTempK / t_k, q_exp);
    const double boltz =
        std::exp(-kC2 * line.e_lower_cm1 / t_k) / std::exp(-kC2 * line.e_lower_cm1 / kCatalogRefTempK);
    const double stim = (1.0 - std::exp(-kC2 * nu0 / t_k)) / (1.0 - std::exp(-kC2 * nu0 / kCatalogRefTempK));
    return line.strength_cat296 * kCat296ToCm2Ghz * q_ratio * boltz * stim;
}

}  // namespace

RefractivitySpectrum complex_refractivity(const LineCatalog& catalog,
                                          const AtmosphereState& atmos, const FreqGrid& grid) {
    validate(grid);
    if (catalog.lines.empty()) throw EmptyCatalogError("refractivity needs a non-empty catalog");
    if (!(grid.f_start_ghz >= catalog.f_min_ghz && grid.f_end_ghz() <= catalog.f_max_ghz)) {
        std::ostringstream msg;
        msg << "grid [" << grid.f_start_ghz << ", " << grid.f_end_ghz()
            << "] GHz outside catalog coverage [" << catalog.f_min_ghz << ", "
            << catalog.f_max_ghz << "] GHz";
        throw CoverageError(msg.str());
    }

    const double t = atmos.temperature_k;
    const double p_h2o = water_vapor_partial_pressure_atm(atmos);
    const double p_dry = atmos.pressure_total_atm - p_h2o;
    if (p_dry < 0.0)
        throw ValidationError("pressure_total", "water vapor pressure exceeds total pressure");
    // number densities in molecules / cm^3
    const double n_h2o = p_h2o * kAtmToPa / (kBoltzmann * t) * 1e-6;
    const double n_o2 = kO2MixingRatio * p_dry * kAtmToPa / (kBoltzmann * t) * 1e-6;
    const double theta = kCatalogRefTempK / t;

    RefractivitySpectrum spec{grid, std::vector<cplx>(grid.n, cplx{0.0, 0.0}), atmos};
    for (const LineRecord& line : catalog.lines) {
        const double gamma = (line.gamma_air_ghz_per_atm * p_dry +
                              line.gamma_self_ghz_per_atm * p_h2o) *
                             std::pow(theta, line.n_temp);
        const double density = line.molecule == Molecule::H2O ? n_h2o : n_o2;
        const double weight = density * strength_at(line, t);
        if (weight == 0.0) continue;
        const double f0 = line.f0_ghz;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double f = grid.freq_ghz(i);
            // Complex VVW shape; Im >= 0 for all f > 0.
            const cplx shape = (f / f0) / M_PI *
                               (1.0 / cplx(f0 - f, -gamma) - 1.0 / cplx(f0 + f, gamma));
            spec.refractivity[i] += weight * shape * kSpeedOfLightCm / (4.0 * M_PI * f * 1e9);
        }
    }
    return spec;
}

ChannelResponse los_transfer(const RefractivitySpectrum& spectrum, double distance_m) {
    if (!(distance_m >= 0.0)) throw ValidationError("distance", "distance must be non-negative");
    validate(spectrum.grid);
    ChannelResponse ch{spectrum.grid, std::vector<cplx>(spectrum.grid.n), distance_m, ""};
    for (std::size_t i = 0; i < spectrum.grid.n; ++i) {
        const double k = kTwoPi * spectrum.grid.freq_ghz(i) * 1e9 * distance_m / kSpeedOfLight;
        const cplx n = spectrum.refractivity[i];
        ch.h[i] = std::polar(std::exp(-k * n.imag()), -k * n.real());
    }
    std::ostringstream label;
    label << "atmosphere(d=" << distance_m << "m,T=" << spectrum.atmos.temperature_k
          << "K,RH=" << spectrum.atmos.relative_humidity << ")";
    ch.label = label.str();
    return ch;
}

double attenuation_db_per_m(double freq_ghz, cplx refractivity) {
    return 4.0 * M_PI * freq_ghz * 1e9 / kSpeedOfLight * refractivity.imag() * 10.0 / std::log(10.0);
}

}  // namespace thz
