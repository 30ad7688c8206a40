#include "thz/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "thz/builtin_catalog_data.hpp"

namespace thz {

namespace {

constexpr const char* kUnitsHeader = "#units,GHz,cat296,GHz_per_atm,GHz_per_atm,unitless,cm-1";
constexpr const char* kColumnHeader = "molecule,f0,strength,gamma_air,gamma_self,n_temp,e_lower";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

double parse_double(const std::string& s, const char* field, int line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(line_no, std::string("cannot parse ") + field + " from '" + s + "'");
    }
}

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(field, std::string(field) + " must be positive and finite");
}

}  // namespace

const char* to_string(Molecule m) { return m == Molecule::H2O ? "H2O" : "O2"; }

AtmosphereState::AtmosphereState(double t_k, double rh, double p_atm)
    : temperature_k(t_k), relative_humidity(rh), pressure_total_atm(p_atm) {
    if (!(t_k >= 200.0 && t_k <= 350.0))
        throw ValidationError("temperature", "temperature must be in [200, 350] K");
    if (!(rh >= 0.0 && rh <= 1.0))
        throw ValidationError("relative_humidity", "relative humidity must be in [0, 1]");
    if (!(p_atm > 0.0 && p_atm <= 2.0))
        throw ValidationError("pressure_total", "total pressure must be in (0, 2] atm");
}

LineCatalog parse_catalog(std::string_view text) {
    std::istringstream stream{std::string(text)};
    std::string line;
    int line_no = 0;
    bool saw_units = false;
    bool saw_columns = false;
    LineCatalog cat;

    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_units) {
            if (line != kUnitsHeader)
                throw ParseError(line_no, std::string("expected units header '") + kUnitsHeader + "'");
            saw_units = true;
            continue;
        }
        if (line[0] == '#') continue;
        if (!saw_columns) {
            if (line != kColumnHeader)
                throw ParseError(line_no, std::string("expected column header '") + kColumnHeader + "'");
            saw_columns = true;
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 7)
            throw ParseError(line_no, "expected 7 comma-separated fields, got " +
                                          std::to_string(fields.size()));
        LineRecord rec;
        if (fields[0] == "H2O") {
            rec.molecule = Molecule::H2O;
        } else if (fields[0] == "O2") {
            rec.molecule = Molecule::O2;
        } else {
            throw ParseError(line_no, "unknown molecule '" + fields[0] + "'");
        }
        rec.f0_ghz = parse_double(fields[1], "f0", line_no);
        rec.strength_cat296 = parse_double(fields[2], "strength", line_no);
        rec.gamma_air_ghz_per_atm = parse_double(fields[3], "gamma_air", line_no);
        rec.gamma_self_ghz_per_atm = parse_double(fields[4], "gamma_self", line_no);
        rec.n_temp = parse_double(fields[5], "n_temp", line_no);
        rec.e_lower_cm1 = parse_double(fields[6], "e_lower", line_no);

        require_positive(rec.f0_ghz, "f0");
        require_positive(rec.strength_cat296, "strength");
        require_positive(rec.gamma_air_ghz_per_atm, "gamma_air");
        require_positive(rec.gamma_self_ghz_per_atm, "gamma_self");
        if (!std::isfinite(rec.n_temp)) throw ValidationError("n_temp", "n_temp must be finite");
        if (!(rec.e_lower_cm1 >= 0.0) || !std::isfinite(rec.e_lower_cm1))
            throw ValidationError("e_lower", "e_lower must be non-negative and finite");
        cat.lines.push_back(rec);
    }
    if (!saw_units) throw ParseError(line_no, "missing units header");
    if (cat.lines.empty()) throw EmptyCatalogError("catalog contains no data rows");

    std::stable_sort(cat.lines.begin(), cat.lines.end(),
                     [](const LineRecord& a, const LineRecord& b) { return a.f0_ghz < b.f0_ghz; });
    cat.f_min_ghz = cat.lines.front().f0_ghz;
    cat.f_max_ghz = cat.lines.back().f0_ghz;
    return cat;
}

std::string serialize_catalog(const LineCatalog& catalog) {
    std::string out;
    out += kUnitsHeader;
    out += '\n';
    out += kColumnHeader;
    out += '\n';
    char buf[256];
    for (const LineRecord& r : catalog.lines) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      to_string(r.molecule), r.f0_ghz, r.strength_cat296,
                      r.gamma_air_ghz_per_atm, r.gamma_self_ghz_per_atm, r.n_temp, r.e_lower_cm1);
        out += buf;
    }
    return out;
}

const LineCatalog& builtin_catalog() {
    static const LineCatalog cat = parse_catalog(detail::kBuiltinCatalogCsv);
    return cat;
}

double saturation_vapor_pressure_atm(double temperature_k) {
    // Buck (1996), over water; t in Celsius, result in hPa.
    const double t = temperature_k - 273.15;
    const double hpa = 6.1121 * std::exp((18.678 - t / 234.5) * t / (257.14 + t));
    return hpa / 1013.25;
}

double water_vapor_partial_pressure_atm(const AtmosphereState& atmos) {
    return atmos.relative_humidity * saturation_vapor_pressure_atm(atmos.temperature_k);
}

}  // namespace thz
