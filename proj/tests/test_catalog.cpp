#include "doctest.h"

#include <cmath>

#include "thz/catalog.hpp"

using namespace thz;

namespace {

const char* kTwoRowCsv =
    "#units,GHz,cat296,GHz_per_atm,GHz_per_atm,unitless,cm-1\n"
    "molecule,f0,strength,gamma_air,gamma_self,n_temp,e_lower\n"
    "H2O,380.197353,24.42,2.91,14.4,0.54,212.1564\n"
    "H2O,183.310087,2.286,3.0,14.9,0.77,136.1639\n";

}  // namespace

TEST_SUITE("catalog") {

TEST_CASE("parses rows and sorts by line center") {
    const LineCatalog cat = parse_catalog(kTwoRowCsv);
    REQUIRE(cat.lines.size() == 2);
    // reference line centers: 183.310087 and 380.197353 GHz
    CHECK(cat.lines[0].f0_ghz == doctest::Approx(183.310087));
    CHECK(cat.lines[1].f0_ghz == doctest::Approx(380.197353));
    CHECK(cat.lines[0].molecule == Molecule::H2O);
    CHECK(cat.f_min_ghz == doctest::Approx(183.310087));
    CHECK(cat.f_max_ghz == doctest::Approx(380.197353));
    CHECK(cat.lines[0].gamma_self_ghz_per_atm == doctest::Approx(14.9));
}

TEST_CASE("header-only file is an empty-catalog error") {
    const char* header_only =
        "#units,GHz,cat296,GHz_per_atm,GHz_per_atm,unitless,cm-1\n"
        "molecule,f0,strength,gamma_air,gamma_self,n_temp,e_lower\n";
    CHECK_THROWS_AS(parse_catalog(header_only), EmptyCatalogError);
}

TEST_CASE("negative width fails validation naming the field") {
    const char* bad =
        "#units,GHz,cat296,GHz_per_atm,GHz_per_atm,unitless,cm-1\n"
        "molecule,f0,strength,gamma_air,gamma_self,n_temp,e_lower\n"
        "H2O,183.31,2.28,-1.0,14.9,0.77,136.16\n";
    try {
        parse_catalog(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "gamma_air");
    }
}

TEST_CASE("malformed rows carry line numbers") {
    const char* bad =
        "#units,GHz,cat296,GHz_per_atm,GHz_per_atm,unitless,cm-1\n"
        "molecule,f0,strength,gamma_air,gamma_self,n_temp,e_lower\n"
        "H2O,183.31,2.28,3.0,14.9,0.77,136.16\n"
        "H2O,nonsense,2.28,3.0\n";
    try {
        parse_catalog(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_no() == 4);
    }
    CHECK_THROWS_AS(parse_catalog("not a catalog\n"), ParseError);
    CHECK_THROWS_AS(parse_catalog(""), ParseError);
}

TEST_CASE("serialize/parse round trip is identity") {
    const LineCatalog& cat = builtin_catalog();
    const LineCatalog again = parse_catalog(serialize_catalog(cat));
    REQUIRE(again.lines.size() == cat.lines.size());
    for (std::size_t i = 0; i < cat.lines.size(); ++i) {
        CHECK(again.lines[i].molecule == cat.lines[i].molecule);
        CHECK(again.lines[i].f0_ghz == cat.lines[i].f0_ghz);
        CHECK(again.lines[i].strength_cat296 == cat.lines[i].strength_cat296);
        CHECK(again.lines[i].gamma_air_ghz_per_atm == cat.lines[i].gamma_air_ghz_per_atm);
        CHECK(again.lines[i].gamma_self_ghz_per_atm == cat.lines[i].gamma_self_ghz_per_atm);
        CHECK(again.lines[i].n_temp == cat.lines[i].n_temp);
        CHECK(again.lines[i].e_lower_cm1 == cat.lines[i].e_lower_cm1);
    }
}

TEST_CASE("builtin catalog is sorted, in bounds, and spans the O2 complex") {
    const LineCatalog& cat = builtin_catalog();
    REQUIRE(!cat.lines.empty());
    bool has_o2_60 = false, has_o2_118 = false, has_h2o_557 = false;
    for (std::size_t i = 0; i < cat.lines.size(); ++i) {
        if (i) CHECK(cat.lines[i].f0_ghz >= cat.lines[i - 1].f0_ghz);
        CHECK(cat.lines[i].f0_ghz >= cat.f_min_ghz);
        CHECK(cat.lines[i].f0_ghz <= cat.f_max_ghz);
        if (cat.lines[i].molecule == Molecule::O2 && std::abs(cat.lines[i].f0_ghz - 60.306) < 0.01)
            has_o2_60 = true;
        if (cat.lines[i].molecule == Molecule::O2 && std::abs(cat.lines[i].f0_ghz - 118.750) < 0.01)
            has_o2_118 = true;
        if (cat.lines[i].molecule == Molecule::H2O && std::abs(cat.lines[i].f0_ghz - 556.936) < 0.01)
            has_h2o_557 = true;
    }
    CHECK(has_o2_60);
    CHECK(has_o2_118);
    CHECK(has_h2o_557);
}

TEST_CASE("atmosphere state invariants") {
    CHECK_THROWS_AS(AtmosphereState(150.0, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(AtmosphereState(290.0, 1.5, 1.0), ValidationError);
    CHECK_THROWS_AS(AtmosphereState(290.0, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(AtmosphereState(290.0, 0.5, 2.5), ValidationError);
    CHECK_NOTHROW(AtmosphereState(302.15, 0.45, 1.0));
}

TEST_CASE("water vapor pressure: dry air and Buck-equation oracle") {
    CHECK(water_vapor_partial_pressure_atm(AtmosphereState(302.15, 0.0, 1.0)) == 0.0);
    // Frozen from an independent Buck-equation evaluation at 29 C:
    //   e_s = 40.07422 hPa = 0.039550182 atm, 45% of it = 0.017797582 atm
    CHECK(saturation_vapor_pressure_atm(302.15) == doctest::Approx(0.039550182079).epsilon(1e-9));
    CHECK(water_vapor_partial_pressure_atm(AtmosphereState(302.15, 0.45, 1.0)) ==
          doctest::Approx(0.017797581936).epsilon(1e-9));
    CHECK(water_vapor_partial_pressure_atm(AtmosphereState(302.15, 1.0, 1.0)) ==
          doctest::Approx(0.039550182079).epsilon(1e-9));
}

TEST_CASE("partial pressure is exactly linear in RH and increasing in T") {
    for (double rh : {0.1, 0.33, 0.7, 1.0}) {
        const double full = water_vapor_partial_pressure_atm(AtmosphereState(295.0, 1.0, 1.0));
        CHECK(water_vapor_partial_pressure_atm(AtmosphereState(295.0, rh, 1.0)) == rh * full);
    }
    double prev = 0.0;
    for (double t = 273.0; t <= 330.0; t += 0.5) {
        const double e = water_vapor_partial_pressure_atm(AtmosphereState(t, 0.5, 1.0));
        CHECK(e > prev);
        prev = e;
    }
}

}  // TEST_SUITE
