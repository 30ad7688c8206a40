#include "cli.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <set>
#include <sstream>

#include "thz/analysis.hpp"
#include "thz/atmosphere.hpp"
#include "thz/catalog.hpp"
#include "thz/equalize.hpp"
#include "thz/link.hpp"
#include "thz/multipath.hpp"
#include "thz/phy.hpp"

namespace thz::cli {

namespace {

const std::set<std::string> kValidKeys = {
    "seed", "out", "catalog",
    "atmosphere.temperature_c", "atmosphere.rh", "atmosphere.pressure_atm",
    "grid.fmin_ghz", "grid.fmax_ghz", "grid.df_ghz",
    "channel.distance_m", "channel.paths", "channel.surface",
    "channel.quadratic_ps2", "channel.quadratic_center_ghz",
    "channel.scramble", "channel.descramble",
    "link.scheme", "link.symbol_rate_gbaud", "link.carrier_ghz", "link.rolloff",
    "link.span_symbols", "link.frame_bits", "link.sps", "link.guard_symbols",
    "eq.spec", "pdc.mode",
    "sweep.ebn0_db", "sweep.min_errors", "sweep.max_bits", "sweep.snapshot_ebn0_db",
    "sweep.constellation_out",
    "metric.band_hz", "metric.gdd_ps2",
    "pulse.fwhm_ps", "pulse.two_path_delay_ps",
};

ScenarioConfig defaults() {
    return {
        {"seed", "1"},
        {"out", "out.csv"},
        {"catalog", ""},
        {"atmosphere.temperature_c", "29"},
        {"atmosphere.rh", "0.45"},
        {"atmosphere.pressure_atm", "1.0"},
        {"grid.fmin_ghz", "0"},
        {"grid.fmax_ghz", "0"},
        {"grid.df_ghz", "0.01"},
        {"channel.distance_m", "0"},
        {"channel.paths", ""},
        {"channel.surface", ""},
        {"channel.quadratic_ps2", "0"},
        {"channel.quadratic_center_ghz", "0"},
        {"channel.scramble", ""},
        {"channel.descramble", ""},
        {"link.scheme", "qpsk"},
        {"link.symbol_rate_gbaud", "10"},
        {"link.carrier_ghz", "380"},
        {"link.rolloff", "0.35"},
        {"link.span_symbols", "16"},
        {"link.frame_bits", "4096"},
        {"link.sps", "2"},
        {"link.guard_symbols", "64"},
        {"eq.spec", "none"},
        {"pdc.mode", "off"},
        {"sweep.ebn0_db", "0,2,4,6,8,10,12,14,16,18,20"},
        {"sweep.min_errors", "100"},
        {"sweep.max_bits", "2000000"},
        {"sweep.snapshot_ebn0_db", "nan"},
        {"sweep.constellation_out", ""},
        {"metric.band_hz", "9e9"},
        {"metric.gdd_ps2", "2533"},
        {"pulse.fwhm_ps", "100"},
        {"pulse.two_path_delay_ps", "50.5"},
    };
}

double to_double(const ScenarioConfig& cfg, const std::string& key) {
    const std::string& s = cfg.at(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(key, "cannot parse '" + s + "' as a number for " + key);
    }
}

long long to_int(const ScenarioConfig& cfg, const std::string& key) {
    const double v = to_double(cfg, key);
    if (v != std::floor(v)) throw ValidationError(key, key + " must be an integer");
    return static_cast<long long>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const std::string& f : split(s, ',')) {
        try {
            out.push_back(std::stod(f));
        } catch (const std::exception&) {
            throw ValidationError(key, "cannot parse list entry '" + f + "' in " + key);
        }
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("io", "cannot open '" + tmp + "' for writing");
        f << content;
        if (!f.good()) throw Error("io", "failed writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("io", "cannot rename '" + tmp + "' to '" + path + "'");
}

LineCatalog load_catalog(const ScenarioConfig& cfg) {
    const std::string& path = cfg.at("catalog");
    if (path.empty()) return builtin_catalog();
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("io", "cannot open catalog file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_catalog(ss.str());
}

AtmosphereState atmos_from(const ScenarioConfig& cfg) {
    return AtmosphereState(to_double(cfg, "atmosphere.temperature_c") + 273.15,
                           to_double(cfg, "atmosphere.rh"),
                           to_double(cfg, "atmosphere.pressure_atm"));
}

LinkConfig link_from(const ScenarioConfig& cfg) {
    LinkConfig link;
    const std::string scheme = cfg.at("link.scheme");
    if (scheme == "bpsk") link.scheme = Scheme::BPSK;
    else if (scheme == "qpsk") link.scheme = Scheme::QPSK;
    else throw ValidationError("link.scheme", "unknown scheme '" + scheme + "'");
    link.symbol_rate_gbaud = to_double(cfg, "link.symbol_rate_gbaud");
    link.carrier_ghz = to_double(cfg, "link.carrier_ghz");
    link.rolloff = to_double(cfg, "link.rolloff");
    link.span_symbols = static_cast<int>(to_int(cfg, "link.span_symbols"));
    link.frame_bits = static_cast<int>(to_int(cfg, "link.frame_bits"));
    link.samples_per_symbol = static_cast<int>(to_int(cfg, "link.sps"));
    link.guard_symbols = static_cast<int>(to_int(cfg, "link.guard_symbols"));
    link.check();
    return link;
}

FreqGrid grid_from(const ScenarioConfig& cfg, const LinkConfig* link) {
    double lo = to_double(cfg, "grid.fmin_ghz");
    double hi = to_double(cfg, "grid.fmax_ghz");
    const double df = to_double(cfg, "grid.df_ghz");
    if (!(hi > lo) || hi <= 0.0) {
        if (!link) throw ValidationError("grid.fmin_ghz", "grid bounds required (--fmin/--fmax)");
        const Band occ = link->occupied_band();
        lo = occ.f_lo_ghz - 1.0;
        hi = occ.f_hi_ghz + 1.0;
    }
    return make_grid(lo, hi, df);
}

std::optional<EqualizerSpec> eq_from(const ScenarioConfig& cfg) {
    const std::string& s = cfg.at("eq.spec");
    if (s == "none" || s.empty()) return std::nullopt;
    EqualizerSpec eq;
    if (s == "zf") {
        eq.kind = EqualizerSpec::Kind::zf;
        eq.n_taps = 0;
        return eq;
    }
    if (s == "mlse") {
        eq.kind = EqualizerSpec::Kind::mlse;
        eq.n_taps = 0;
        return eq;
    }
    const auto parts = split(s, ':');
    if (parts.size() == 2 && (parts[0] == "mmse" || parts[0] == "dfe")) {
        eq.kind = parts[0] == "mmse" ? EqualizerSpec::Kind::linear_mmse : EqualizerSpec::Kind::dfe;
        try {
            eq.n_taps = std::stoi(parts[1]);
        } catch (const std::exception&) {
            throw ValidationError("eq.spec", "bad tap count in '" + s + "'");
        }
        if (eq.n_taps < 1) throw ValidationError("eq.spec", "tap count must be positive");
        return eq;
    }
    throw ValidationError("eq.spec", "expected none|zf|mmse:N|dfe:N|mlse, got '" + s + "'");
}

PdcMode pdc_from(const ScenarioConfig& cfg) {
    const std::string& s = cfg.at("pdc.mode");
    if (s == "off") return PdcMode::off;
    if (s == "on" || s == "rx") return PdcMode::rx;
    if (s == "tx") return PdcMode::tx;
    throw ValidationError("pdc.mode", "expected off|on|rx|tx, got '" + s + "'");
}

struct ScrambleSpec {
    std::uint64_t key;
    double metric_ps;
    int segments;
};

ScrambleSpec parse_scramble(const std::string& s, const std::string& which) {
    const auto parts = split(s, ':');
    if (parts.size() != 3)
        throw ValidationError(which, "expected key:metric_ps:segments, got '" + s + "'");
    try {
        return ScrambleSpec{std::stoull(parts[0]), std::stod(parts[1]), std::stoi(parts[2])};
    } catch (const std::exception&) {
        throw ValidationError(which, "cannot parse '" + s + "'");
    }
}

// Compose the channel from the configured pieces on one shared grid.
ChannelResponse build_channel(const ScenarioConfig& cfg, const FreqGrid& grid, Band band) {
    std::vector<ChannelResponse> parts;
    const double distance = to_double(cfg, "channel.distance_m");
    if (distance > 0.0) {
        const auto spec = complex_refractivity(load_catalog(cfg), atmos_from(cfg), grid);
        parts.push_back(los_transfer(spec, distance));
    }
    if (!cfg.at("channel.paths").empty()) {
        PathSet paths;
        for (const std::string& p : split(cfg.at("channel.paths"), ';')) {
            const auto f = split(p, ':');
            if (f.size() != 3)
                throw ValidationError("channel.paths",
                                      "expected delay_ps:gain_re:gain_im in '" + p + "'");
            try {
                paths.paths.push_back(
                    Path{std::stod(f[0]), cplx{std::stod(f[1]), std::stod(f[2])}, ""});
            } catch (const std::exception&) {
                throw ValidationError("channel.paths", "cannot parse path '" + p + "'");
            }
        }
        parts.push_back(multipath_transfer(paths, grid));
    }
    if (!cfg.at("channel.surface").empty()) {
        const auto f = split(cfg.at("channel.surface"), ':');
        if (f.size() != 6)
            throw ValidationError("channel.surface",
                                  "expected mean_um:min_um:max_um:angle_deg:n:seed");
        SurfaceStats stats;
        std::uint64_t seed = 0;
        try {
            stats.mean_height_um = std::stod(f[0]);
            stats.min_height_um = std::stod(f[1]);
            stats.max_height_um = std::stod(f[2]);
            stats.incidence_angle_deg = std::stod(f[3]);
            stats.n_scatterers = std::stoul(f[4]);
            seed = std::stoull(f[5]);
        } catch (const std::exception&) {
            throw ValidationError("channel.surface", "cannot parse surface spec");
        }
        parts.push_back(multipath_transfer(rough_surface_paths(stats, seed), grid));
        parts.back().label = "rough_surface";
    }
    const double quad = to_double(cfg, "channel.quadratic_ps2");
    if (quad != 0.0) {
        double center = to_double(cfg, "channel.quadratic_center_ghz");
        if (center <= 0.0) center = 0.5 * (band.f_lo_ghz + band.f_hi_ghz);
        parts.push_back(quadratic_phase_channel(grid, center, quad));
    }
    if (!cfg.at("channel.scramble").empty()) {
        const auto s = parse_scramble(cfg.at("channel.scramble"), "channel.scramble");
        parts.push_back(scramble_profile(s.key, grid, band, s.metric_ps, s.segments));
    }
    if (!cfg.at("channel.descramble").empty()) {
        const auto s = parse_scramble(cfg.at("channel.descramble"), "channel.descramble");
        parts.push_back(conjugate(scramble_profile(s.key, grid, band, s.metric_ps, s.segments)));
    }
    if (parts.empty()) return identity_channel(grid);
    return cascade(parts);
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream ss;
    ss << std::setprecision(precision) << v;
    return ss.str();
}

int run_atmosphere(const ScenarioConfig& cfg, std::ostream& out) {
    const auto grid = grid_from(cfg, nullptr);
    const auto spec = complex_refractivity(load_catalog(cfg), atmos_from(cfg), grid);
    const auto prof = phase_profile(los_transfer(spec, 1.0));
    std::ostringstream csv;
    csv << "freq_GHz,atten_dB_per_m,group_delay_ps_per_m,gdd_ps2_per_m\n";
    for (std::size_t i = 0; i < grid.n; ++i) {
        csv << fmt(grid.freq_ghz(i), 10) << ','
            << fmt(attenuation_db_per_m(grid.freq_ghz(i), spec.refractivity[i]), 9) << ','
            << fmt(prof.group_delay_ps[i], 9) << ',' << fmt(prof.gdd_ps2[i], 9) << '\n';
    }
    write_atomic(cfg.at("out"), csv.str());
    out << "atmosphere: " << grid.n << " points, " << cfg.at("out") << "\n";
    return 0;
}

int run_gdd(const ScenarioConfig& cfg, std::ostream& out) {
    const auto grid = grid_from(cfg, nullptr);
    const Band band{grid.f_start_ghz + grid.df_ghz, grid.f_end_ghz() - grid.df_ghz};
    const auto channel = build_channel(cfg, grid, band);
    const auto prof = phase_profile(channel);
    std::ostringstream csv;
    csv << "freq_GHz,amp_dB,phase_rad,group_delay_ps,gdd_ps2\n";
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double amp = std::abs(channel.h[i]);
        csv << fmt(grid.freq_ghz(i), 10) << ','
            << fmt(amp > 0.0 ? 20.0 * std::log10(amp) : -400.0, 9) << ','
            << fmt(prof.phase_unwrapped_rad[i], 9) << ',' << fmt(prof.group_delay_ps[i], 9) << ','
            << fmt(prof.gdd_ps2[i], 9) << '\n';
    }
    write_atomic(cfg.at("out"), csv.str());
    out << "gdd: " << channel.label << ", " << grid.n << " points, " << cfg.at("out") << "\n";
    return 0;
}

int run_metric(const ScenarioConfig& cfg, std::ostream& out) {
    const double band_hz = to_double(cfg, "metric.band_hz");
    const double gdd_ps2 = to_double(cfg, "metric.gdd_ps2");
    if (!(band_hz > 0.0)) throw ValidationError("metric.band_hz", "bandwidth must be positive");
    const double metric_ps = 2.0 * M_PI * band_hz * std::abs(gdd_ps2) * 1e-12;
    const double symbol_ps = 1e12 / band_hz;
    out << std::setprecision(4) << metric_ps << " ps\n";
    out << "symbol duration at this bandwidth: " << std::setprecision(4) << symbol_ps
        << " ps; metric/symbol = " << std::setprecision(3) << metric_ps / symbol_ps
        << (metric_ps >= symbol_ps ? " (significant distortion expected)\n"
                                   : " (below the distortion threshold)\n");
    return 0;
}

int run_pulse_demo(const ScenarioConfig& cfg, std::ostream& out) {
    const double carrier = to_double(cfg, "link.carrier_ghz");
    const double fwhm = to_double(cfg, "pulse.fwhm_ps");
    const double quad = to_double(cfg, "channel.quadratic_ps2");
    const double gdd = quad != 0.0 ? quad : to_double(cfg, "metric.gdd_ps2");
    const double delay = to_double(cfg, "pulse.two_path_delay_ps");

    Waveform pulse;
    pulse.sample_rate_gsps = 40.0;
    pulse.carrier_ghz = carrier;
    pulse.samples_per_symbol = 2;
    const std::size_t n = 1024;
    pulse.samples.assign(n, cplx{0.0, 0.0});
    const double sigma = fwhm / 2.3548200450309493;
    const double dt_ps = 1e3 / pulse.sample_rate_gsps;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(n) / 2.0) * dt_ps;
        pulse.samples[i] = std::exp(-t * t / (2.0 * sigma * sigma));
    }

    const auto grid = make_grid(carrier - 21.0, carrier + 21.0, to_double(cfg, "grid.df_ghz"));
    const auto stretched = apply_channel(pulse, quadratic_phase_channel(grid, carrier, gdd));
    PathSet tp{{Path{0.0, cplx{1.0, 0.0}, ""}, Path{delay, cplx{1.0, 0.0}, ""}}};
    const auto faded = apply_channel(pulse, multipath_transfer(tp, grid));

    std::ostringstream csv;
    csv << "time_ps,tx_re,tx_im,gdd_re,gdd_im,multipath_re,multipath_im\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(n) / 2.0) * dt_ps;
        csv << fmt(t, 8) << ',' << fmt(pulse.samples[i].real(), 8) << ','
            << fmt(pulse.samples[i].imag(), 8) << ',' << fmt(stretched.samples[i].real(), 8) << ','
            << fmt(stretched.samples[i].imag(), 8) << ',' << fmt(faded.samples[i].real(), 8) << ','
            << fmt(faded.samples[i].imag(), 8) << '\n';
    }
    write_atomic(cfg.at("out"), csv.str());

    auto half_width = [](const Waveform& w) {
        double pk = 0.0;
        for (const cplx& v : w.samples) pk = std::max(pk, std::abs(v));
        int count = 0;
        for (const cplx& v : w.samples) count += std::abs(v) > 0.5 * pk;
        return count;
    };
    out << "pulse-demo: fwhm " << fwhm << " ps stretched to ~" << half_width(stretched) * dt_ps
        << " ps by " << gdd << " ps^2; two-path delay " << delay << " ps; " << cfg.at("out")
        << "\n";
    return 0;
}

std::string sweep_csv(const SweepResult& result, int taps) {
    std::ostringstream csv;
    csv << "ebn0_db,ber,bits,errors,eq,taps,pdc,channel_label,fingerprint\n";
    for (const BerResult& r : result.points) {
        std::string eq = result.eq_label;
        const auto colon = eq.find(':');
        if (colon != std::string::npos) eq = eq.substr(0, colon);
        csv << fmt(r.ebn0_db, 6) << ',' << fmt(r.ber, 8) << ',' << r.bits_simulated << ','
            << r.bit_errors << ',' << eq << ',' << taps << ',' << (result.pdc_on ? "on" : "off")
            << ',' << '"' << result.channel_label << '"' << ',' << r.config_fingerprint << '\n';
    }
    return csv.str();
}

std::string constellation_csv(const SweepResult& result) {
    std::ostringstream csv;
    csv << "re,im,tx_symbol_index\n";
    for (const ConstellationPoint& p : result.constellation)
        csv << fmt(p.soft.real(), 8) << ',' << fmt(p.soft.imag(), 8) << ',' << p.tx_index << '\n';
    return csv.str();
}

int run_sweep(const ScenarioConfig& cfg, std::ostream& out, bool single_point) {
    SweepSpec spec;
    spec.link = link_from(cfg);
    spec.eq = eq_from(cfg);
    spec.pdc = pdc_from(cfg);
    spec.ebn0_grid_db = parse_list(cfg.at("sweep.ebn0_db"), "sweep.ebn0_db");
    if (single_point && spec.ebn0_grid_db.size() > 1) spec.ebn0_grid_db.resize(1);
    spec.stop.min_errors = static_cast<std::uint64_t>(to_int(cfg, "sweep.min_errors"));
    spec.stop.max_bits = static_cast<std::uint64_t>(to_double(cfg, "sweep.max_bits"));
    spec.master_seed = static_cast<std::uint64_t>(to_double(cfg, "seed"));
    const std::string snap = cfg.at("sweep.snapshot_ebn0_db");
    spec.snapshot_ebn0_db = (snap == "nan" || snap.empty())
                                ? std::numeric_limits<double>::quiet_NaN()
                                : to_double(cfg, "sweep.snapshot_ebn0_db");
    if (std::isnan(spec.snapshot_ebn0_db) && !cfg.at("sweep.constellation_out").empty())
        spec.snapshot_ebn0_db = spec.ebn0_grid_db.back();

    const auto grid = grid_from(cfg, &spec.link);
    const auto channel = build_channel(cfg, grid, spec.link.occupied_band());
    const auto result = run_ber_sweep(spec, channel);

    write_atomic(cfg.at("out"), sweep_csv(result, spec.eq ? spec.eq->n_taps : 0));
    if (!cfg.at("sweep.constellation_out").empty())
        write_atomic(cfg.at("sweep.constellation_out"), constellation_csv(result));

    const double bps = bits_per_symbol(spec.link.scheme);
    for (const BerResult& r : result.points)
        out << "ebn0_db=" << r.ebn0_db << " esn0_db=" << r.ebn0_db + 10.0 * std::log10(bps)
            << " ber=" << fmt(r.ber, 6) << " errors=" << r.bit_errors
            << " bits=" << r.bits_simulated << "\n";
    out << (single_point ? "link: " : "sweep: ") << result.channel_label
        << ", eq=" << result.eq_label << ", pdc=" << (result.pdc_on ? "on" : "off") << ", "
        << cfg.at("out") << "\n";
    return 0;
}

int run_scramble_demo(const ScenarioConfig& cfg, std::ostream& out) {
    const LinkConfig link = link_from(cfg);
    const auto grid = grid_from(cfg, &link);
    const Band band = link.occupied_band();
    const std::string& sspec = cfg.at("channel.scramble");
    if (sspec.empty())
        throw ValidationError("channel.scramble",
                              "scramble-demo needs --scramble key:metric_ps:segments");
    const auto s = parse_scramble(sspec, "channel.scramble");
    const auto profile = scramble_profile(s.key, grid, band, s.metric_ps, s.segments);
    const auto prof = phase_profile(profile);

    std::ostringstream csv;
    csv << "freq_GHz,phase_rad,gdd_ps2\n";
    for (std::size_t i = 0; i < grid.n; ++i)
        csv << fmt(grid.freq_ghz(i), 10) << ',' << fmt(prof.phase_unwrapped_rad[i], 9) << ','
            << fmt(prof.gdd_ps2[i], 9) << '\n';
    write_atomic(cfg.at("out"), csv.str());

    const auto est = estimate_fir(profile, link);
    out << "scramble-demo: metric "
        << fmt(integrated_gdd_metric_ps(prof, band.f_lo_ghz, band.f_hi_ghz), 6) << " ps, cml "
        << est.cml() << " symbols";
    try {
        std::vector<cplx> token(est.taps.size() + 16, cplx{0.0, 0.0});
        mlse(est, token, 0, 8, link.scheme);
        out << ", eavesdropper mlse: feasible\n";
    } catch (const ComplexityError& e) {
        out << ", eavesdropper mlse: infeasible (" << e.what() << ")\n";
    }
    out << "descramble with the conjugate profile restores the link; " << cfg.at("out") << "\n";
    return 0;
}

}  // namespace

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig cfg;
    if (name == "fig2_pulse") {
        cfg["link.carrier_ghz"] = "130";
        cfg["pulse.fwhm_ps"] = "100";
        cfg["channel.quadratic_ps2"] = "2533";
        cfg["pulse.two_path_delay_ps"] = "50.5";
        cfg["out"] = "fig2_pulse.csv";
    } else if (name == "fig3_atmosphere") {
        cfg["atmosphere.temperature_c"] = "29";
        cfg["atmosphere.rh"] = "0.45";
        cfg["grid.fmin_ghz"] = "50";
        cfg["grid.fmax_ghz"] = "600";
        cfg["grid.df_ghz"] = "0.01";
        cfg["out"] = "fig3_atmosphere.csv";
    } else if (name == "fig4_qpsk380") {
        // 20 Gbit/s QPSK at 380 GHz over 30 m of humid air
        cfg["link.scheme"] = "qpsk";
        cfg["link.symbol_rate_gbaud"] = "10";
        cfg["link.carrier_ghz"] = "380";
        cfg["link.rolloff"] = "0.35";
        cfg["link.frame_bits"] = "4096";
        cfg["link.sps"] = "2";
        cfg["channel.distance_m"] = "30";
        cfg["atmosphere.temperature_c"] = "29";
        cfg["atmosphere.rh"] = "0.45";
        cfg["eq.spec"] = "none";
        cfg["sweep.ebn0_db"] = "0,2,4,6,8,10,12,14,16,18.4,20";
        cfg["sweep.snapshot_ebn0_db"] = "18.4";  // Es/N0 = 21.4 dB for QPSK
        cfg["sweep.min_errors"] = "100";
        cfg["sweep.max_bits"] = "2000000";
        cfg["sweep.constellation_out"] = "fig4_constellation.csv";
        cfg["out"] = "fig4_qpsk380.csv";
    } else if (name == "fig5_pdc") {
        // 0.2 Tbit/s BPSK spanning 220-540 GHz over 100 m
        cfg["link.scheme"] = "bpsk";
        cfg["link.symbol_rate_gbaud"] = "200";
        cfg["link.carrier_ghz"] = "380";
        cfg["link.rolloff"] = "0.6";
        cfg["link.frame_bits"] = "16384";
        cfg["link.sps"] = "2";
        cfg["channel.distance_m"] = "100";
        cfg["atmosphere.temperature_c"] = "29";
        cfg["atmosphere.rh"] = "0.45";
        cfg["grid.fmin_ghz"] = "219";
        cfg["grid.fmax_ghz"] = "541";
        cfg["eq.spec"] = "dfe:7";
        cfg["pdc.mode"] = "off";
        cfg["sweep.ebn0_db"] = "10,13,16";
        cfg["sweep.min_errors"] = "100";
        cfg["sweep.max_bits"] = "2000000";
        cfg["out"] = "fig5_pdc.csv";
    } else {
        throw ValidationError("preset", "unknown preset '" + name + "'");
    }
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"terahertz channel and link simulator"};
    app.require_subcommand(1);

    std::string preset, config_path;
    bool dump_config = false;

    struct Binding {
        CLI::Option* opt;
        std::string key;
        std::shared_ptr<std::string> value;
    };
    std::vector<Binding> bindings;
    std::vector<std::pair<CLI::App*, std::shared_ptr<std::vector<std::string>>>> path_opts;

    auto add_common = [&](CLI::App* sub) {
        auto bind = [&](const char* flag, const char* key, const char* desc) {
            auto holder = std::make_shared<std::string>();
            bindings.push_back(Binding{sub->add_option(flag, *holder, desc), key, holder});
        };
        bind("--seed", "seed", "master seed for all randomness");
        bind("--out", "out", "output CSV path");
        bind("--catalog", "catalog", "line catalog CSV (default: built-in)");
        bind("--t-c", "atmosphere.temperature_c", "air temperature, Celsius");
        bind("--rh", "atmosphere.rh", "relative humidity, 0..1");
        bind("--pressure-atm", "atmosphere.pressure_atm", "total pressure, atm");
        bind("--fmin", "grid.fmin_ghz", "grid start, GHz");
        bind("--fmax", "grid.fmax_ghz", "grid end, GHz");
        bind("--df", "grid.df_ghz", "grid spacing, GHz");
        bind("--distance", "channel.distance_m", "LOS path length, m");
        bind("--surface", "channel.surface", "mean_um:min_um:max_um:angle_deg:n:seed");
        bind("--quadratic-ps2", "channel.quadratic_ps2", "constant-GDD all-pass, ps^2");
        bind("--quadratic-center", "channel.quadratic_center_ghz", "its center frequency, GHz");
        bind("--scramble", "channel.scramble", "key:metric_ps:segments");
        bind("--descramble", "channel.descramble", "key:metric_ps:segments (conjugate)");
        bind("--scheme", "link.scheme", "bpsk|qpsk");
        bind("--symbol-rate", "link.symbol_rate_gbaud", "symbol rate, Gbaud");
        bind("--carrier", "link.carrier_ghz", "carrier frequency, GHz");
        bind("--rolloff", "link.rolloff", "RRC roll-off, 0..1");
        bind("--span", "link.span_symbols", "shaping span, symbols");
        bind("--frame-bits", "link.frame_bits", "bits per frame");
        bind("--sps", "link.sps", "samples per symbol");
        bind("--guard", "link.guard_symbols", "guard symbols per frame edge");
        bind("--eq", "eq.spec", "none|zf|mmse:N|dfe:N|mlse");
        bind("--pdc", "pdc.mode", "off|on|rx|tx");
        bind("--ebn0", "sweep.ebn0_db", "comma-separated Eb/N0 grid, dB");
        bind("--min-errors", "sweep.min_errors", "stop rule: bit errors per point");
        bind("--max-bits", "sweep.max_bits", "stop rule: bits per point");
        bind("--snapshot-ebn0", "sweep.snapshot_ebn0_db", "constellation snapshot point, dB");
        bind("--constellation-out", "sweep.constellation_out", "constellation CSV path");
        bind("--band", "metric.band_hz", "bandwidth, Hz");
        bind("--gdd-ps2", "metric.gdd_ps2", "mean |GDD|, ps^2");
        bind("--fwhm-ps", "pulse.fwhm_ps", "pulse FWHM, ps");
        bind("--delay-ps", "pulse.two_path_delay_ps", "second-path delay, ps");
        sub->add_option("--preset", preset, "fig2_pulse|fig3_atmosphere|fig4_qpsk380|fig5_pdc");
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_flag("--dump-config", dump_config, "print the merged config and exit");
        auto paths = std::make_shared<std::vector<std::string>>();
        sub->add_option("--path", *paths, "multipath component delay_ps:gain_re:gain_im");
        path_opts.emplace_back(sub, paths);
    };

    for (const char* name :
         {"atmosphere", "gdd", "metric", "pulse-demo", "link", "sweep", "scramble-demo"})
        add_common(app.add_subcommand(name, name));

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        ScenarioConfig cfg = defaults();
        if (!preset.empty())
            for (const auto& [k, v] : preset_config(preset)) cfg[k] = v;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw Error("io", "cannot open config file '" + config_path + "'");
            std::ostringstream ss;
            ss << f.rdbuf();
            for (const auto& [k, v] : parse_config_text(ss.str())) {
                if (!kValidKeys.count(k)) {
                    err << "usage error: unknown config key '" << k << "'\n";
                    return 2;
                }
                cfg[k] = v;
            }
        }
        for (const Binding& b : bindings)
            if (b.opt->count() > 0) cfg[b.key] = *b.value;
        for (const auto& [sub, paths] : path_opts) {
            if (!sub->parsed() || paths->empty()) continue;
            std::string joined;
            for (const std::string& p : *paths) {
                if (!joined.empty()) joined += ';';
                joined += p;
            }
            cfg["channel.paths"] = joined;
        }
        for (const auto& [k, v] : cfg) {
            if (!kValidKeys.count(k)) {
                err << "usage error: unknown config key '" << k << "'\n";
                return 2;
            }
        }

        if (dump_config) {
            for (const auto& [k, v] : cfg) out << k << " = " << v << "\n";
            return 0;
        }

        if (app.got_subcommand("atmosphere")) return run_atmosphere(cfg, out);
        if (app.got_subcommand("gdd")) return run_gdd(cfg, out);
        if (app.got_subcommand("metric")) return run_metric(cfg, out);
        if (app.got_subcommand("pulse-demo")) return run_pulse_demo(cfg, out);
        if (app.got_subcommand("link")) return run_sweep(cfg, out, true);
        if (app.got_subcommand("sweep")) return run_sweep(cfg, out, false);
        if (app.got_subcommand("scramble-demo")) return run_scramble_demo(cfg, out);
        err << "usage error: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace thz::cli
