#include "rql/rf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rql/error.hpp"

namespace rql {

double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) throw DomainError("dBm of non-positive power");
    return 10.0 * std::log10(watts) + 30.0;
}

double db_to_power_ratio(double db) noexcept { return std::pow(10.0, db / 10.0); }

double power_ratio_to_db(double ratio) {
    if (!(ratio > 0.0)) throw DomainError("dB of non-positive ratio");
    return 10.0 * std::log10(ratio);
}

double geometric_mean_dbm(double applied_dbm, double returned_dbm) noexcept {
    return 0.5 * (applied_dbm + returned_dbm);
}

void check_measurement(const SidebandMeasurement& m) {
    if (!(m.ssb_db < 0.0)) throw DomainError("sideband ratio must be below the carrier (ssb_db < 0)");
    if (m.f_carrier_hz > 0.0 && m.f_mod_hz > 0.0 && !(m.f_mod_hz < m.f_carrier_hz)) {
        throw ParameterError("modulation frequency must be below the carrier");
    }
}

DissipationEstimate ssb_power_upper_bound(const SidebandMeasurement& m) {
    return am_pm_corrected_power(m, 1.0);
}

DissipationEstimate am_pm_corrected_power(const SidebandMeasurement& m, double fraction) {
    check_measurement(m);
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ParameterError("AM power fraction must lie in (0, 1]");
    }
    DissipationEstimate e;
    e.ratio = 2.0 * std::numbers::pi * std::sqrt(fraction * db_to_power_ratio(m.ssb_db));
    e.watts = e.ratio * dbm_to_watts(m.p0_dbm);
    return e;
}

double corrected_ratio_db_rounded(double ssb_db) noexcept { return 8.0 + 0.5 * (ssb_db - 3.0); }

double extract_ma(double r) {
    if (!(r > 0.0)) throw DomainError("power ratio must be positive");
    if (r > 1.0) throw DomainError("power ratio above 1: pass P_lo / P_hi, not its inverse");
    return (1.0 - r) / (2.0 * (1.0 + r));
}

double extract_mp(double delta_t_s, double f_carrier_hz) {
    if (delta_t_s < 0.0 || !(f_carrier_hz > 0.0)) {
        throw ParameterError("extract_mp needs dt >= 0 and a positive carrier");
    }
    return std::numbers::pi * f_carrier_hz * delta_t_s;
}

double chop_fundamental(double f_clock_hz, double active_len, double zero_len) {
    if (!(f_clock_hz > 0.0) || !(active_len > 0.0) || !(zero_len > 0.0)) {
        throw ParameterError("chop_fundamental needs positive clock and block lengths");
    }
    return f_clock_hz / (active_len + zero_len);
}

namespace {

bool near_integer(double x, double tol = 1e-6) { return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x)); }

// Sum of x[n] exp(-2 pi i k n / N) with the phase reduced modulo N exactly.
std::complex<double> dft_bin(std::span<const double> x, long long k) {
    const long long n_total = static_cast<long long>(x.size());
    const long long kk = ((k % n_total) + n_total) % n_total;
    std::complex<double> acc{0.0, 0.0};
    long long phase = 0;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n_total);
    for (long long n = 0; n < n_total; ++n) {
        const double ang = -step * static_cast<double>(phase);
        acc += x[static_cast<std::size_t>(n)] * std::complex<double>(std::cos(ang), std::sin(ang));
        phase += kk;
        if (phase >= n_total) phase -= n_total;
    }
    return acc;
}

}  // namespace

std::vector<double> synthesize_modulated(double v0, const ModulationFactors& m, double fc,
                                         double fm, double duration, double fs) {
    if (!(fc > 0.0 && fm > 0.0 && duration > 0.0 && fs > 0.0)) {
        throw ParameterError("synthesis frequencies and duration must be positive");
    }
    if (!(fs > 4.0 * fc)) throw ParameterError("sample rate must exceed 4x the carrier frequency");
    if (!(fm < fc)) throw ParameterError("modulation must be below the carrier");
    const double periods = duration * fm;
    const double per_period = fs / fm;
    if (!near_integer(periods) || !near_integer(per_period)) {
        throw ParameterError("duration and sample rate must span whole modulation periods");
    }
    const auto n = static_cast<std::size_t>(std::llround(periods) * std::llround(per_period));
    std::vector<double> out(n);
    const double wc = 2.0 * std::numbers::pi * fc;
    const double wm = 2.0 * std::numbers::pi * fm;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double sm = std::sin(wm * t);
        out[i] = v0 * (1.0 + m.m_a * sm) * std::sin(wc * t + m.m_p * sm);
    }
    return out;
}

SidebandSpectrum spectrum_sidebands(std::span<const double> samples, double fs, double fc,
                                    double fm) {
    if (samples.empty()) throw ParameterError("no samples");
    if (!(fs > 0.0 && fc > 0.0 && fm > 0.0 && fm < fc)) {
        throw ParameterError("spectrum analysis needs 0 < f_mod < f_carrier and fs > 0");
    }
    const double n = static_cast<double>(samples.size());
    const double kc = fc * n / fs;
    const double km = fm * n / fs;
    if (!near_integer(kc) || !near_integer(km)) {
        throw ParameterError("carrier and modulation must fall on exact bins of the record");
    }
    const long long ic = std::llround(kc);
    const long long im = std::llround(km);
    if (2 * (ic + im) >= static_cast<long long>(samples.size())) {
        throw ParameterError("upper sideband aliases; raise the sample rate");
    }
    const auto x0 = dft_bin(samples, ic);
    const auto xu = dft_bin(samples, ic + im);
    const auto xl = dft_bin(samples, ic - im);
    if (std::abs(x0) == 0.0) throw DomainError("no carrier present");

    SidebandSpectrum s;
    s.carrier_amplitude = 2.0 * std::abs(x0) / n;
    s.upper_rel = xu / x0;
    s.lower_rel = xl / x0;
    s.upper_ratio = std::norm(s.upper_rel);
    s.lower_ratio = std::norm(s.lower_rel);
    // A real envelope (AM) gives c_-1 = conj(c_1); a phase envelope gives
    // c_-1 = -conj(c_1). Each sideband coefficient is half the depth.
    const auto am = 0.5 * (s.upper_rel + std::conj(s.lower_rel));
    const auto pm = 0.5 * (s.upper_rel - std::conj(s.lower_rel));
    s.factors.m_a = 2.0 * std::abs(am);
    s.factors.m_p = 2.0 * std::abs(pm);
    return s;
}

SpectrumSsb measure_ssb(std::span<const SpectrumPoint> spectrum, double fm, double tol) {
    if (spectrum.empty()) throw ParameterError("empty spectrum");
    if (!(fm > 0.0) || !(tol > 0.0)) throw ParameterError("f_mod and tolerance must be positive");
    const auto carrier = std::max_element(spectrum.begin(), spectrum.end(),
                                          [](const SpectrumPoint& a, const SpectrumPoint& b) {
                                              return a.power_dbm < b.power_dbm;
                                          });
    auto nearest = [&](double f) -> const SpectrumPoint& {
        const SpectrumPoint* best = nullptr;
        for (const auto& p : spectrum) {
            if (!best || std::abs(p.frequency_hz - f) < std::abs(best->frequency_hz - f)) best = &p;
        }
        if (std::abs(best->frequency_hz - f) > tol) {
            throw ParameterError("no spectrum point near sideband at " + std::to_string(f) + " Hz");
        }
        return *best;
    };
    SpectrumSsb r;
    r.carrier_hz = carrier->frequency_hz;
    r.carrier_dbm = carrier->power_dbm;
    r.lower_db = nearest(r.carrier_hz - fm).power_dbm - r.carrier_dbm;
    r.upper_db = nearest(r.carrier_hz + fm).power_dbm - r.carrier_dbm;
    r.ssb_db = power_ratio_to_db(0.5 * (db_to_power_ratio(r.lower_db) + db_to_power_ratio(r.upper_db)));
    return r;
}

}  // namespace rql
