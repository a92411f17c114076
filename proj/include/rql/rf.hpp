#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace rql {

double dbm_to_watts(double dbm) noexcept;
double watts_to_dbm(double watts);
double db_to_power_ratio(double db) noexcept;
double power_ratio_to_db(double ratio);

/// Carrier power at the chip from applied and returned power: the geometric
/// mean, i.e. the average in dBm.
double geometric_mean_dbm(double applied_dbm, double returned_dbm) noexcept;

/// Clock-line observation: carrier power and single-sideband-to-carrier
/// ratio at the chop fundamental.
struct SidebandMeasurement {
    double p0_dbm = 0.0;
    double ssb_db = -70.0;
    double f_carrier_hz = 6.2e9;
    double f_mod_hz = 259e3;
};

void check_measurement(const SidebandMeasurement& m);

struct DissipationEstimate {
    /// Dissipated over carrier power, dP/P0.
    double ratio = 0.0;
    double watts = 0.0;

    double ratio_db() const { return power_ratio_to_db(ratio); }
};

/// Pure-AM bound: dP/P0 = 2 pi sqrt(P_SSB / P0).
DissipationEstimate ssb_power_upper_bound(const SidebandMeasurement& m);

/// AM share of the sideband power only: dP/P0 = 2 pi sqrt(f * P_SSB / P0).
/// f = 1 gives the pure-AM bound.
DissipationEstimate am_pm_corrected_power(const SidebandMeasurement& m,
                                          double am_power_fraction = 0.5);

/// Printed shorthand for the half-AM case: 8 + (SSB - 3) / 2 dB, which rounds
/// 10 log10(2 pi) = 7.98 up to 8.
double corrected_ratio_db_rounded(double ssb_db) noexcept;

struct ModulationFactors {
    double m_a = 0.0;  // AM depth
    double m_p = 0.0;  // PM depth, rad
};

/// Solves P_lo / P_hi = (1 - 2 m_a) / (1 + 2 m_a) for m_a.
double extract_ma(double p_lo_over_p_hi);

/// Solves dt = 2 m_p / omega_c for m_p.
double extract_mp(double delta_t_s, double f_carrier_hz);

/// Fundamental of a chopped data pattern, one bit per clock cycle.
double chop_fundamental(double f_clock_hz, double active_len, double zero_len);

/// Samples of V0 [1 + m_a sin(wm t)] sin(wc t + m_p sin(wm t)) at t = n / fs.
/// Requires fs > 4 fc and an integer number of samples per modulation period
/// across an integer number of periods.
std::vector<double> synthesize_modulated(double v0, const ModulationFactors& m, double f_carrier_hz,
                                         double f_mod_hz, double duration_s, double sample_rate_hz);

struct SidebandSpectrum {
    double carrier_amplitude = 0.0;
    /// Sideband-to-carrier power ratios.
    double lower_ratio = 0.0;
    double upper_ratio = 0.0;
    /// Complex envelope coefficients at +/- f_mod, relative to the carrier.
    std::complex<double> upper_rel;
    std::complex<double> lower_rel;
    /// Quadrature decomposition of the first sideband pair.
    ModulationFactors factors;

    double ssb_ratio() const noexcept { return 0.5 * (lower_ratio + upper_ratio); }
};

/// Coherent single-bin DFTs at fc and fc +/- fm over the whole record (no
/// window). fc and fm must fall on exact bins of the record.
SidebandSpectrum spectrum_sidebands(std::span<const double> samples, double sample_rate_hz,
                                    double f_carrier_hz, double f_mod_hz);

struct SpectrumPoint {
    double frequency_hz = 0.0;
    double power_dbm = 0.0;
};

struct SpectrumSsb {
    double carrier_hz = 0.0;
    double carrier_dbm = 0.0;
    double lower_db = 0.0;
    double upper_db = 0.0;
    /// Mean of the two sidebands in linear power, in dB relative to the carrier.
    double ssb_db = 0.0;
};

/// Locates the carrier (strongest point) and the points nearest fc +/- f_mod
/// in an analyser trace. Throws ParameterError if no point lies within
/// `tolerance_hz` of a sideband.
SpectrumSsb measure_ssb(std::span<const SpectrumPoint> spectrum, double f_mod_hz,
                        double tolerance_hz);

}  // namespace rql
