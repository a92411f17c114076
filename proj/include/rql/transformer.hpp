#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace rql {

enum class Synthesis { Chebyshev, Binomial };

struct TransformerSpec {
    double z_source_ohm = 50.0;
    double z_load_ohm = 4.0;
    int n_sections = 6;
    double f_center_hz = 7.5e9;
    /// Equal-ripple level of |Gamma| in the passband, dB (negative).
    double ripple_db = -30.0;
    /// Band that must sit inside the ripple level. When set, the design
    /// fails with the achievable ripple if n_sections cannot cover it.
    std::optional<double> band_lo_hz;
    std::optional<double> band_hi_hz;
    Synthesis synthesis = Synthesis::Chebyshev;
};

/// Cascade of quarter-wave sections between source and load.
struct TransformerDesign {
    double z_source_ohm = 0.0;
    double z_load_ohm = 0.0;
    int n_sections = 0;
    double f_center_hz = 0.0;
    Synthesis synthesis = Synthesis::Chebyshev;
    /// Junction reflection coefficients Gamma_0..Gamma_N (small-reflection).
    std::vector<double> reflections;
    std::vector<double> section_impedances_ohm;
    /// Equal-ripple band edges predicted by the synthesis (Chebyshev only).
    double fractional_bandwidth = 0.0;
};

/// Small-reflection multisection synthesis. Impedances follow
/// ln Z_{n+1} = ln Z_n + 2 Gamma_n, which lands on the load exactly.
TransformerDesign design_transformer(const TransformerSpec& spec);

/// Equal-ripple fractional bandwidth 2 - 4 theta_m / pi of an N-section
/// Chebyshev design with the given ripple.
double chebyshev_fractional_bandwidth(double z_source_ohm, double z_load_ohm, int n_sections,
                                      double ripple_db);

/// Ripple an N-section Chebyshev design needs to hold the given band.
double chebyshev_achievable_ripple_db(double z_source_ohm, double z_load_ohm, int n_sections,
                                      double band_lo_hz, double band_hi_hz, double f_center_hz);

struct SParamPoint {
    double frequency_hz = 0.0;
    std::complex<double> s11;
    std::complex<double> s21;
    std::complex<double> s22;

    double return_loss_db() const;
};

/// Exact lossless chain-matrix cascade of the sections, port 1 referenced
/// to the source impedance and port 2 to the load. The network is
/// reciprocal, so S12 = S21.
std::vector<SParamPoint> cascade_sparams(const TransformerDesign& design,
                                         std::span<const double> frequencies_hz);

}  // namespace rql
