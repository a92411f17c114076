#include "rql/transformer.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "rql/error.hpp"

namespace rql {

namespace {

using cplx = std::complex<double>;

double chebyshev_t(int n, double x) {
    if (std::abs(x) <= 1.0) return std::cos(n * std::acos(x));
    const double v = std::cosh(n * std::acosh(std::abs(x)));
    return (x < 0.0 && n % 2 == 1) ? -v : v;
}

double ripple_linear(double ripple_db) { return std::pow(10.0, ripple_db / 20.0); }

void check_impedances(double zs, double zl, int n) {
    if (!(zs > 0.0 && zl > 0.0)) throw ParameterError("impedances must be positive");
    if (zs == zl) throw ParameterError("source and load impedances are equal; nothing to match");
    if (n < 1) throw ParameterError("need at least one section");
}

// sec(theta_m) of an N-section equal-ripple design.
double sec_theta_m(double zs, double zl, int n, double gamma_m) {
    const double ratio = std::abs(0.5 * std::log(zl / zs)) / gamma_m;
    if (ratio <= 1.0) return 1.0;  // ripple wider than the whole mismatch
    return std::cosh(std::acosh(ratio) / n);
}

}  // namespace

double chebyshev_fractional_bandwidth(double zs, double zl, int n, double ripple_db) {
    check_impedances(zs, zl, n);
    if (!(ripple_db < 0.0)) throw ParameterError("ripple must be negative dB");
    const double theta_m = std::acos(1.0 / sec_theta_m(zs, zl, n, ripple_linear(ripple_db)));
    return 2.0 - 4.0 * theta_m / std::numbers::pi;
}

double chebyshev_achievable_ripple_db(double zs, double zl, int n, double lo, double hi, double f0) {
    check_impedances(zs, zl, n);
    if (!(lo > 0.0 && hi > lo && f0 > 0.0)) throw ParameterError("band must satisfy 0 < lo < hi");
    // The passband is symmetric about f0; the tighter edge sets theta_m.
    const double theta_lo = 0.5 * std::numbers::pi * lo / f0;
    const double theta_hi = std::numbers::pi - 0.5 * std::numbers::pi * hi / f0;
    const double theta_m = std::min(theta_lo, theta_hi);
    if (!(theta_m > 0.0)) return 0.0;  // band reaches dc or 2 f0: unmatched there
    const double gamma = std::abs(0.5 * std::log(zl / zs)) / chebyshev_t(n, 1.0 / std::cos(theta_m));
    return 20.0 * std::log10(gamma);
}

TransformerDesign design_transformer(const TransformerSpec& spec) {
    const int n = spec.n_sections;
    check_impedances(spec.z_source_ohm, spec.z_load_ohm, n);
    if (!(spec.f_center_hz > 0.0)) throw ParameterError("centre frequency must be positive");

    TransformerDesign d;
    d.z_source_ohm = spec.z_source_ohm;
    d.z_load_ohm = spec.z_load_ohm;
    d.n_sections = n;
    d.f_center_hz = spec.f_center_hz;
    d.synthesis = spec.synthesis;

    const double log_ratio = std::log(spec.z_load_ohm / spec.z_source_ohm);
    d.reflections.assign(n + 1, 0.0);

    if (spec.synthesis == Synthesis::Binomial) {
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            d.reflections[k] = 0.5 * std::ldexp(binom, -n) * log_ratio;
            binom = binom * (n - k) / (k + 1);
        }
    } else {
        if (!(spec.ripple_db < 0.0)) throw ParameterError("ripple must be negative dB");
        if (spec.band_lo_hz || spec.band_hi_hz) {
            if (!(spec.band_lo_hz && spec.band_hi_hz)) throw ParameterError("band needs both edges");
            const double need = chebyshev_achievable_ripple_db(spec.z_source_ohm, spec.z_load_ohm, n,
                                                               *spec.band_lo_hz, *spec.band_hi_hz,
                                                               spec.f_center_hz);
            if (need > spec.ripple_db) {
                throw DesignError("a " + std::to_string(n) + "-section design cannot hold " +
                                      std::to_string(spec.ripple_db) + " dB over the band; best is " +
                                      std::to_string(need) + " dB",
                                  need);
            }
        }
        const double sec_m = sec_theta_m(spec.z_source_ohm, spec.z_load_ohm, n, ripple_linear(spec.ripple_db));
        // Gamma(theta) e^{jN theta} = A T_N(sec_m cos theta) = sum_n Gamma_n cos((N - 2n) theta),
        // with A fixed by theta = 0 giving the full log mismatch.
        const double amp = 0.5 * log_ratio / chebyshev_t(n, sec_m);
        // Cosine-series coefficients of a degree-N trig polynomial from 4N+4 samples.
        const int m = 4 * n + 4;
        std::vector<double> c(n + 1, 0.0);
        for (int s = 0; s < m; ++s) {
            const double th = 2.0 * std::numbers::pi * s / m;
            const double f = amp * chebyshev_t(n, sec_m * std::cos(th));
            for (int k = 0; k <= n; ++k) c[k] += f * std::cos(k * th) / m;
        }
        for (int k = 1; k <= n; ++k) c[k] *= 2.0;
        for (int j = 0; j <= n; ++j) {
            const int harmonic = std::abs(n - 2 * j);
            d.reflections[j] = harmonic == 0 ? c[0] : 0.5 * c[harmonic];
        }
        d.fractional_bandwidth = 2.0 - 4.0 * std::acos(1.0 / sec_m) / std::numbers::pi;
    }

    double log_z = std::log(spec.z_source_ohm);
    for (int k = 0; k < n; ++k) {
        log_z += 2.0 * d.reflections[k];
        d.section_impedances_ohm.push_back(std::exp(log_z));
    }
    return d;
}

double SParamPoint::return_loss_db() const {
    const double mag = std::abs(s11);
    if (mag == 0.0) return std::numeric_limits<double>::infinity();
    return -20.0 * std::log10(mag);
}

std::vector<SParamPoint> cascade_sparams(const TransformerDesign& d, std::span<const double> freqs) {
    if (d.section_impedances_ohm.empty()) throw ParameterError("design has no sections");
    const double z1 = d.z_source_ohm;
    const double z2 = d.z_load_ohm;
    std::vector<SParamPoint> out;
    out.reserve(freqs.size());
    for (double f : freqs) {
        if (!(f > 0.0)) throw ParameterError("frequencies must be positive");
        const double theta = 0.5 * std::numbers::pi * f / d.f_center_hz;
        const double cs = std::cos(theta);
        const double sn = std::sin(theta);
        // [A B; C D] accumulated left to right.
        cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, dd{1.0, 0.0};
        for (double z : d.section_impedances_ohm) {
            const cplx sa{cs, 0.0}, sb{0.0, z * sn}, sc{0.0, sn / z}, sd{cs, 0.0};
            const cplx na = a * sa + b * sc;
            const cplx nb = a * sb + b * sd;
            const cplx nc = c * sa + dd * sc;
            const cplx nd = c * sb + dd * sd;
            a = na;
            b = nb;
            c = nc;
            dd = nd;
        }
        const cplx denom = a * z2 + b + c * z1 * z2 + dd * z1;
        SParamPoint p;
        p.frequency_hz = f;
        p.s11 = (a * z2 + b - c * z1 * z2 - dd * z1) / denom;
        p.s21 = 2.0 * std::sqrt(z1 * z2) / denom;
        p.s22 = (-a * z2 + b - c * z1 * z2 + dd * z1) / denom;
        out.push_back(p);
    }
    return out;
}

}  // namespace rql
