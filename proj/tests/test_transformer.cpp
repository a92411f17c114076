#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rql/error.hpp"
#include "rql/transformer.hpp"

using namespace rql;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

double worst_rl(const std::vector<SParamPoint>& s) {
    double w = INFINITY;
    for (const auto& p : s) w = std::min(w, p.return_loss_db());
    return w;
}

}  // namespace

TEST_CASE("one quarter-wave section is the geometric mean") {
    TransformerSpec s;
    s.n_sections = 1;
    s.z_load_ohm = 4.0;
    const auto d = design_transformer(s);
    REQUIRE(d.section_impedances_ohm.size() == 1);
    CHECK(d.section_impedances_ohm[0] == doctest::Approx(std::sqrt(200.0)));
    const double f0 = s.f_center_hz;
    const auto p = cascade_sparams(d, std::span(&f0, 1));
    CHECK(std::abs(p[0].s11) < 1e-12);
    CHECK(std::abs(p[0].s21) == doctest::Approx(1.0));
}

TEST_CASE("six-section Chebyshev 50 to 4 ohm") {
    const auto d = design_transformer(TransformerSpec{});
    REQUIRE(d.section_impedances_ohm.size() == 6);
    // monotone staircase between the terminations
    CHECK(d.section_impedances_ohm.front() < 50.0);
    CHECK(d.section_impedances_ohm.back() > 4.0);
    CHECK(std::is_sorted(d.section_impedances_ohm.rbegin(), d.section_impedances_ohm.rend()));
    // symmetric reflections
    for (std::size_t k = 0; k < d.reflections.size(); ++k) {
        CHECK(d.reflections[k] == doctest::Approx(d.reflections[d.reflections.size() - 1 - k]));
    }
    // ln Z accumulates to the load
    double sum = 0.0;
    for (double g : d.reflections) sum += 2.0 * g;
    CHECK(std::exp(std::log(50.0) + sum) == doctest::Approx(4.0));
    CHECK(d.fractional_bandwidth ==
          doctest::Approx(chebyshev_fractional_bandwidth(50.0, 4.0, 6, -30.0)));
    CHECK(d.fractional_bandwidth > 1.0);
}

TEST_CASE("exact cascade holds 27 dB over 5-10 GHz") {
    const auto d = design_transformer(TransformerSpec{});
    const auto band = linspace(5e9, 10e9, 501);
    const auto s = cascade_sparams(d, band);
    CHECK(worst_rl(s) >= 27.0);
}

TEST_CASE("lossless cascade conserves power") {
    for (auto syn : {Synthesis::Chebyshev, Synthesis::Binomial}) {
        TransformerSpec spec;
        spec.synthesis = syn;
        const auto d = design_transformer(spec);
        const auto s = cascade_sparams(d, linspace(0.1e9, 30e9, 300));
        for (const auto& p : s) {
            CHECK(std::abs(std::norm(p.s11) + std::norm(p.s21) - 1.0) < 1e-10);
            CHECK(std::abs(std::norm(p.s22) + std::norm(p.s21) - 1.0) < 1e-10);
            CHECK(std::abs(p.s11) == doctest::Approx(std::abs(p.s22)));
        }
    }
}

TEST_CASE("reversing the network swaps the ports") {
    TransformerSpec fwd;
    TransformerSpec rev;
    rev.z_source_ohm = 4.0;
    rev.z_load_ohm = 50.0;
    const auto a = design_transformer(fwd);
    const auto b = design_transformer(rev);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(a.section_impedances_ohm[k] == doctest::Approx(b.section_impedances_ohm[5 - k]));
    }
    const auto f = linspace(2e9, 14e9, 25);
    const auto sa = cascade_sparams(a, f);
    const auto sb = cascade_sparams(b, f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(sa[i].s11 - sb[i].s22) < 1e-9);
        CHECK(std::abs(sa[i].s21 - sb[i].s21) < 1e-9);
    }
}

TEST_CASE("binomial design is maximally flat at the centre") {
    TransformerSpec spec;
    spec.synthesis = Synthesis::Binomial;
    const auto d = design_transformer(spec);
    // binomial reflections: proportional to C(6, k)
    const double c[] = {1, 6, 15, 20, 15, 6, 1};
    for (int k = 0; k <= 6; ++k) CHECK(d.reflections[k] / d.reflections[0] == doctest::Approx(c[k]));
    const double f0 = spec.f_center_hz;
    const double off[] = {0.98 * f0, f0, 1.02 * f0};
    const auto s = cascade_sparams(d, off);
    CHECK(s[1].return_loss_db() > 60.0);
    CHECK(s[0].return_loss_db() > 50.0);
    // Chebyshev trades that flatness for width
    const auto cheb = design_transformer(TransformerSpec{});
    const double edge = 5e9;
    CHECK(cascade_sparams(cheb, std::span(&edge, 1))[0].return_loss_db() >
          cascade_sparams(d, std::span(&edge, 1))[0].return_loss_db());
}

TEST_CASE("a band the design cannot hold reports the achievable ripple") {
    TransformerSpec spec;
    spec.n_sections = 2;
    spec.band_lo_hz = 2e9;
    spec.band_hi_hz = 13e9;
    try {
        (void)design_transformer(spec);
        FAIL("expected DesignError");
    } catch (const DesignError& e) {
        CHECK(e.achievable_ripple_db() > spec.ripple_db);
        CHECK(e.achievable_ripple_db() ==
              doctest::Approx(chebyshev_achievable_ripple_db(50.0, 4.0, 2, 2e9, 13e9, 7.5e9)));
        // relaxing the ripple to the reported value succeeds
        spec.ripple_db = e.achievable_ripple_db() + 1e-9;
        CHECK_NOTHROW(design_transformer(spec));
    }
    spec = {};
    spec.band_lo_hz = 5e9;
    spec.band_hi_hz = 10e9;
    CHECK_NOTHROW(design_transformer(spec));
}

TEST_CASE("achievable ripple improves with more sections") {
    double prev = 0.0;
    for (int n = 1; n <= 8; ++n) {
        const double r = chebyshev_achievable_ripple_db(50.0, 4.0, n, 5e9, 10e9, 7.5e9);
        CHECK(r < prev);
        prev = r;
    }
    CHECK(chebyshev_achievable_ripple_db(50.0, 4.0, 3, 1e9, 16e9, 7.5e9) == 0.0);
}

TEST_CASE("transformer argument errors") {
    TransformerSpec s;
    s.z_load_ohm = 0.0;
    CHECK_THROWS_AS(design_transformer(s), ParameterError);
    s = {};
    s.z_load_ohm = 50.0;
    CHECK_THROWS_AS(design_transformer(s), ParameterError);
    s = {};
    s.n_sections = 0;
    CHECK_THROWS_AS(design_transformer(s), ParameterError);
    s = {};
    s.f_center_hz = 0.0;
    CHECK_THROWS_AS(design_transformer(s), ParameterError);
    s = {};
    s.ripple_db = 1.0;
    CHECK_THROWS_AS(design_transformer(s), ParameterError);
    s = {};
    s.band_lo_hz = 5e9;
    CHECK_THROWS_AS(design_transformer(s), ParameterError);
    CHECK_THROWS_AS(chebyshev_achievable_ripple_db(50, 4, 6, 10e9, 5e9, 7.5e9), ParameterError);

    const auto d = design_transformer(TransformerSpec{});
    const double bad = -1.0;
    CHECK_THROWS_AS(cascade_sparams(d, std::span(&bad, 1)), ParameterError);
    CHECK_THROWS_AS(cascade_sparams(TransformerDesign{}, std::span(&bad, 1)), ParameterError);
}
