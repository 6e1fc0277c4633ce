// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_QUANTIZER_HPP
#define FDCF_QUANTIZER_HPP

#include <cmath>
#include <stdexcept>

#include "fdcf/util.hpp"

namespace fdcf {

/// Bussgang model of the mid-rise uniform quantizer acting on a unit-variance
/// Gaussian input: output = a_tilde * input + distortion, with the distortion
/// power b_tilde - a_tilde^2. nu = 0 is the perfect-fronthaul sentinel
/// (a_tilde = b_tilde = 1, no distortion).
struct QuantizerParams {
    int nu = 0;
    double delta = 0.0;
    double a_tilde = 1.0;
    double b_tilde = 1.0;

    double distortion() const { return b_tilde - a_tilde * a_tilde; }
    bool perfect() const { return nu == 0; }

    static QuantizerParams perfect_fronthaul() { return {}; }
};

/// Mid-rise uniform quantizer with 2^nu levels in steps of delta; the
/// outermost level saturates.
inline double midrise(double x, double delta, int nu) {
    if (delta <= 0.0) throw std::invalid_argument("midrise: delta must be > 0");
    if (nu < 1 || nu > 24) throw std::invalid_argument("midrise: nu out of range");
    const double half_levels = std::ldexp(1.0, nu - 1);  // 2^(nu-1)
    double idx = std::floor(std::fabs(x) / delta);
    if (idx > half_levels - 1.0) idx = half_levels - 1.0;
    return std::copysign(delta * (idx + 0.5), x);
}

namespace detail {

inline double normal_pdf(double x) {
    return 0.3989422804014326779399461 * std::exp(-0.5 * x * x);
}

/// P(X > x) for standard normal X, stable in the far tail.
inline double normal_tail(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244008444); }

}  // namespace detail

/// Bussgang coefficients of the mid-rise quantizer for a zero-mean
/// unit-variance Gaussian input, per real dimension:
///   a_tilde = E{x h(x)},  b_tilde = E{h(x)^2}.
/// Evaluated in closed form cell by cell; int_a^b x pdf(x) dx = pdf(a)-pdf(b).
inline std::pair<double, double> bussgang_coeffs(double delta, int nu) {
    if (delta <= 0.0) throw std::invalid_argument("bussgang_coeffs: delta must be > 0");
    if (nu < 1 || nu > 24) throw std::invalid_argument("bussgang_coeffs: nu out of range");
    const long half_levels = 1L << (nu - 1);
    double a = 0.0, b = 0.0;
    for (long i = 0; i < half_levels; ++i) {
        const double lo = static_cast<double>(i) * delta;
        const bool last = (i == half_levels - 1);
        const double y = (static_cast<double>(i) + 0.5) * delta;
        const double pdf_lo = detail::normal_pdf(lo);
        const double pdf_hi = last ? 0.0 : detail::normal_pdf(lo + delta);
        const double mass = last ? detail::normal_tail(lo)
                                 : detail::normal_tail(lo) - detail::normal_tail(lo + delta);
        a += 2.0 * y * (pdf_lo - pdf_hi);
        b += 2.0 * y * y * mass;
    }
    return {a, b};
}

inline double quantizer_sdr(double delta, int nu) {
    const auto [a, b] = bussgang_coeffs(delta, nu);
    const double dist = b - a * a;
    if (dist <= 0.0) return 0.0;
    return a * a / dist;
}

/// Finds the step size maximizing the signal-to-distortion ratio by
/// golden-section search on (0, 5]; every known optimum lies below 1.6.
inline QuantizerParams optimize_step(int nu, double tol = 1e-5) {
    if (nu == 0) return QuantizerParams::perfect_fronthaul();
    if (nu < 1 || nu > 8) throw std::invalid_argument("optimize_step: nu out of range {1..8}");
    const double gr = 0.6180339887498948482045868;  // 1/phi
    double lo = 1e-4, hi = 5.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = quantizer_sdr(x1, nu);
    double f2 = quantizer_sdr(x2, nu);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = quantizer_sdr(x2, nu);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = quantizer_sdr(x1, nu);
        }
    }
    QuantizerParams qp;
    qp.nu = nu;
    qp.delta = 0.5 * (lo + hi);
    const auto [a, b] = bussgang_coeffs(qp.delta, nu);
    qp.a_tilde = a;
    qp.b_tilde = b;
    return qp;
}

}  // namespace fdcf

#endif
