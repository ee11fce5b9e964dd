// Small numerical kernels shared across the library: Lambert W, the normal
// inverse CDF, bracketed 1-D optimization/root finding, and Gauss-Hermite
// quadrature rules.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hasim {

/// Principal branch of the Lambert W function, w * exp(w) = y, for y >= 0.
/// Newton iteration on f(w) = w + log(w) - log(y) for large y, and on
/// w*exp(w) - y directly for small y; accurate to ~1e-15 relative.
inline double lambert_w0(double y) {
    if (y < 0.0) throw std::domain_error("lambert_w0: negative argument");
    if (y == 0.0) return 0.0;
    double w;
    if (y < 1.0) {
        // series start, then Newton on w e^w = y
        w = y * (1.0 - y + 1.5 * y * y);
        for (int i = 0; i < 32; ++i) {
            double e = std::exp(w);
            double f = w * e - y;
            double step = f / (e * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
            w -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
        }
    } else {
        double ly = std::log(y);
        w = ly > 1.0 ? ly - std::log(ly) : 0.5;
        // Newton on w + log w = log y
        for (int i = 0; i < 48; ++i) {
            double f = w + std::log(w) - ly;
            double step = f * w / (w + 1.0);
            w -= step;
            if (w <= 0.0) w = 1e-300;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
        }
    }
    return w;
}

/// Lambert W0 of exp(ly), stable when exp(ly) would overflow.
inline double lambert_w0_exp(double ly) {
    if (ly < 700.0) return lambert_w0(std::exp(ly));
    double w = ly - std::log(ly);
    for (int i = 0; i < 48; ++i) {
        double f = w + std::log(w) - ly;
        double step = f * w / (w + 1.0);
        w -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
}

/// Inverse CDF of the standard normal (Wichura's AS241, PPND16).
/// Absolute error below 1e-15 over (0,1).
inline double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_ppf: p outside (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -v : v;
}

/// Maximizes a unimodal function on [lo, hi] by golden-section search.
/// Returns the argmax to absolute tolerance tol; ties resolve toward lo.
inline double golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double tol = 1e-6) {
    const double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

/// Finds the smallest x in [lo, hi] with f(x) >= 0 by bisection, assuming
/// f(lo) < 0 <= f(hi). Tolerance is absolute in x.
inline double bisect_first_nonneg(const std::function<double(double)>& f,
                                  double lo, double hi, double tol = 1e-6) {
    double a = lo, b = hi;
    for (int i = 0; i < 200 && b - a > tol; ++i) {
        double m = 0.5 * (a + b);
        if (f(m) >= 0.0) b = m; else a = m;
    }
    return b;
}

/// Gauss-Hermite rule: integral f(z) exp(-z^2) dz ~= sum w_i f(z_i).
/// Nodes by Newton iteration on the Hermite recurrence.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussHermite(std::size_t n) {
        if (n < 2) throw std::invalid_argument("GaussHermite: need n >= 2");
        nodes.resize(n);
        weights.resize(n);
        const double sqrt_pi = std::sqrt(M_PI);
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            // Stroud-Secrest style initial guesses
            double z;
            if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
            else if (i == 1) z = nodes[n - 1] - 1.14 * std::pow((double)n, 0.426) / nodes[n - 1];
            else if (i == 2) z = 1.86 * nodes[n - 2] - 0.86 * nodes[n - 1];
            else if (i == 3) z = 1.91 * nodes[n - 3] - 0.91 * nodes[n - 2];
            else z = 2.0 * nodes[n - i] - nodes[n - i + 1];
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // evaluate H~_n(z) (orthonormal recurrence) and derivative
                double p1 = 1.0 / std::sqrt(sqrt_pi), p2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                         std::sqrt((double)j / (j + 1.0)) * p3;
                }
                pp = std::sqrt(2.0 * n) * p2;
                double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            nodes[n - 1 - i] = z;
            nodes[i] = -z;
            weights[n - 1 - i] = 2.0 / (pp * pp);
            weights[i] = weights[n - 1 - i];
        }
    }

    /// E[f(X)] for X ~ N(mu, sigma) via change of variables.
    double expect(const std::function<double(double)>& f, double mu, double sigma) const {
        const double s = std::sqrt(2.0) * sigma;
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(mu + s * nodes[i]);
        return acc / std::sqrt(M_PI);
    }
};

}  // namespace hasim
