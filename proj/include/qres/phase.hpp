#ifndef QRES_PHASE_HPP
#define QRES_PHASE_HPP

#include <cmath>
#include <numbers>
#include <variant>

#include "qres/core.hpp"

namespace qres {

/// Phase distribution p(phi) on [0, 2pi): named family, discrete phase
/// mixture, or periodic tabulated samples with linear interpolation.
class PhaseDistribution {
  public:
    struct Uniform {};
    struct WrappedGaussian {
        double mu;
        double sigma;
    };
    /// Two flat sections of width w centred at +delta/2 and -delta/2
    /// (i.e. shifted from 0 and 2pi by delta/2), each of mass 1/2.
    struct TwoFlat {
        double w;
        double delta;
    };
    struct PointMixture {
        std::vector<std::pair<double, double>> atoms;  // (phase, weight)
    };
    struct Tabulated {
        std::vector<double> samples;  // values at phi_j = 2pi j / n, periodic
    };

    using Family = std::variant<Uniform, WrappedGaussian, TwoFlat, PointMixture, Tabulated>;

    explicit PhaseDistribution(Family family) : family_(std::move(family)) { validate(); }

    static PhaseDistribution uniform() { return PhaseDistribution(Uniform{}); }
    static PhaseDistribution wrapped_gaussian(double mu, double sigma) {
        return PhaseDistribution(WrappedGaussian{mu, sigma});
    }
    static PhaseDistribution two_flat(double w, double delta) {
        return PhaseDistribution(TwoFlat{w, delta});
    }
    static PhaseDistribution point_mixture(std::vector<std::pair<double, double>> atoms) {
        return PhaseDistribution(PointMixture{std::move(atoms)});
    }
    static PhaseDistribution tabulated(std::vector<double> samples) {
        return PhaseDistribution(Tabulated{std::move(samples)});
    }

    bool is_discrete() const { return std::holds_alternative<PointMixture>(family_); }
    const Family& family() const { return family_; }

    /// Density at phi (continuous families only).
    double density(double phi) const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        phi = std::fmod(phi, two_pi);
        if (phi < 0) phi += two_pi;
        if (std::holds_alternative<Uniform>(family_)) return 1.0 / two_pi;
        if (const auto* g = std::get_if<WrappedGaussian>(&family_)) {
            const int wraps = static_cast<int>(std::ceil(6.0 * g->sigma / two_pi)) + 1;
            double acc = 0.0;
            for (int k = -wraps; k <= wraps; ++k) {
                const double x = phi - g->mu + two_pi * k;
                acc += std::exp(-x * x / (2.0 * g->sigma * g->sigma));
            }
            return acc / (g->sigma * std::sqrt(two_pi));
        }
        if (const auto* f = std::get_if<TwoFlat>(&family_)) {
            const double h = 0.5 / f->w;
            auto inside = [&](double centre) {
                double d = std::fmod(phi - centre, two_pi);
                if (d < 0) d += two_pi;
                if (d > std::numbers::pi) d -= two_pi;
                return std::abs(d) <= f->w / 2;
            };
            double acc = 0.0;
            if (inside(f->delta / 2)) acc += h;
            if (inside(two_pi - f->delta / 2)) acc += h;
            return acc;
        }
        if (const auto* t = std::get_if<Tabulated>(&family_)) {
            const std::size_t n = t->samples.size();
            const double x = phi / two_pi * n;
            const std::size_t j = static_cast<std::size_t>(x) % n;
            const double frac = x - std::floor(x);
            return (1 - frac) * t->samples[j] + frac * t->samples[(j + 1) % n];
        }
        throw std::logic_error("PhaseDistribution: density of a discrete mixture");
    }

    const std::vector<std::pair<double, double>>& atoms() const {
        return std::get<PointMixture>(family_).atoms;
    }

  private:
    void validate() const {
        if (const auto* g = std::get_if<WrappedGaussian>(&family_)) {
            if (g->sigma <= 0) throw ValidationError("PhaseDistribution: sigma must be positive");
        } else if (const auto* f = std::get_if<TwoFlat>(&family_)) {
            if (f->w <= 0 || f->w > std::numbers::pi)
                throw ValidationError("PhaseDistribution: section width out of range");
        } else if (const auto* p = std::get_if<PointMixture>(&family_)) {
            double total = 0.0;
            for (auto& [phi, wgt] : p->atoms) {
                if (wgt < 0) throw ValidationError("PhaseDistribution: negative weight");
                total += wgt;
            }
            if (std::abs(total - 1.0) > 1e-6)
                throw ValidationError("PhaseDistribution: weights do not sum to 1");
        } else if (const auto* t = std::get_if<Tabulated>(&family_)) {
            if (t->samples.size() < 2)
                throw ValidationError("PhaseDistribution: need at least 2 samples");
            for (double v : t->samples)
                if (v < 0) throw ValidationError("PhaseDistribution: negative density sample");
            if (std::abs(quadrature_total(*this) - 1.0) > 1e-6)
                throw ValidationError("PhaseDistribution: samples do not integrate to 1");
        }
    }

    static double quadrature_total(const PhaseDistribution& p);

    Family family_;
};

namespace detail {

/// Composite trapezoid of f over [0, 2pi), n uniform points (periodic).
template <typename F>
auto periodic_trapezoid(F&& f, int n) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    decltype(f(0.0)) acc{};
    for (int j = 0; j < n; ++j) acc += f(two_pi * j / n);
    return acc * (two_pi / n);
}

/// Doubles the resolution, starting from 2^14 points, until two successive
/// estimates agree; the 2^14 baseline is spectrally accurate for smooth p.
template <typename F>
auto refined_trapezoid(F&& f, double tol, int* points_used = nullptr) {
    int n = 1 << 14;
    auto prev = periodic_trapezoid(f, n / 2);
    auto curr = periodic_trapezoid(f, n);
    while (std::abs(curr - prev) > tol && n < (1 << 22)) {
        n *= 2;
        prev = curr;
        curr = periodic_trapezoid(f, n);
    }
    if (points_used) *points_used = n;
    return curr;
}

}  // namespace detail

inline double PhaseDistribution::quadrature_total(const PhaseDistribution& p) {
    return detail::refined_trapezoid([&](double phi) { return p.density(phi); }, 1e-9);
}

/// g = -i * integral of p(phi) exp(i phi) dphi; discrete mixtures are summed
/// exactly, continuous families use the refined periodic trapezoid rule.
inline Complex g_from_phase_dist(const PhaseDistribution& p) {
    if (p.is_discrete()) {
        Complex acc = 0.0;
        for (auto& [phi, wgt] : p.atoms()) acc += wgt * std::exp(Complex(0, phi));
        return Complex(0, -1) * acc;
    }
    Complex integral = detail::refined_trapezoid(
        [&](double phi) { return p.density(phi) * std::exp(Complex(0, phi)); }, 0.5e-8);
    return Complex(0, -1) * integral;
}

}  // namespace qres

#endif  // QRES_PHASE_HPP
