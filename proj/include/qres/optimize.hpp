#ifndef QRES_OPTIMIZE_HPP
#define QRES_OPTIMIZE_HPP

#include <algorithm>
#include <functional>
#include <random>

#include "qres/core.hpp"

namespace qres {

struct NelderMeadOptions {
    double ftol = 1e-8;
    int max_iters = 4000;
    double initial_step = 0.5;
};

struct OptimResult {
    RVec x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
    int restarts_used = 0;
};

/// Downhill simplex minimizer (no derivatives).
inline OptimResult nelder_mead(const std::function<double(const RVec&)>& f, RVec start,
                               const NelderMeadOptions& opt = {}) {
    const int n = static_cast<int>(start.size());
    const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;

    std::vector<RVec> xs(n + 1, start);
    std::vector<double> fs(n + 1);
    int evals = 0;
    for (int i = 1; i <= n; ++i) xs[i](i - 1) += opt.initial_step;
    for (int i = 0; i <= n; ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }

    std::vector<int> order(n + 1);
    bool converged = false;
    for (int iter = 0; iter < opt.max_iters; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(fs[worst] - fs[best]) <= opt.ftol) {
            converged = true;
            break;
        }
        RVec centroid = RVec::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= n;

        RVec xr = centroid + alpha * (centroid - xs[worst]);
        double fr = f(xr);
        ++evals;
        if (fr < fs[best]) {
            RVec xe = centroid + gamma * (xr - centroid);
            double fe = f(xe);
            ++evals;
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            RVec xc = outside ? RVec(centroid + beta * (xr - centroid))
                              : RVec(centroid - beta * (centroid - xs[worst]));
            double fc = f(xc);
            ++evals;
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    xs[i] = xs[best] + delta * (xs[i] - xs[best]);
                    fs[i] = f(xs[i]);
                    ++evals;
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best], evals, converged, 0};
}

/// Multistart wrapper. Start points come from `sample(rng)`; per-restart RNGs
/// are seeded by mix_seed(seed, index) so results do not depend on scheduling.
inline OptimResult multistart_minimize(const std::function<double(const RVec&)>& f,
                                       const std::function<RVec(std::mt19937_64&)>& sample,
                                       int restarts, std::uint64_t seed,
                                       const NelderMeadOptions& opt = {},
                                       const std::vector<RVec>& extra_starts = {}) {
    OptimResult best;
    best.value = kInf;
    int evals = 0;
    bool any_converged = false;
    for (std::size_t i = 0; i < extra_starts.size(); ++i) {
        OptimResult r = nelder_mead(f, extra_starts[i], opt);
        evals += r.evaluations;
        any_converged = any_converged || r.converged;
        if (r.value < best.value) best = r;
    }
    for (int i = 0; i < restarts; ++i) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        OptimResult r = nelder_mead(f, sample(rng), opt);
        evals += r.evaluations;
        any_converged = any_converged || r.converged;
        if (r.value < best.value) best = r;
    }
    best.evaluations = evals;
    best.converged = any_converged;
    best.restarts_used = restarts + static_cast<int>(extra_starts.size());
    return best;
}

}  // namespace qres

#endif  // QRES_OPTIMIZE_HPP
