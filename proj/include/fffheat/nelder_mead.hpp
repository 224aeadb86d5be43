#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fffheat {

struct NelderMeadOptions {
    double spread_tol = 0.1;  // per-coordinate simplex extent at convergence
    int max_iterations = 400;
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

// Downhill simplex with box bounds (candidates are clamped). Converges when
// the simplex extent drops below spread_tol in every coordinate.
inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
    const std::vector<double>& step, const std::vector<double>& lo,
    const std::vector<double>& hi, const NelderMeadOptions& opt = {}) {
    const std::size_t d = start.size();
    if (step.size() != d || lo.size() != d || hi.size() != d)
        throw std::invalid_argument("nelder_mead: dimension mismatch");

    const auto clamp = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    };

    NelderMeadResult result;
    std::vector<std::vector<double>> v(d + 1, start);
    std::vector<double> fv(d + 1);
    clamp(v[0]);
    for (std::size_t i = 0; i < d; ++i) {
        v[i + 1][i] += step[i];
        clamp(v[i + 1]);
        // A vertex pinned to a bound collapses the simplex; push inward.
        if (v[i + 1][i] == v[0][i]) v[i + 1][i] = std::clamp(v[0][i] - step[i], lo[i], hi[i]);
    }
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(v[i]);
    result.evaluations = static_cast<int>(d) + 1;

    const auto order = [&]() {
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> v2(d + 1);
        std::vector<double> f2(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            v2[i] = v[idx[i]];
            f2[i] = fv[idx[i]];
        }
        v.swap(v2);
        fv.swap(f2);
    };

    const auto converged = [&]() {
        for (std::size_t i = 0; i < d; ++i) {
            double mn = v[0][i], mx = v[0][i];
            for (std::size_t k = 1; k <= d; ++k) {
                mn = std::min(mn, v[k][i]);
                mx = std::max(mx, v[k][i]);
            }
            if (mx - mn >= opt.spread_tol) return false;
        }
        return true;
    };

    for (int it = 0; it < opt.max_iterations; ++it) {
        order();
        result.iterations = it;
        if (converged()) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t i = 0; i < d; ++i) centroid[i] += v[k][i] / d;

        const auto make = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t i = 0; i < d; ++i)
                x[i] = centroid[i] + coef * (centroid[i] - v[d][i]);
            clamp(x);
            return x;
        };

        std::vector<double> xr = make(opt.reflection);
        const double fr = f(xr);
        ++result.evaluations;
        if (fr < fv[0]) {
            std::vector<double> xe = make(opt.expansion);
            const double fe = f(xe);
            ++result.evaluations;
            if (fe < fr) {
                v[d] = std::move(xe);
                fv[d] = fe;
            } else {
                v[d] = std::move(xr);
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            v[d] = std::move(xr);
            fv[d] = fr;
        } else {
            const bool outside = fr < fv[d];
            std::vector<double> xc;
            if (outside) {
                xc.resize(d);
                for (std::size_t i = 0; i < d; ++i)
                    xc[i] = centroid[i] + opt.contraction * (xr[i] - centroid[i]);
            } else {
                xc.resize(d);
                for (std::size_t i = 0; i < d; ++i)
                    xc[i] = centroid[i] + opt.contraction * (v[d][i] - centroid[i]);
            }
            clamp(xc);
            const double fc = f(xc);
            ++result.evaluations;
            if (fc < (outside ? fr : fv[d])) {
                v[d] = std::move(xc);
                fv[d] = fc;
            } else {
                for (std::size_t k = 1; k <= d; ++k) {
                    for (std::size_t i = 0; i < d; ++i)
                        v[k][i] = v[0][i] + opt.shrink * (v[k][i] - v[0][i]);
                    clamp(v[k]);
                    fv[k] = f(v[k]);
                    ++result.evaluations;
                }
            }
        }
    }
    order();
    result.x = v[0];
    result.value = fv[0];
    return result;
}

}  // namespace fffheat
