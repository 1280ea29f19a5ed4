#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace spinglass {

struct SimplexResult {
    std::vector<double> point;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Classic Nelder-Mead downhill simplex (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Stops when the simplex value spread falls
/// below tol or after max_iter iterations.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start, std::vector<double> step,
                                 double tol = 1e-10, int max_iter = 2000) {
    const size_t dim = start.size();
    std::vector<std::vector<double>> pts(dim + 1, start);
    for (size_t i = 0; i < dim; ++i)
        pts[i + 1][i] += step[i];
    std::vector<double> vals(dim + 1);
    for (size_t i = 0; i <= dim; ++i)
        vals[i] = f(pts[i]);

    SimplexResult result;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        // order: best first, worst last
        std::vector<size_t> order(dim + 1);
        for (size_t i = 0; i <= dim; ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return vals[a] < vals[b]; });
        size_t best = order[0], worst = order[dim], second_worst = order[dim - 1];

        double spread = std::abs(vals[worst] - vals[best]);
        if (spread <= tol * (1.0 + std::abs(vals[best]))) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (size_t i = 0; i <= dim; ++i) {
            if (i == worst)
                continue;
            for (size_t d = 0; d < dim; ++d)
                centroid[d] += pts[i][d];
        }
        for (double& cd : centroid)
            cd /= static_cast<double>(dim);

        auto blend = [&](double alpha) {
            std::vector<double> p(dim);
            for (size_t d = 0; d < dim; ++d)
                p[d] = centroid[d] + alpha * (pts[worst][d] - centroid[d]);
            return p;
        };

        std::vector<double> reflected = blend(-1.0);
        double fr = f(reflected);
        if (fr < vals[best]) {
            std::vector<double> expanded = blend(-2.0);
            double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                vals[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            pts[worst] = std::move(reflected);
            vals[worst] = fr;
        } else {
            std::vector<double> contracted = blend(fr < vals[worst] ? -0.5 : 0.5);
            double fc = f(contracted);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = std::move(contracted);
                vals[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (size_t i = 0; i <= dim; ++i) {
                    if (i == best)
                        continue;
                    for (size_t d = 0; d < dim; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }

    size_t best = 0;
    for (size_t i = 1; i <= dim; ++i)
        if (vals[i] < vals[best])
            best = i;
    result.point = pts[best];
    result.value = vals[best];
    result.iterations = iter;
    return result;
}

} // namespace spinglass
