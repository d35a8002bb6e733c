#include "afcsim/optimize.hpp"

#include <cmath>
#include <cstddef>

#include "afcsim/errors.hpp"

namespace afcsim {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace

BfgsResult bfgs_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                         const BfgsOptions& options) {
    const std::size_t n = x0.size();
    std::vector<double> h(n * n, 0.0);  // inverse Hessian approximation
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;

    std::vector<double> x = std::move(x0);
    std::vector<double> g(n), g_new(n), d(n), x_new(n), s(n), y(n), hy(n);
    double fx = objective(x, &g);

    BfgsResult result;
    result.converged = false;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (norm2(g) < options.gradient_tol) {
            result.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += h[i * n + j] * g[j];
            d[i] = -v;
        }
        double slope = dot(g, d);
        if (slope >= 0.0) {
            // Lost positive definiteness: fall back to steepest descent.
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = -dot(g, g);
        }

        // Backtracking Armijo search.
        double step = 1.0;
        double f_new = fx;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
            f_new = objective(x_new, nullptr);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            result.converged = true;  // no descent left at step_tol scale
            break;
        }

        objective(x_new, &g_new);
        double step_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
            step_norm += s[i] * s[i];
        }
        step_norm = std::sqrt(step_norm);

        const double sy = dot(s, y);
        if (sy > 1e-12 * norm2(s) * norm2(y)) {
            // BFGS inverse update:
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T, r = 1/(s.y)
            const double r = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t j = 0; j < n; ++j) v += h[i * n + j] * y[j];
                hy[i] = v;
            }
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h[i * n + j] += r * r * (sy + yhy) * s[i] * s[j] -
                                    r * (hy[i] * s[j] + s[i] * hy[j]);
        }

        x = x_new;
        g = g_new;
        fx = f_new;
        if (step_norm < options.step_tol) {
            result.converged = true;
            ++iter;
            break;
        }
    }

    result.x = std::move(x);
    result.fx = fx;
    result.iterations = iter;
    return result;
}

std::vector<double> solve_symmetric(std::vector<double> a, std::vector<double> b, double ridge) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw ConfigError("solve_symmetric: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += ridge;

    // Gaussian elimination with partial pivoting.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[perm[col] * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[perm[r] * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300) throw NumericalError("solve_symmetric: singular system");
        std::swap(perm[col], perm[pivot]);
        const std::size_t prow = perm[col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const std::size_t row = perm[r];
            const double factor = a[row * n + col] / a[prow * n + col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[row * n + c] -= factor * a[prow * n + c];
            b[row] -= factor * b[prow];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t row = perm[i];
        double v = b[row];
        for (std::size_t c = i + 1; c < n; ++c) v -= a[row * n + c] * x[c];
        x[i] = v / a[row * n + i];
    }
    return x;
}

} // namespace afcsim
