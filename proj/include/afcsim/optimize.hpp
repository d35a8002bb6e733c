#ifndef AFCSIM_OPTIMIZE_HPP
#define AFCSIM_OPTIMIZE_HPP

#include <functional>
#include <vector>

namespace afcsim {

// Objective callback: returns f(x) and, when grad != nullptr, fills the
// gradient (same length as x).
using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>*)>;

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-8;  // ||g||_2 convergence
    double step_tol = 1e-10;     // ||dx||_2 convergence
};

struct BfgsResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Dense BFGS with backtracking Armijo line search. Dimensions here are
// small (16), so the inverse Hessian is kept explicitly.
BfgsResult bfgs_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                         const BfgsOptions& options = {});

// Solves A x = b for a small dense symmetric system by Gaussian elimination
// with partial pivoting; `ridge` is added to the diagonal first.
std::vector<double> solve_symmetric(std::vector<double> a, std::vector<double> b,
                                    double ridge = 0.0);

} // namespace afcsim

#endif
