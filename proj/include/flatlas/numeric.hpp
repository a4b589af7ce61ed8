#ifndef FLATLAS_NUMERIC_HPP
#define FLATLAS_NUMERIC_HPP

#include <functional>
#include <optional>
#include <vector>

#include "flatlas/geometry.hpp"

namespace flatlas {

/// Sampled trajectory on a uniform time grid.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<std::vector<double>> states;  // N x n
    std::vector<std::vector<double>> inputs;  // N x m

    std::size_t samples() const { return states.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

using InputSignal = std::function<std::vector<double>(double)>;

/// Classical fixed-step RK4. Throws EvalError on non-finite states.
Trajectory integrate(const ControlAffineSystem& sys, const std::vector<double>& x0,
                     const InputSignal& u_signal, double t0, double t1, double dt);

/// One RK4 step of a generic ODE right-hand side.
std::vector<double> rk4_step(const std::function<std::vector<double>(double, const std::vector<double>&)>& rhs,
                             double t, const std::vector<double>& x, double dt);

/// Flow of a vector field (RK4, fixed substeps).
std::vector<double> flow(const VectorField& f, const std::vector<double>& x, double time,
                         int substeps);

/// Second-order flow-commutator estimate of [a,b](point):
/// (Phi^b_{-h} o Phi^a_{-h} o Phi^b_h o Phi^a_h (point) - point) / h^2.
std::vector<double> bracket_fd_oracle(const VectorField& a, const VectorField& b,
                                      const std::vector<double>& point, double h);

/// Numeric first integrals of f_k by flow-box construction: h_i(x) is the
/// i-th transversal coordinate of the point where the f_k-flow through x
/// hits the transversal hyperplane through `point`. Default transversal is
/// orthogonal (Euclidean) to f_k(point).
struct FlowBoxIntegrals {
    std::vector<double> base_point;
    std::vector<double> field_dir;                  // unit f_k(point)
    std::vector<std::vector<double>> transversal;   // n-1 orthonormal dirs
    std::function<std::vector<double>(const std::vector<double>&)> evaluate;
};

FlowBoxIntegrals flow_box_integrals(const VectorField& f_k, const std::vector<double>& point,
                                    const std::vector<std::vector<double>>& transversal_dirs = {});

/// 4th-order finite-difference derivative of sampled data (uniform grid);
/// central stencils inside, one-sided at the ends. Orders 1..3 use direct
/// stencils; higher orders apply the first-derivative stencil repeatedly.
std::vector<double> fd_derivative(const std::vector<double>& samples, double dt, int order);

/// Damped Newton for square systems: step halving (max 8 halvings), max 50
/// iterations, convergence at 1e-10 residual infinity-norm.
struct NewtonOptions {
    int max_iterations = 50;
    int max_halvings = 8;
    double tolerance = 1e-10;
};

struct NewtonResult {
    std::vector<double> x;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

NewtonResult newton_solve(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                          const std::function<std::vector<std::vector<double>>(const std::vector<double>&)>& jacobian,
                          std::vector<double> x0, const NewtonOptions& opts = {});

}  // namespace flatlas

#endif  // FLATLAS_NUMERIC_HPP
