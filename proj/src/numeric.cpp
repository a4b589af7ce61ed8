#include "flatlas/numeric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace flatlas {

namespace {

FloatMap bind_frame(const Frame& frame, const std::vector<double>& x) {
    FloatMap m;
    for (std::size_t i = 0; i < frame.size(); ++i) m[frame[i]] = x[i];
    return m;
}

std::vector<double> eval_field(const VectorField& f, const std::vector<double>& x) {
    FloatMap m = bind_frame(f.frame, x);
    std::vector<double> out(f.dim());
    for (std::size_t i = 0; i < f.dim(); ++i) out[i] = evaluate_float(f.components[i], m);
    return out;
}

void check_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v))
            throw EvalError(EvalErrorKind::NonFinite, "non-finite state encountered");
}

}  // namespace

std::vector<double> rk4_step(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& rhs, double t,
    const std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    auto axpy = [n](const std::vector<double>& a, double s, const std::vector<double>& b) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const std::vector<double> k1 = rhs(t, x);
    const std::vector<double> k2 = rhs(t + dt / 2, axpy(x, dt / 2, k1));
    const std::vector<double> k3 = rhs(t + dt / 2, axpy(x, dt / 2, k2));
    const std::vector<double> k4 = rhs(t + dt, axpy(x, dt, k3));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

Trajectory integrate(const ControlAffineSystem& sys, const std::vector<double>& x0,
                     const InputSignal& u_signal, double t0, double t1, double dt) {
    if (dt <= 0) throw std::invalid_argument("integrate: dt must be positive");
    if (x0.size() != sys.n()) throw std::invalid_argument("integrate: x0 dimension mismatch");

    auto rhs = [&](double t, const std::vector<double>& x) {
        const std::vector<double> u = u_signal(t);
        if (u.size() != sys.m()) throw std::invalid_argument("integrate: input arity mismatch");
        FloatMap m = bind_frame(sys.state_frame, x);
        for (std::size_t i = 0; i < sys.m(); ++i) m[sys.control_symbols[i]] = u[i];
        std::vector<double> dx(sys.n());
        for (std::size_t i = 0; i < sys.n(); ++i) {
            double v = evaluate_float(sys.drift.components[i], m);
            for (std::size_t j = 0; j < sys.m(); ++j)
                v += u[j] * evaluate_float(sys.controls[j].components[i], m);
            dx[i] = v;
        }
        return dx;
    };

    Trajectory traj;
    traj.t0 = t0;
    traj.dt = dt;
    const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    std::vector<double> x = x0;
    traj.states.push_back(x);
    traj.inputs.push_back(u_signal(t0));
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = t0 + dt * static_cast<double>(s);
        x = rk4_step(rhs, t, x, dt);
        check_finite(x);
        traj.states.push_back(x);
        traj.inputs.push_back(u_signal(t + dt));
    }
    return traj;
}

std::vector<double> flow(const VectorField& f, const std::vector<double>& x, double time,
                         int substeps) {
    auto rhs = [&](double, const std::vector<double>& s) { return eval_field(f, s); };
    std::vector<double> cur = x;
    const double dt = time / substeps;
    for (int i = 0; i < substeps; ++i) {
        cur = rk4_step(rhs, 0.0, cur, dt);
        check_finite(cur);
    }
    return cur;
}

std::vector<double> bracket_fd_oracle(const VectorField& a, const VectorField& b,
                                      const std::vector<double>& point, double h) {
    if (h <= 0) throw std::invalid_argument("bracket_fd_oracle: h must be positive");
    const int sub = 16;
    auto echo = [&](double step) {
        std::vector<double> p = flow(a, point, step, sub);
        p = flow(b, p, step, sub);
        p = flow(a, p, -step, sub);
        p = flow(b, p, -step, sub);
        return p;
    };
    // averaging the forward and backward echoes cancels the O(h^3) term of
    // Phi^b_{-h} o Phi^a_{-h} o Phi^b_h o Phi^a_h (point) = point + h^2 [a,b] + ...
    const std::vector<double> fwd = echo(h);
    const std::vector<double> bwd = echo(-h);
    std::vector<double> out(point.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (fwd[i] + bwd[i] - 2 * point[i]) / (2 * h * h);
    return out;
}

FlowBoxIntegrals flow_box_integrals(const VectorField& f_k, const std::vector<double>& point,
                                    const std::vector<std::vector<double>>& transversal_dirs) {
    const std::size_t n = point.size();
    std::vector<double> v = eval_field(f_k, point);
    double norm = 0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-12)
        throw std::invalid_argument("flow_box_integrals: f_k vanishes at the base point");
    for (double& c : v) c /= norm;

    // transversal basis: orthonormal complement of v (Gram-Schmidt over the
    // coordinate directions), unless the caller supplied directions
    std::vector<std::vector<double>> dirs = transversal_dirs;
    if (dirs.empty()) {
        std::vector<std::vector<double>> basis{v};
        for (std::size_t axis = 0; axis < n && basis.size() < n; ++axis) {
            std::vector<double> e(n, 0.0);
            e[axis] = 1.0;
            for (const auto& b : basis) {
                double dot = 0;
                for (std::size_t i = 0; i < n; ++i) dot += e[i] * b[i];
                for (std::size_t i = 0; i < n; ++i) e[i] -= dot * b[i];
            }
            double en = 0;
            for (double c : e) en += c * c;
            en = std::sqrt(en);
            if (en > 1e-8) {
                for (double& c : e) c /= en;
                basis.push_back(e);
                dirs.push_back(e);
            }
        }
        if (dirs.size() != n - 1)
            throw std::runtime_error("flow_box_integrals: failed to build transversal basis");
    }

    FlowBoxIntegrals out;
    out.base_point = point;
    out.field_dir = v;
    out.transversal = dirs;

    const std::vector<double> base = point;
    out.evaluate = [f_k, base, v, dirs, norm](const std::vector<double>& x) {
        const std::size_t dim = base.size();
        auto offset = [&](const std::vector<double>& y) {
            double s = 0;
            for (std::size_t i = 0; i < dim; ++i) s += (y[i] - base[i]) * v[i];
            return s;
        };
        // time-of-flight: bracket the transversal crossing, then bisect
        const int sub = 8;
        double s0 = offset(x);
        double t_lo = 0.0, t_hi = -s0 / norm;  // first-order guess
        if (t_hi == 0.0) t_hi = 1e-6;
        double f_lo = s0;
        double f_hi = offset(flow(f_k, x, t_hi, sub));
        int expand = 0;
        while (f_lo * f_hi > 0) {
            t_hi *= 1.5;
            f_hi = offset(flow(f_k, x, t_hi, sub));
            if (++expand > 60)
                throw std::runtime_error("flow_box_integrals: flow fails to hit the transversal");
        }
        for (int it = 0; it < 80; ++it) {
            const double tm = (t_lo + t_hi) / 2;
            const double fm = offset(flow(f_k, x, tm, sub));
            if (f_lo * fm <= 0) {
                t_hi = tm;
                f_hi = fm;
            } else {
                t_lo = tm;
                f_lo = fm;
            }
        }
        const std::vector<double> hit = flow(f_k, x, (t_lo + t_hi) / 2, sub);
        std::vector<double> coords(dirs.size());
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            double s = 0;
            for (std::size_t j = 0; j < dim; ++j) s += (hit[j] - base[j]) * dirs[i][j];
            coords[i] = s;
        }
        return coords;
    };
    return out;
}

std::vector<double> fd_derivative(const std::vector<double>& samples, double dt, int order) {
    if (order < 0) throw std::invalid_argument("fd_derivative: negative order");
    if (order == 0) return samples;
    const std::size_t n = samples.size();
    if (n < 7) throw std::invalid_argument("fd_derivative: need at least 7 samples");
    if (order > 3) return fd_derivative(fd_derivative(samples, dt, 1), dt, order - 1);

    std::vector<double> out(n);
    auto s = [&](std::ptrdiff_t i) { return samples[static_cast<std::size_t>(i)]; };

    if (order == 1) {
        // central: (-f[i+2] + 8f[i+1] - 8f[i-1] + f[i-2]) / (12h)
        for (std::ptrdiff_t i = 2; i + 2 < static_cast<std::ptrdiff_t>(n); ++i)
            out[i] = (-s(i + 2) + 8 * s(i + 1) - 8 * s(i - 1) + s(i - 2)) / (12 * dt);
        // one-sided 4th order (5-point)
        auto fwd = [&](std::ptrdiff_t i, int dir) {
            return dir *
                   (-25.0 / 12 * s(i) + 4 * s(i + dir) - 3 * s(i + 2 * dir) +
                    4.0 / 3 * s(i + 3 * dir) - 1.0 / 4 * s(i + 4 * dir)) /
                   dt;
        };
        out[0] = fwd(0, 1);
        out[1] = fwd(1, 1);
        out[n - 1] = fwd(static_cast<std::ptrdiff_t>(n) - 1, -1);
        out[n - 2] = fwd(static_cast<std::ptrdiff_t>(n) - 2, -1);
        return out;
    }
    if (order == 2) {
        // central: (-f[i+2] + 16f[i+1] - 30f[i] + 16f[i-1] - f[i-2]) / (12h^2)
        for (std::ptrdiff_t i = 2; i + 2 < static_cast<std::ptrdiff_t>(n); ++i)
            out[i] =
                (-s(i + 2) + 16 * s(i + 1) - 30 * s(i) + 16 * s(i - 1) - s(i - 2)) / (12 * dt * dt);
        // one-sided 4th order (6-point); even derivative, direction-free
        auto one_sided = [&](std::ptrdiff_t i, int dir) {
            return (15.0 / 4 * s(i) - 77.0 / 6 * s(i + dir) + 107.0 / 6 * s(i + 2 * dir) -
                    13.0 * s(i + 3 * dir) + 61.0 / 12 * s(i + 4 * dir) -
                    5.0 / 6 * s(i + 5 * dir)) /
                   (dt * dt);
        };
        out[0] = one_sided(0, 1);
        out[1] = one_sided(1, 1);
        out[n - 1] = one_sided(static_cast<std::ptrdiff_t>(n) - 1, -1);
        out[n - 2] = one_sided(static_cast<std::ptrdiff_t>(n) - 2, -1);
        return out;
    }
    // order == 3: central (f[i-3] - 8f[i-2] + 13f[i-1] - 13f[i+1] + 8f[i+2]
    // - f[i+3]) / (8h^3), O(h^4); one-sided 7-point stencils at the ends
    auto one_sided3 = [&](std::ptrdiff_t i, int dir) {
        return dir *
               (-49.0 / 8 * s(i) + 29.0 * s(i + dir) - 461.0 / 8 * s(i + 2 * dir) +
                62.0 * s(i + 3 * dir) - 307.0 / 8 * s(i + 4 * dir) + 13.0 * s(i + 5 * dir) -
                15.0 / 8 * s(i + 6 * dir)) /
               (dt * dt * dt);
    };
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        if (i >= 3 && i + 3 < static_cast<std::ptrdiff_t>(n)) {
            out[i] = (s(i - 3) - 8 * s(i - 2) + 13 * s(i - 1) - 13 * s(i + 1) + 8 * s(i + 2) -
                      s(i + 3)) /
                     (8 * dt * dt * dt);
        } else if (i < 3) {
            out[i] = one_sided3(i, 1);
        } else {
            out[i] = one_sided3(i, -1);
        }
    }
    return out;
}

NewtonResult newton_solve(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::function<std::vector<std::vector<double>>(const std::vector<double>&)>& jacobian,
    std::vector<double> x0, const NewtonOptions& opts) {
    NewtonResult res;
    res.x = std::move(x0);
    const std::size_t n = res.x.size();

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0;
        for (double c : v) m = std::max(m, std::abs(c));
        return m;
    };

    std::vector<double> fx = f(res.x);
    res.residual = inf_norm(fx);
    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (res.residual <= opts.tolerance) {
            res.converged = true;
            return res;
        }
        const std::vector<std::vector<double>> J = jacobian(res.x);
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b(static_cast<Eigen::Index>(i)) = -fx[i];
            for (std::size_t j = 0; j < n; ++j)
                A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = J[i][j];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) return res;  // singular Jacobian at a sample
        const Eigen::VectorXd step = lu.solve(b);

        // damped step: halve until the residual decreases
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = res.x[i] + scale * step(static_cast<Eigen::Index>(i));
            try {
                std::vector<double> ft = f(trial);
                const double r = inf_norm(ft);
                if (r < res.residual || r <= opts.tolerance) {
                    res.x = std::move(trial);
                    fx = std::move(ft);
                    res.residual = r;
                    accepted = true;
                    break;
                }
            } catch (const EvalError&) {
                // out of domain; shrink the step
            }
            scale /= 2;
        }
        if (!accepted) return res;  // Newton divergence
    }
    res.converged = res.residual <= opts.tolerance;
    return res;
}

}  // namespace flatlas
