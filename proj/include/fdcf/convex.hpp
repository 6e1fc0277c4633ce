// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_CONVEX_HPP
#define FDCF_CONVEX_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fdcf/util.hpp"

namespace fdcf {

/// Constraint forms that cover every subproblem produced by the SCA and
/// ADMM layers. Affine and quadratic rows read
///   sum_i quad_i x_i^2 + sum_j lin_j x_j <= rhs   (quad_i >= 0),
/// log rows read  x_sq^2 <= log_scale * ln(1 + x_log).
struct Constraint {
    enum class Kind { Affine, QuadLeAffine, SquareLeLog };

    Kind kind = Kind::Affine;
    std::vector<std::pair<int, double>> quad;
    std::vector<std::pair<int, double>> lin;
    double rhs = 0.0;
    int sq_index = -1;
    int log_index = -1;
    double log_scale = 1.0;
    std::string name;

    double lhs_value(const Eigen::VectorXd& x) const {
        if (kind == Kind::SquareLeLog) return x(sq_index) * x(sq_index);
        double v = 0.0;
        for (const auto& [i, q] : quad) v += q * x(i) * x(i);
        for (const auto& [i, a] : lin) v += a * x(i);
        return v;
    }

    double rhs_value(const Eigen::VectorXd& x) const {
        if (kind == Kind::SquareLeLog) return log_scale * std::log1p(x(log_index));
        return rhs;
    }

    double slack(const Eigen::VectorXd& x) const { return rhs_value(x) - lhs_value(x); }
};

/// Maximize linear . x - 1/2 sum_i penalty_i (x_i - anchor_i)^2 over the
/// constraints plus box bounds. pull_chain records, in dependency order,
/// which variables relieve which constraint when a point sits on its
/// boundary (used by strict_interior).
struct ConvexProgram {
    int n = 0;
    Eigen::VectorXd linear;
    Eigen::VectorXd penalty;
    Eigen::VectorXd anchor;
    Eigen::VectorXd lower, upper;
    std::vector<Constraint> constraints;

    struct PullStep {
        int constraint = -1;
        std::vector<int> vars;
    };
    std::vector<PullStep> pull_chain;

    void init(int nvars) {
        n = nvars;
        linear = Eigen::VectorXd::Zero(n);
        penalty = Eigen::VectorXd::Zero(n);
        anchor = Eigen::VectorXd::Zero(n);
        lower = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
        upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    }

    double objective(const Eigen::VectorXd& x) const {
        double v = linear.dot(x);
        for (int i = 0; i < n; ++i)
            if (penalty(i) > 0.0) v -= 0.5 * penalty(i) * (x(i) - anchor(i)) * (x(i) - anchor(i));
        return v;
    }

    int inequality_count() const {
        int m = static_cast<int>(constraints.size());
        for (int i = 0; i < n; ++i) {
            if (std::isfinite(lower(i))) ++m;
            if (std::isfinite(upper(i))) ++m;
        }
        return m;
    }

    bool strictly_feasible(const Eigen::VectorXd& x) const {
        for (const auto& con : constraints)
            if (!(con.slack(x) > 0.0)) return false;
        for (int i = 0; i < n; ++i) {
            if (std::isfinite(lower(i)) && !(x(i) > lower(i))) return false;
            if (std::isfinite(upper(i)) && !(x(i) < upper(i))) return false;
        }
        return true;
    }

    /// Worst violation over constraints and boxes (0 when feasible).
    double max_violation(const Eigen::VectorXd& x) const {
        double v = 0.0;
        for (const auto& con : constraints) v = std::max(v, -con.slack(x));
        for (int i = 0; i < n; ++i) {
            if (std::isfinite(lower(i))) v = std::max(v, lower(i) - x(i));
            if (std::isfinite(upper(i))) v = std::max(v, x(i) - upper(i));
        }
        return v;
    }
};

enum class SolveStatus { Optimal, MaxIter, InfeasibleStart };

struct SolveOptions {
    double tol = 1e-8;          // duality-gap surrogate m/t
    double t0 = 1.0;            // initial barrier weight
    double mu = 10.0;           // barrier growth factor
    int max_newton = 200;       // total damped Newton steps
    double center_tol = 1e-10;  // stop centering at decrement^2/2 below this
    bool trace = false;         // record per-centering Newton decrements
};

struct SolveReport {
    Eigen::VectorXd x_star;
    double objective_value = 0.0;
    double kkt_residual = 0.0;
    int barrier_iterations = 0;
    SolveStatus status = SolveStatus::Optimal;
    std::vector<std::vector<double>> centering_decrements;  // when trace is on
};

namespace detail {

/// Gradient and Hessian of the centering objective
///   f_t(x) = -t * objective(x) - sum log(slacks).
inline double barrier_value(const ConvexProgram& p, const Eigen::VectorXd& x, double t) {
    double f = -t * p.objective(x);
    for (const auto& con : p.constraints) f -= std::log(con.slack(x));
    for (int i = 0; i < p.n; ++i) {
        if (std::isfinite(p.lower(i))) f -= std::log(x(i) - p.lower(i));
        if (std::isfinite(p.upper(i))) f -= std::log(p.upper(i) - x(i));
    }
    return f;
}

inline void barrier_derivatives(const ConvexProgram& p, const Eigen::VectorXd& x, double t,
                                Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    grad.setZero(p.n);
    hess.setZero(p.n, p.n);
    for (int i = 0; i < p.n; ++i) {
        grad(i) = -t * p.linear(i);
        if (p.penalty(i) > 0.0) {
            grad(i) += t * p.penalty(i) * (x(i) - p.anchor(i));
            hess(i, i) += t * p.penalty(i);
        }
    }
    Eigen::VectorXd glhs(p.n);
    for (const auto& con : p.constraints) {
        const double s = con.slack(x);
        const double inv = 1.0 / s;
        glhs.setZero();
        if (con.kind == Constraint::Kind::SquareLeLog) {
            glhs(con.sq_index) = 2.0 * x(con.sq_index);
            glhs(con.log_index) = -con.log_scale / (1.0 + x(con.log_index));
            hess(con.sq_index, con.sq_index) += 2.0 * inv;
            hess(con.log_index, con.log_index) +=
                inv * con.log_scale / ((1.0 + x(con.log_index)) * (1.0 + x(con.log_index)));
        } else {
            for (const auto& [i, q] : con.quad) {
                glhs(i) += 2.0 * q * x(i);
                hess(i, i) += 2.0 * q * inv;
            }
            for (const auto& [i, a] : con.lin) glhs(i) += a;
        }
        grad += inv * glhs;
        // rank-1 term (grad lhs)(grad lhs)^T / s^2
        for (int i = 0; i < p.n; ++i) {
            if (glhs(i) == 0.0) continue;
            for (int j = i; j < p.n; ++j) {
                if (glhs(j) == 0.0) continue;
                const double v = glhs(i) * glhs(j) * inv * inv;
                hess(i, j) += v;
                if (i != j) hess(j, i) += v;
            }
        }
    }
    for (int i = 0; i < p.n; ++i) {
        if (std::isfinite(p.lower(i))) {
            const double s = x(i) - p.lower(i);
            grad(i) -= 1.0 / s;
            hess(i, i) += 1.0 / (s * s);
        }
        if (std::isfinite(p.upper(i))) {
            const double s = p.upper(i) - x(i);
            grad(i) += 1.0 / s;
            hess(i, i) += 1.0 / (s * s);
        }
    }
}

}  // namespace detail

/// Log-barrier interior-point solve from a strictly feasible start. Damped
/// Newton centering with Jacobi-scaled factorizations; the barrier weight
/// grows by `mu` until the gap surrogate m/t drops below tol.
inline SolveReport solve(const ConvexProgram& p, const Eigen::VectorXd& x0,
                         const SolveOptions& opts = {}) {
    SolveReport rep;
    rep.x_star = x0;
    if (!p.strictly_feasible(x0)) {
        rep.status = SolveStatus::InfeasibleStart;
        rep.objective_value = p.objective(x0);
        rep.kkt_residual = std::numeric_limits<double>::infinity();
        return rep;
    }

    Eigen::VectorXd x = x0;
    Eigen::VectorXd grad(p.n);
    Eigen::MatrixXd hess(p.n, p.n);
    const int m = p.inequality_count();
    double t = opts.t0;
    int steps = 0;
    bool hit_cap = false;

    while (true) {
        if (opts.trace) rep.centering_decrements.emplace_back();
        for (int inner = 0; inner < 80; ++inner) {
            if (steps >= opts.max_newton) {
                hit_cap = true;
                break;
            }
            detail::barrier_derivatives(p, x, t, grad, hess);
            // Jacobi scaling keeps the factorization honest when variable
            // magnitudes span many decades.
            Eigen::VectorXd d_scale(p.n);
            for (int i = 0; i < p.n; ++i)
                d_scale(i) = 1.0 / std::sqrt(std::max(hess(i, i), 1e-300));
            Eigen::MatrixXd hs = d_scale.asDiagonal() * hess * d_scale.asDiagonal();
            Eigen::VectorXd gs = d_scale.asDiagonal() * grad;
            double ridge = 0.0;
            Eigen::VectorXd dy;
            for (int attempt = 0; attempt < 6; ++attempt) {
                Eigen::MatrixXd hr = hs;
                if (ridge > 0.0) hr.diagonal().array() += ridge;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
                if (ldlt.info() == Eigen::Success) {
                    dy = ldlt.solve(-gs);
                    if (dy.allFinite() && gs.dot(dy) < 0.0) break;
                }
                ridge = ridge == 0.0 ? 1e-10 : ridge * 100.0;
                dy.setZero(p.n);
            }
            if (!dy.allFinite() || dy.isZero(0.0)) break;
            const Eigen::VectorXd d = d_scale.asDiagonal() * dy;
            const double decrement_sq = -grad.dot(d);
            if (opts.trace) rep.centering_decrements.back().push_back(std::sqrt(std::max(0.0, decrement_sq)));
            if (decrement_sq * 0.5 <= opts.center_tol) break;

            // Pull back into strict feasibility, then Armijo backtracking.
            double alpha = 1.0;
            int guard = 0;
            while (!p.strictly_feasible(x + alpha * d) && guard++ < 90) alpha *= 0.5;
            if (guard >= 90) break;
            const double f0 = detail::barrier_value(p, x, t);
            const double slope = grad.dot(d);
            while (detail::barrier_value(p, x + alpha * d, t) > f0 + 0.25 * alpha * slope &&
                   alpha > 1e-14)
                alpha *= 0.5;
            x += alpha * d;
            ++steps;
        }
        if (hit_cap) break;
        if (static_cast<double>(m) / t <= opts.tol) break;
        t *= opts.mu;
    }

    rep.x_star = x;
    rep.objective_value = p.objective(x);
    rep.kkt_residual = static_cast<double>(m) / t;
    rep.barrier_iterations = steps;
    rep.status = hit_cap ? SolveStatus::MaxIter : SolveStatus::Optimal;
    return rep;
}

/// Moves a boundary point strictly inside the feasible region. Box bounds
/// are clamped with a relative margin; each pull-chain step then checks its
/// constraint and, when tight, scales the designated variables by
/// (1 - shrink), falling back to an exact 1-D solve for the scale factor
/// that leaves a small positive slack. Steps are ordered so later pulls
/// never disturb earlier constraints.
inline Eigen::VectorXd strict_interior(const ConvexProgram& p, const Eigen::VectorXd& x_eq,
                                       double shrink = 1e-4) {
    Eigen::VectorXd x = x_eq;
    for (int i = 0; i < p.n; ++i) {
        const double margin = shrink * std::max(1.0, std::fabs(x(i)));
        if (std::isfinite(p.lower(i)) && x(i) < p.lower(i) + margin) x(i) = p.lower(i) + margin;
        if (std::isfinite(p.upper(i)) && x(i) > p.upper(i) - margin) x(i) = p.upper(i) - margin;
        if (std::isfinite(p.lower(i)) && std::isfinite(p.upper(i)) && p.lower(i) >= p.upper(i))
            throw InfeasibleError("strict_interior: empty box on variable " + std::to_string(i));
    }

    for (const auto& step : p.pull_chain) {
        const Constraint& con = p.constraints[static_cast<std::size_t>(step.constraint)];
        const double scale = std::max({1.0, std::fabs(con.rhs_value(x)), std::fabs(con.lhs_value(x))});
        const double target = shrink * scale;
        if (con.slack(x) >= target) continue;

        auto apply = [&](double factor) {
            for (int v : step.vars) x(v) *= factor;
        };
        apply(1.0 - shrink);
        if (con.slack(x) >= target) continue;

        // Exact scale factor s on the step variables giving slack == target.
        double s = 0.0;
        if (con.kind == Constraint::Kind::SquareLeLog) {
            const double budget = con.rhs_value(x) - target;
            const double cur = con.lhs_value(x);
            s = (budget <= 0.0 || cur <= 0.0) ? 0.0 : std::sqrt(budget / cur);
        } else {
            double a2 = 0.0, a1 = 0.0;
            for (const auto& [i, q] : con.quad)
                for (int v : step.vars)
                    if (i == v) a2 += q * x(i) * x(i);
            for (const auto& [i, a] : con.lin)
                for (int v : step.vars)
                    if (i == v) a1 += a * x(i);
            const double rest = con.lhs_value(x) - a2 - a1;
            const double goal = con.rhs - target - rest;
            if (a2 > 0.0) {
                const double disc = a1 * a1 + 4.0 * a2 * goal;
                s = disc <= 0.0 ? 0.0 : (-a1 + std::sqrt(disc)) / (2.0 * a2);
            } else if (a1 != 0.0) {
                s = goal / a1;
            }
        }
        // s is the exact scale on the current (already nudged) values.
        s = std::min(std::max(s, 0.0), 1.0);
        apply(s);
        // Respect lower box bounds; project and accept any positive slack.
        for (int v : step.vars)
            if (std::isfinite(p.lower(v)) && x(v) < p.lower(v)) x(v) = p.lower(v) + shrink * std::max(1.0, std::fabs(p.lower(v)));
        if (!(con.slack(x) > 0.0))
            throw InfeasibleError("strict_interior: cannot open slack on constraint '" + con.name +
                                  "'");
    }

    for (const auto& con : p.constraints)
        if (!(con.slack(x) > 0.0))
            throw InfeasibleError("strict_interior: point remains on boundary of '" + con.name +
                                  "'");
    if (!p.strictly_feasible(x)) throw InfeasibleError("strict_interior: box violation remains");
    return x;
}

}  // namespace fdcf

#endif
