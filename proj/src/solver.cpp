#include "ltmpc/solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ltmpc {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::line_search_failure: return "line_search_failure";
        case SolveStatus::infeasible_detected: return "infeasible_detected";
    }
    return "?";
}

Eigen::MatrixXd differentiate(const VectorFn& f, const Eigen::VectorXd& x, double step) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd jac(f0.size(), x.size());
    Eigen::VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    if (!jac.allFinite()) throw std::invalid_argument("non-finite evaluation at point");
    return jac;
}

Eigen::VectorXd differentiate(const ScalarFn& f, const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        grad[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    if (!grad.allFinite()) throw std::invalid_argument("non-finite evaluation at point");
    return grad;
}

Eigen::MatrixXd differentiate(const DualVectorFn& f, const Eigen::VectorXd& x, int out_dim) {
    Eigen::MatrixXd jac(out_dim, x.size());
    std::vector<Dual> in(static_cast<std::size_t>(x.size()));
    std::vector<Dual> out(static_cast<std::size_t>(out_dim));
    for (Eigen::Index col = 0; col < x.size(); ++col) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            in[static_cast<std::size_t>(i)] = Dual::constant(x[i], 1);
        }
        in[static_cast<std::size_t>(col)] = Dual(x[col], 1, 0);
        f(in, out);
        for (int r = 0; r < out_dim; ++r) jac(r, col) = out[static_cast<std::size_t>(r)].d[0];
    }
    if (!jac.allFinite()) throw std::invalid_argument("non-finite evaluation at point");
    return jac;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSigmaMin = 1e-12;
constexpr double kSigmaMax = 1e12;
constexpr double kKappaSigma = 1e10;
constexpr double kMinAlpha = 1e-13;

struct Box {
    VectorXd lb, ub;
};

// strict-interior projection of v into its box (IPOPT-style push)
void push_interior(VectorXd& v, const Box& box) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double lo = box.lb[i], hi = box.ub[i];
        double pl = std::isfinite(lo) ? 1e-2 * std::max(1.0, std::abs(lo)) : 0.0;
        double pu = std::isfinite(hi) ? 1e-2 * std::max(1.0, std::abs(hi)) : 0.0;
        if (std::isfinite(lo) && std::isfinite(hi)) {
            const double gap = hi - lo;
            pl = std::min(pl, 0.25 * gap);
            pu = std::min(pu, 0.25 * gap);
        }
        if (std::isfinite(lo)) v[i] = std::max(v[i], lo + pl);
        if (std::isfinite(hi)) v[i] = std::min(v[i], hi - pu);
    }
}

struct BarrierTerms {
    VectorXd grad;    // d(-mu * sum log slack)/dv
    VectorXd sigma;   // zL/(v-lb) + zU/(ub-v)
    double log_sum = 0.0;
};

BarrierTerms barrier_terms(const VectorXd& v, const Box& box, const VectorXd& z_lo,
                           const VectorXd& z_up, double mu) {
    BarrierTerms t;
    t.grad = VectorXd::Zero(v.size());
    t.sigma = VectorXd::Zero(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(box.lb[i])) {
            const double sl = v[i] - box.lb[i];
            t.grad[i] -= mu / sl;
            t.sigma[i] += std::clamp(z_lo[i] / sl, kSigmaMin, kSigmaMax);
            t.log_sum += std::log(sl);
        }
        if (std::isfinite(box.ub[i])) {
            const double su = box.ub[i] - v[i];
            t.grad[i] += mu / su;
            t.sigma[i] += std::clamp(z_up[i] / su, kSigmaMin, kSigmaMax);
            t.log_sum += std::log(su);
        }
    }
    return t;
}

double fraction_to_boundary(const VectorXd& v, const VectorXd& dv, const Box& box, double tau) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv[i] < 0.0 && std::isfinite(box.lb[i])) {
            alpha = std::min(alpha, -tau * (v[i] - box.lb[i]) / dv[i]);
        }
        if (dv[i] > 0.0 && std::isfinite(box.ub[i])) {
            alpha = std::min(alpha, tau * (box.ub[i] - v[i]) / dv[i]);
        }
    }
    return alpha;
}

double dual_fraction(const VectorXd& z, const VectorXd& dz, double tau) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (dz[i] < 0.0 && z[i] > 0.0) alpha = std::min(alpha, -tau * z[i] / dz[i]);
    }
    return alpha;
}

double comp_error(const VectorXd& v, const Box& box, const VectorXd& z_lo, const VectorXd& z_up,
                  double mu) {
    double err = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(box.lb[i])) err = std::max(err, std::abs((v[i] - box.lb[i]) * z_lo[i] - mu));
        if (std::isfinite(box.ub[i])) err = std::max(err, std::abs((box.ub[i] - v[i]) * z_up[i] - mu));
    }
    return err;
}

void clip_duals(const VectorXd& v, const Box& box, VectorXd& z_lo, VectorXd& z_up, double mu) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(box.lb[i])) {
            const double sl = v[i] - box.lb[i];
            z_lo[i] = std::clamp(z_lo[i], mu / (kKappaSigma * sl), kKappaSigma * mu / sl);
        }
        if (std::isfinite(box.ub[i])) {
            const double su = box.ub[i] - v[i];
            z_up[i] = std::clamp(z_up[i], mu / (kKappaSigma * su), kKappaSigma * mu / su);
        }
    }
}

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

SolveResult solve(const NlpProblem& problem, const Eigen::VectorXd& guess,
                  const SolverConfig& config) {
    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();

    if (guess.size() != problem.n_dec) {
        throw std::invalid_argument("solver guess dimension mismatch");
    }
    const int n = problem.n_dec;
    const int m = problem.n_eq;
    const int q = problem.n_ineq;

    // evaluator set, with the finite-difference fallback when configured
    auto eval_cost = problem.cost;
    auto eval_res = problem.cost_residuals;
    auto eval_eq = problem.eq;
    auto eval_ineq = problem.ineq;
    auto eval_res_jac = problem.cost_residual_jac;
    auto eval_eq_jac = problem.eq_jac;
    auto eval_ineq_jac = problem.ineq_jac;
    if (config.derivative_mode == DerivativeMode::finite_difference) {
        eval_res_jac = [eval_res](const VectorXd& x) { return differentiate(eval_res, x); };
        if (m > 0) eval_eq_jac = [eval_eq](const VectorXd& x) { return differentiate(eval_eq, x); };
        if (q > 0) {
            eval_ineq_jac = [eval_ineq](const VectorXd& x) { return differentiate(eval_ineq, x); };
        }
    }

    const Box box_x{problem.lb_x, problem.ub_x};
    const Box box_w{problem.lb_g, problem.ub_g};

    VectorXd x = guess;
    push_interior(x, box_x);
    VectorXd c = m > 0 ? eval_eq(x) : VectorXd(0);
    VectorXd g = q > 0 ? eval_ineq(x) : VectorXd(0);
    if (!x.allFinite() || !c.allFinite() || !g.allFinite()) {
        throw std::invalid_argument("non-finite evaluation at initial point");
    }
    VectorXd w = g;
    push_interior(w, box_w);

    double mu = config.mu_init;
    VectorXd lam = VectorXd::Zero(m);
    VectorXd lam_g = VectorXd::Zero(q);
    auto init_duals = [mu](const VectorXd& v, const Box& box, VectorXd& z_lo, VectorXd& z_up) {
        z_lo = VectorXd::Zero(v.size());
        z_up = VectorXd::Zero(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::isfinite(box.lb[i])) z_lo[i] = mu / (v[i] - box.lb[i]);
            if (std::isfinite(box.ub[i])) z_up[i] = mu / (box.ub[i] - v[i]);
        }
    };
    VectorXd zlx, zux, zlw, zuw;
    init_duals(x, box_x, zlx, zux);
    init_duals(w, box_w, zlw, zuw);

    SolveResult result;
    result.x = x;
    result.lambda_eq = lam;
    result.lambda_ineq = lam_g;
    double best_err = kInf;
    int stall_count = 0;
    double nu = 1.0;
    double last_delta_w = 0.0;
    const double mu_min = config.kkt_tolerance / 20.0;

    auto finish = [&](SolveStatus status, int iters) {
        result.status = status;
        result.iterations = iters;
        result.solve_time =
            std::chrono::duration<double>(Clock::now() - t_start).count();
        return result;
    };

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const VectorXd r = eval_res(x);
        const MatrixXd jr = eval_res_jac(x);
        const MatrixXd jc = m > 0 ? eval_eq_jac(x) : MatrixXd(0, n);
        const MatrixXd jg = q > 0 ? eval_ineq_jac(x) : MatrixXd(0, n);
        const VectorXd grad_f = 2.0 * jr.transpose() * r;

        const VectorXd r_g = g - w;
        const VectorXd r_x = grad_f + jc.transpose() * lam + jg.transpose() * lam_g - zlx + zux;
        const VectorXd r_w = q > 0 ? VectorXd(-lam_g - zlw + zuw) : VectorXd(0);

        const double viol = std::max(inf_norm(c), inf_norm(r_g));
        const double stat0 = std::max(inf_norm(r_x), inf_norm(r_w));
        const double comp0 =
            std::max(comp_error(x, box_x, zlx, zux, 0.0), comp_error(w, box_w, zlw, zuw, 0.0));
        const double err0 = std::max({stat0, viol, comp0});
        if (err0 < best_err) {
            best_err = err0;
            stall_count = 0;
            result.x = x;
            result.lambda_eq = lam;
            result.lambda_ineq = lam_g;
            result.z_bounds.resize(2 * (n + q));
            result.z_bounds << zlx, zlw, zux, zuw;
            result.kkt_residual = err0;
        } else if (++stall_count > 25) {
            // no KKT progress for many iterations: report the best iterate
            return finish(SolveStatus::line_search_failure, iter);
        }
        if (err0 <= config.kkt_tolerance) return finish(SolveStatus::converged, iter);

        const double err_mu = std::max({inf_norm(r_x), inf_norm(r_w), viol,
                                        comp_error(x, box_x, zlx, zux, mu),
                                        comp_error(w, box_w, zlw, zuw, mu)});
        // monotone Fiacco-McCormick update, possibly cascading several levels
        double err_probe = err_mu;
        while (err_probe <= 10.0 * mu && mu > mu_min) {
            mu = std::max(mu_min, std::min(config.mu_reduction * mu,
                                           std::pow(mu, config.mu_superlinear)));
            err_probe = std::max({inf_norm(r_x), inf_norm(r_w), viol,
                                  comp_error(x, box_x, zlx, zux, mu),
                                  comp_error(w, box_w, zlw, zuw, mu)});
        }

        const BarrierTerms bx = barrier_terms(x, box_x, zlx, zux, mu);
        const BarrierTerms bw = barrier_terms(w, box_w, zlw, zuw, mu);
        const VectorXd phi_x = grad_f + bx.grad;
        const VectorXd phi_w = bw.grad;

        // condensed KKT in (dx, lam_plus); far from the solution the
        // Gauss-Newton model is more reliable than curvature weighted with
        // rough multiplier estimates, so the exact constraint curvature only
        // enters once the barrier is small
        MatrixXd h = 2.0 * jr.transpose() * jr;
        if (problem.constraint_curvature && mu < 1e-3 &&
            config.derivative_mode == DerivativeMode::dual_forward) {
            const MatrixXd curv = problem.constraint_curvature(x, lam, lam_g);
            h += 0.5 * (curv + curv.transpose());
        }
        h.diagonal() += bx.sigma;
        if (q > 0) h += jg.transpose() * bw.sigma.asDiagonal() * jg;

        VectorXd rhs(n + m);
        rhs.head(n) = -phi_x;
        if (q > 0) {
            rhs.head(n) -= jg.transpose() * (phi_w + bw.sigma.cwiseProduct(r_g));
        }
        rhs.tail(m) = -c;

        MatrixXd kkt(n + m, n + m);
        VectorXd sol;
        Eigen::LDLT<MatrixXd> ldlt;
        double delta_w = last_delta_w > 0.0 ? last_delta_w / 3.0 : 0.0;
        double delta_c = 1e-12;
        bool solved = false;
        for (int attempt = 0; attempt < 12 && !solved; ++attempt) {
            kkt.setZero();
            kkt.topLeftCorner(n, n) = h;
            kkt.topLeftCorner(n, n).diagonal().array() += delta_w;
            if (m > 0) {
                kkt.topRightCorner(n, m) = jc.transpose();
                kkt.bottomLeftCorner(m, n) = jc;
                kkt.bottomRightCorner(m, m).diagonal().array() = -delta_c;
            }
            ldlt.compute(kkt);
            if (ldlt.info() == Eigen::Success) {
                sol = ldlt.solve(rhs);
                const VectorXd d = ldlt.vectorD();
                int n_pos = 0, n_neg = 0;
                for (Eigen::Index i = 0; i < d.size(); ++i) {
                    if (d[i] > 0.0) ++n_pos;
                    else if (d[i] < 0.0) ++n_neg;
                }
                const double lin_res = (kkt * sol - rhs).cwiseAbs().maxCoeff();
                if (sol.allFinite() && n_pos == n && n_neg == m &&
                    lin_res <= 1e-6 * std::max(1.0, inf_norm(rhs))) {
                    solved = true;
                    break;
                }
            }
            delta_w = std::max(config.regularization_floor, delta_w == 0.0
                                   ? config.regularization_floor * 1e2
                                   : delta_w * 10.0);
            if (attempt >= 6) delta_c *= 10.0;
        }
        if (!solved) {
            return finish(viol > 1e-3 ? SolveStatus::infeasible_detected
                                      : SolveStatus::line_search_failure,
                          iter);
        }
        last_delta_w = delta_w;

        const VectorXd dx = sol.head(n);
        const VectorXd lam_plus = sol.tail(m);
        const VectorXd dw = q > 0 ? VectorXd(jg * dx + r_g) : VectorXd(0);
        const VectorXd lam_g_plus =
            q > 0 ? VectorXd(phi_w + bw.sigma.cwiseProduct(dw)) : VectorXd(0);

        const double tau = std::max(0.99, 1.0 - mu);
        const double alpha_max = std::min(fraction_to_boundary(x, dx, box_x, tau),
                                          fraction_to_boundary(w, dw, box_w, tau));

        // make sure the direction descends the merit; raise the penalty when
        // the infeasibility term must do the work
        const double viol1 = c.lpNorm<1>() + r_g.lpNorm<1>();
        nu = std::max(nu, 1.2 * std::max(inf_norm(lam_plus), inf_norm(lam_g_plus)) + 0.1);
        const double dir_obj = phi_x.dot(dx) + (q > 0 ? phi_w.dot(dw) : 0.0);
        if (dir_obj - nu * viol1 >= 0.0 && viol1 > 1e-14) {
            nu = std::min(1e12, 2.0 * dir_obj / viol1 + 1.0);
        }
        const double dmerit = dir_obj - nu * viol1;
        const double f0 = eval_cost(x);
        const double merit0 = f0 - mu * (bx.log_sum + bw.log_sum) + nu * viol1;

        // barrier-interior merit of a trial point; +inf outside the boxes
        auto trial_merit = [&](const VectorXd& xt, const VectorXd& wt, const VectorXd& ct,
                               const VectorXd& gt) {
            const double ft = eval_cost(xt);
            if (!ct.allFinite() || !gt.allFinite() || !std::isfinite(ft)) return kInf;
            double log_sum = 0.0;
            for (Eigen::Index i = 0; i < xt.size(); ++i) {
                if (std::isfinite(box_x.lb[i])) {
                    const double sl = xt[i] - box_x.lb[i];
                    if (sl <= 0.0) return kInf;
                    log_sum += std::log(sl);
                }
                if (std::isfinite(box_x.ub[i])) {
                    const double su = box_x.ub[i] - xt[i];
                    if (su <= 0.0) return kInf;
                    log_sum += std::log(su);
                }
            }
            for (Eigen::Index i = 0; i < wt.size(); ++i) {
                if (std::isfinite(box_w.lb[i])) {
                    const double sl = wt[i] - box_w.lb[i];
                    if (sl <= 0.0) return kInf;
                    log_sum += std::log(sl);
                }
                if (std::isfinite(box_w.ub[i])) {
                    const double su = box_w.ub[i] - wt[i];
                    if (su <= 0.0) return kInf;
                    log_sum += std::log(su);
                }
            }
            return ft - mu * log_sum + nu * (ct.lpNorm<1>() + (gt - wt).lpNorm<1>());
        };

        double alpha = alpha_max;
        bool accepted = false;
        bool soc_tried = false;
        VectorXd x_trial, w_trial, c_trial, g_trial;
        VectorXd dx_active = dx, dw_active = dw;
        for (int ls = 0; ls < 60 && alpha > kMinAlpha; ++ls) {
            x_trial = x + alpha * dx_active;
            w_trial = w + alpha * dw_active;
            c_trial = m > 0 ? eval_eq(x_trial) : VectorXd(0);
            g_trial = q > 0 ? eval_ineq(x_trial) : VectorXd(0);
            const double merit_trial = trial_merit(x_trial, w_trial, c_trial, g_trial);
            if (merit_trial <= merit0 + config.armijo_c * alpha * dmerit) {
                accepted = true;
                break;
            }
            // second-order correction: pull the full step's constraint
            // curvature error back through the same KKT factorization
            if (!soc_tried && m > 0 && ls == 0 && alpha > 0.5) {
                soc_tried = true;
                VectorXd rhs_soc = VectorXd::Zero(n + m);
                rhs_soc.tail(m) = -c_trial;
                const VectorXd corr = ldlt.solve(rhs_soc);
                const VectorXd dx_soc = alpha * dx + corr.head(n);
                const VectorXd dw_soc =
                    q > 0 ? VectorXd(jg * dx_soc + r_g) : VectorXd(0);
                const double a_soc = std::min(fraction_to_boundary(x, dx_soc, box_x, tau),
                                              fraction_to_boundary(w, dw_soc, box_w, tau));
                const VectorXd x_soc = x + a_soc * dx_soc;
                const VectorXd w_soc = w + a_soc * dw_soc;
                const VectorXd c_soc = m > 0 ? eval_eq(x_soc) : VectorXd(0);
                const VectorXd g_soc = q > 0 ? eval_ineq(x_soc) : VectorXd(0);
                const double merit_soc = trial_merit(x_soc, w_soc, c_soc, g_soc);
                if (merit_soc <= merit0 + config.armijo_c * a_soc * dmerit) {
                    x_trial = x_soc;
                    w_trial = w_soc;
                    c_trial = c_soc;
                    g_trial = g_soc;
                    dx_active = dx_soc;
                    dw_active = dw_soc;
                    alpha = a_soc;
                    accepted = true;
                    break;
                }
            }
            alpha *= config.backtrack_ratio;
        }
        if (!accepted) {
            return finish(viol > 1e-3 ? SolveStatus::infeasible_detected
                                      : SolveStatus::line_search_failure,
                          iter + 1);
        }

        // dual steps from the realized primal displacement
        const VectorXd step_x = x_trial - x;
        const VectorXd step_w = w_trial - w;
        auto dual_steps = [mu](const VectorXd& v, const VectorXd& dv, const Box& box,
                               const VectorXd& z_lo, const VectorXd& z_up, VectorXd& dz_lo,
                               VectorXd& dz_up) {
            dz_lo = VectorXd::Zero(v.size());
            dz_up = VectorXd::Zero(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                if (std::isfinite(box.lb[i])) {
                    const double sl = v[i] - box.lb[i];
                    dz_lo[i] = mu / sl - z_lo[i] - z_lo[i] / sl * dv[i];
                }
                if (std::isfinite(box.ub[i])) {
                    const double su = box.ub[i] - v[i];
                    dz_up[i] = mu / su - z_up[i] + z_up[i] / su * dv[i];
                }
            }
        };
        VectorXd dzlx, dzux, dzlw, dzuw;
        dual_steps(x, step_x, box_x, zlx, zux, dzlx, dzux);
        dual_steps(w, step_w, box_w, zlw, zuw, dzlw, dzuw);
        const double alpha_z = std::min(std::min(dual_fraction(zlx, dzlx, tau),
                                                 dual_fraction(zux, dzux, tau)),
                                        std::min(dual_fraction(zlw, dzlw, tau),
                                                 dual_fraction(zuw, dzuw, tau)));

        x = x_trial;
        w = w_trial;
        c = c_trial;
        g = g_trial;
        lam += alpha * (lam_plus - lam);
        lam_g += alpha * (lam_g_plus - lam_g);
        zlx += alpha_z * dzlx;
        zux += alpha_z * dzux;
        zlw += alpha_z * dzlw;
        zuw += alpha_z * dzuw;
        clip_duals(x, box_x, zlx, zux, mu);
        clip_duals(w, box_w, zlw, zuw, mu);

        if (config.record_trace) {
            result.trace.push_back(IterationRecord{mu, err0, trial_merit(x, w, c, g), nu, alpha,
                                                   viol, stat0, comp0});
        }
    }

    // final convergence check at the last iterate
    {
        const VectorXd r = eval_res(x);
        const MatrixXd jr = eval_res_jac(x);
        const MatrixXd jc = m > 0 ? eval_eq_jac(x) : MatrixXd(0, n);
        const MatrixXd jg = q > 0 ? eval_ineq_jac(x) : MatrixXd(0, n);
        const VectorXd grad_f = 2.0 * jr.transpose() * r;
        const VectorXd r_g = g - w;
        const VectorXd r_x = grad_f + jc.transpose() * lam + jg.transpose() * lam_g - zlx + zux;
        const VectorXd r_w = q > 0 ? VectorXd(-lam_g - zlw + zuw) : VectorXd(0);
        const double err0 = std::max({inf_norm(r_x), inf_norm(r_w), inf_norm(c), inf_norm(r_g),
                                      comp_error(x, box_x, zlx, zux, 0.0),
                                      comp_error(w, box_w, zlw, zuw, 0.0)});
        if (err0 < best_err) {
            best_err = err0;
            result.x = x;
            result.lambda_eq = lam;
            result.lambda_ineq = lam_g;
            result.z_bounds.resize(2 * (n + q));
            result.z_bounds << zlx, zlw, zux, zuw;
            result.kkt_residual = err0;
        }
        if (err0 <= config.kkt_tolerance) {
            return finish(SolveStatus::converged, config.max_iterations);
        }
    }
    return finish(SolveStatus::max_iterations, config.max_iterations);
}

}  // namespace ltmpc
