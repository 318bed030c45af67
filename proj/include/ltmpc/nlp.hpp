#pragma once

#include <Eigen/Core>
#include <functional>

#include "ltmpc/vehicle_params.hpp"

namespace ltmpc {

/// Numeric description of one smooth NLP:
///
///   min  cost(x)  =  sum_i cost_residuals(x)_i^2
///   s.t. eq(x) = 0
///        lb_g <= ineq(x) <= ub_g
///        lb_x <= x <= ub_x
///
/// All evaluators are pure; the struct is immutable after construction and
/// safe to share across threads. Jacobians are dense with the block-banded
/// shooting structure materialized as zeros.
struct NlpProblem {
    int n_dec = 0;
    int n_eq = 0;
    int n_ineq = 0;
    int n_res = 0;

    Eigen::VectorXd lb_x, ub_x;
    Eigen::VectorXd lb_g, ub_g;

    std::function<double(const Eigen::VectorXd&)> cost;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> cost_residuals;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> cost_residual_jac;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eq;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eq_jac;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ineq;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> ineq_jac;

    /// Optional: curvature term sum_i lam_eq_i * hess(eq_i) + sum_j lam_g_j *
    /// hess(ineq_j) of the Lagrangian at (x, lam_eq, lam_g). When absent the
    /// solver runs with the Gauss-Newton cost Hessian alone.
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  const Eigen::VectorXd&)>
        constraint_curvature;
};

}  // namespace ltmpc
