#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ltmpc/dual.hpp"
#include "ltmpc/nlp.hpp"

namespace ltmpc {

enum class DerivativeMode {
    dual_forward,       ///< problem-supplied exact Jacobians (dual-number built)
    finite_difference,  ///< central differences of the value evaluators
};

struct SolverConfig {
    int max_iterations = 150;
    double kkt_tolerance = 1e-6;
    double mu_init = 1e-2;        ///< initial barrier parameter
    double mu_reduction = 0.02;   ///< linear barrier reduction factor
    double mu_superlinear = 2.0;  ///< barrier exponent near convergence
    double armijo_c = 1e-4;       ///< sufficient-decrease coefficient
    double backtrack_ratio = 0.5;
    DerivativeMode derivative_mode = DerivativeMode::dual_forward;
    double regularization_floor = 1e-10;  ///< KKT inertia-correction floor
    bool record_trace = false;            ///< keep per-iteration diagnostics
};

enum class SolveStatus { converged, max_iterations, line_search_failure, infeasible_detected };

std::string to_string(SolveStatus status);

struct IterationRecord {
    double mu = 0.0;
    double kkt_error = 0.0;   ///< E(0)
    double merit = 0.0;
    double penalty = 0.0;     ///< merit penalty parameter in effect
    double step_length = 0.0;
    double constraint_violation = 0.0;
    double stationarity = 0.0;
    double complementarity = 0.0;
};

struct SolveResult {
    Eigen::VectorXd x;             ///< primal solution (best iterate on failure)
    Eigen::VectorXd lambda_eq;     ///< equality multipliers
    Eigen::VectorXd lambda_ineq;   ///< general-inequality multipliers
    Eigen::VectorXd z_bounds;      ///< bound duals, lower sides then upper sides
    SolveStatus status = SolveStatus::max_iterations;
    int iterations = 0;
    double kkt_residual = kInf;
    double solve_time = 0.0;       ///< wall clock [s]
    std::vector<IterationRecord> trace;
};

/// Interior-point solve of `problem` from `guess`. Bounds are handled with a
/// direct log barrier, general inequalities through bounded slack variables,
/// and the condensed KKT system by dense LDLT with inertia correction.
/// Deterministic: identical inputs give bitwise-identical iterates.
SolveResult solve(const NlpProblem& problem, const Eigen::VectorXd& guess,
                  const SolverConfig& config);

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using DualVectorFn = std::function<void(std::span<const Dual>, std::span<Dual>)>;

/// Central-difference Jacobian of a vector evaluator.
Eigen::MatrixXd differentiate(const VectorFn& f, const Eigen::VectorXd& x, double step = 1e-6);

/// Central-difference gradient of a scalar evaluator.
Eigen::VectorXd differentiate(const ScalarFn& f, const Eigen::VectorXd& x, double step = 1e-6);

/// Exact Jacobian via forward-mode duals, one seeded column at a time.
/// `out_dim` is the evaluator's output dimension.
Eigen::MatrixXd differentiate(const DualVectorFn& f, const Eigen::VectorXd& x, int out_dim);

}  // namespace ltmpc
