#pragma once

// Accelerated proximal gradient (APG) solver for nonnegative tensor ring
// decomposition, with an optional graph-Laplacian penalty on the last core.
//
// Each outer sweep visits the cores in order n = 1..d. For core n the data
// unfolding X_[n] factors as G_(2)^(n) (G^{!=n}_[2])^T, which makes the core
// update a nonnegative least-squares problem in G = G_(2)^(n):
//
//     f(G) = 1/2 ||X_[n] - G S^T||_F^2  (+ beta/2 Tr(G^T H G) when n = d)
//
// with S the subchain unfolding. It is solved by t_max projected, momentum-
// accelerated gradient steps of length 1/L, L the gradient's Lipschitz constant.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tring/graph.hpp"
#include "tring/tensor.hpp"
#include "tring/tr_model.hpp"

namespace tring {

struct SolverConfig {
    std::size_t t_max = 100;       // inner APG iterations per core
    std::size_t max_sweeps = 500;  // outer sweep cap
    double tol = 1e-6;             // stop when the relative objective change falls below
    double beta = 0.1;             // graph penalty weight, used only with a graph
    std::uint64_t seed = 0;

    /// Throws DomainError on t_max == 0, max_sweeps == 0, tol <= 0 or beta < 0.
    void validate() const;
};

/// Iterates of one inner APG loop.
struct ApgState {
    Matrix g_curr;
    Matrix g_prev;
    Matrix y;  // search point
    double alpha = 1.0;
    double lipschitz = 0.0;
};

/// Everything an observer needs to audit one accepted inner step.
struct StepRecord {
    std::size_t mode;
    const Matrix& x_unfold;
    const Matrix& subchain2;
    const Matrix* laplacian;  // null unless the penalty is active for this core
    double beta;
    const ApgState& state;  // state.y is the point the step was taken from
    const Matrix& next;     // accepted iterate
    bool restarted;         // momentum was reset before this step
};

using StepObserver = std::function<void(const StepRecord&)>;

enum class Termination { tolerance, max_sweeps };

struct FitReport {
    double initial_objective = 0.0;
    std::vector<double> objective_per_sweep;
    std::vector<double> rel_change_per_sweep;
    std::vector<double> seconds_per_sweep;  // cumulative wall time at the end of each sweep
    std::size_t sweeps_run = 0;
    std::size_t momentum_restarts = 0;
    Termination terminated_by = Termination::max_sweeps;
    double wall_seconds = 0.0;
};

struct FitResult {
    TRCores cores;
    FitReport report;
};

// -- single-step building blocks --

/// G (S^T S) - X S
[[nodiscard]] Matrix gradient_ntr(const Matrix& g2, const Matrix& subchain2, const Matrix& x_unfold);
/// gradient_ntr + beta H G
[[nodiscard]] Matrix gradient_gntr(const Matrix& g2, const Matrix& subchain2,
                                   const Matrix& x_unfold, const Matrix& h_g, double beta);

/// ||S^T S||_2
[[nodiscard]] double lipschitz_ntr(const Matrix& subchain2);
/// ||S^T S||_2 + beta ||H||_2
[[nodiscard]] double lipschitz_gntr(const Matrix& subchain2, const Matrix& h_g, double beta);

/// (1 + sqrt(4 alpha^2 + 1)) / 2
[[nodiscard]] double alpha_next(double alpha);

/// g_curr + (alpha_curr - 1) / alpha_next * (g_curr - g_prev)
[[nodiscard]] Matrix search_point(const Matrix& g_curr, const Matrix& g_prev, double alpha_curr,
                                  double alpha_nxt);

/// max(0, y - grad / L), elementwise. Requires L > 0.
[[nodiscard]] Matrix prox_step(const Matrix& y, const Matrix& grad_at_y, double lipschitz);

/// 1/2 ||X - G S^T||_F^2 (+ beta/2 Tr(G^T H G) when h_g is given), computed from the residual.
[[nodiscard]] double subproblem_objective(const Matrix& g2, const Matrix& subchain2,
                                          const Matrix& x_unfold, const Matrix* h_g = nullptr,
                                          double beta = 0.0);

// -- solvers --

/// Runs t_max APG iterations on one core's subproblem starting from g_init.
///
/// A step that would raise the objective resets the momentum (alpha = 1,
/// Y = current iterate) and is retaken; if the plain projected step still
/// does not descend, the current iterate is kept. The returned iterate is
/// therefore never worse than g_init. Throws DegenerateError when L = 0.
[[nodiscard]] Matrix solve_core(const Matrix& x_unfold, const Matrix& subchain2,
                                const Matrix& g_init, const SolverConfig& cfg,
                                const Matrix* h_g = nullptr, const StepObserver& observer = {},
                                std::size_t mode = 0, std::size_t* restarts = nullptr);

/// Nonnegative tensor ring fit. With a graph, the penalty beta/2 Tr(G^T H G)
/// is applied to the last core (whose rows index the samples).
///
/// Throws DomainError for negative or non-finite data, DimensionError for
/// rank/shape mismatches and NumericalError if the objective stops being finite.
[[nodiscard]] FitResult fit(const DenseTensor& x, const RankVector& ranks, const SolverConfig& cfg,
                            const NeighborGraph* graph = nullptr, const StepObserver& observer = {});

}  // namespace tring
