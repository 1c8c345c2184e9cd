#include "tring/apg.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "tring/error.hpp"
#include "tring/kernels.hpp"
#include "tring/tensor_ops.hpp"

namespace tring {

namespace {

void require_shapes(const Matrix& g2, const Matrix& subchain2, const Matrix& x_unfold) {
    if (g2.cols() != subchain2.cols() || x_unfold.rows() != g2.rows() ||
        x_unfold.cols() != subchain2.rows()) {
        throw DimensionError("core subproblem shapes do not conform: G " +
                             std::to_string(g2.rows()) + "x" + std::to_string(g2.cols()) +
                             ", S " + std::to_string(subchain2.rows()) + "x" +
                             std::to_string(subchain2.cols()) + ", X " +
                             std::to_string(x_unfold.rows()) + "x" +
                             std::to_string(x_unfold.cols()));
    }
}

// One core's least-squares subproblem with S^T S and X S cached, so each
// inner iteration costs O(i_n R^2) instead of touching the full unfolding.
class CoreProblem {
public:
    CoreProblem(const Matrix& subchain2, const Matrix& x_unfold, const Matrix* h, double beta)
        : gram_(kernels::gemm_tn(subchain2, subchain2)),
          xs_(kernels::gemm(x_unfold, subchain2)),
          half_x2_(0.5 * kernels::dot(x_unfold.data(), x_unfold.data())),
          h_(h),
          beta_(beta) {
        if (h_ && (h_->rows() != x_unfold.rows() || h_->cols() != x_unfold.rows())) {
            throw DimensionError("Laplacian size " + std::to_string(h_->rows()) +
                                 " does not match the sample dimension " +
                                 std::to_string(x_unfold.rows()));
        }
    }

    [[nodiscard]] Matrix gradient(const Matrix& g) const {
        Matrix grad = kernels::gemm(g, gram_);
        auto gd = grad.data();
        const auto xs = xs_.data();
        for (std::size_t i = 0; i < gd.size(); ++i) gd[i] -= xs[i];
        if (h_) {
            const Matrix hg = kernels::gemm(*h_, g);
            const auto hd = hg.data();
            for (std::size_t i = 0; i < gd.size(); ++i) gd[i] += beta_ * hd[i];
        }
        return grad;
    }

    // 1/2||X||^2 - <G, XS> + 1/2 <G, G S^T S> (+ beta/2 <G, HG>)
    [[nodiscard]] double objective(const Matrix& g) const {
        const Matrix gg = kernels::gemm(g, gram_);
        double f = half_x2_ - kernels::dot(g.data(), xs_.data()) + 0.5 * kernels::dot(g.data(), gg.data());
        if (h_) {
            const Matrix hg = kernels::gemm(*h_, g);
            f += 0.5 * beta_ * kernels::dot(g.data(), hg.data());
        }
        return f;
    }

    [[nodiscard]] double lipschitz() const {
        double l = spectral_norm(gram_);
        if (h_) l += beta_ * spectral_norm(*h_);
        return l;
    }

private:
    Matrix gram_;
    Matrix xs_;
    double half_x2_;
    const Matrix* h_;
    double beta_;
};

double full_objective(const Matrix& x_unfold, const Matrix& g2, const Matrix& subchain2,
                      const Matrix* h, double beta) {
    return subproblem_objective(g2, subchain2, x_unfold, h, beta);
}

}  // namespace

void SolverConfig::validate() const {
    if (t_max == 0) throw DomainError("t_max must be at least 1");
    if (max_sweeps == 0) throw DomainError("max_sweeps must be at least 1");
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and >= 0");
}

Matrix gradient_ntr(const Matrix& g2, const Matrix& subchain2, const Matrix& x_unfold) {
    require_shapes(g2, subchain2, x_unfold);
    return CoreProblem(subchain2, x_unfold, nullptr, 0.0).gradient(g2);
}

Matrix gradient_gntr(const Matrix& g2, const Matrix& subchain2, const Matrix& x_unfold,
                     const Matrix& h_g, double beta) {
    require_shapes(g2, subchain2, x_unfold);
    return CoreProblem(subchain2, x_unfold, &h_g, beta).gradient(g2);
}

double lipschitz_ntr(const Matrix& subchain2) {
    return spectral_norm(kernels::gemm_tn(subchain2, subchain2));
}

double lipschitz_gntr(const Matrix& subchain2, const Matrix& h_g, double beta) {
    return lipschitz_ntr(subchain2) + beta * spectral_norm(h_g);
}

double alpha_next(double alpha) { return (1.0 + std::sqrt(4.0 * alpha * alpha + 1.0)) / 2.0; }

Matrix search_point(const Matrix& g_curr, const Matrix& g_prev, double alpha_curr,
                    double alpha_nxt) {
    if (g_curr.rows() != g_prev.rows() || g_curr.cols() != g_prev.cols()) {
        throw DimensionError("search_point: iterates differ in shape");
    }
    Matrix y(g_curr.rows(), g_curr.cols());
    kernels::extrapolate(g_curr.data(), g_prev.data(), (alpha_curr - 1.0) / alpha_nxt, y.data());
    return y;
}

Matrix prox_step(const Matrix& y, const Matrix& grad_at_y, double lipschitz) {
    if (!(lipschitz > 0.0)) throw DegenerateError("prox_step: Lipschitz constant must be positive");
    if (y.rows() != grad_at_y.rows() || y.cols() != grad_at_y.cols()) {
        throw DimensionError("prox_step: gradient shape differs from search point");
    }
    Matrix out(y.rows(), y.cols());
    kernels::projected_step(y.data(), grad_at_y.data(), 1.0 / lipschitz, out.data());
    return out;
}

double subproblem_objective(const Matrix& g2, const Matrix& subchain2, const Matrix& x_unfold,
                            const Matrix* h_g, double beta) {
    require_shapes(g2, subchain2, x_unfold);
    const Matrix approx = kernels::gemm_nt(g2, subchain2);
    std::vector<double> resid(approx.size());
    const auto xd = x_unfold.data();
    const auto ad = approx.data();
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = xd[i] - ad[i];
    double f = 0.5 * kernels::dot(resid, resid);
    if (h_g) f += 0.5 * beta * laplacian_quadratic(*h_g, g2);
    return f;
}

Matrix solve_core(const Matrix& x_unfold, const Matrix& subchain2, const Matrix& g_init,
                  const SolverConfig& cfg, const Matrix* h_g, const StepObserver& observer,
                  std::size_t mode, std::size_t* restarts) {
    require_shapes(g_init, subchain2, x_unfold);
    const double beta = h_g ? cfg.beta : 0.0;
    const CoreProblem problem(subchain2, x_unfold, h_g, beta);

    ApgState st;
    st.lipschitz = problem.lipschitz();
    if (!(st.lipschitz > 0.0)) {
        throw DegenerateError("core subproblem has zero curvature (all-zero subchain)");
    }
    if (!std::isfinite(st.lipschitz)) throw NumericalError("non-finite Lipschitz constant");

    st.g_curr = g_init;
    st.g_prev = g_init;
    st.y = g_init;
    st.alpha = 1.0;
    double f_curr = problem.objective(st.g_curr);

    for (std::size_t t = 0; t < cfg.t_max; ++t) {
        Matrix next = prox_step(st.y, problem.gradient(st.y), st.lipschitz);
        double f_next = problem.objective(next);
        bool restarted = false;
        if (f_next > f_curr) {
            restarted = true;
            if (restarts) ++*restarts;
            st.alpha = 1.0;
            st.y = st.g_curr;
            next = prox_step(st.y, problem.gradient(st.y), st.lipschitz);
            f_next = problem.objective(next);
            if (f_next > f_curr) {
                next = st.g_curr;
                f_next = f_curr;
            }
        }
        if (observer) {
            observer(StepRecord{mode, x_unfold, subchain2, h_g, beta, st, next, restarted});
        }
        st.g_prev = std::move(st.g_curr);
        st.g_curr = std::move(next);
        f_curr = f_next;
        const double a_next = alpha_next(st.alpha);
        st.y = search_point(st.g_curr, st.g_prev, st.alpha, a_next);
        st.alpha = a_next;
    }
    return std::move(st.g_curr);
}

FitResult fit(const DenseTensor& x, const RankVector& ranks, const SolverConfig& cfg,
              const NeighborGraph* graph, const StepObserver& observer) {
    cfg.validate();
    const std::size_t d = x.order();
    if (d < 2) throw DimensionError("tensor ring fitting needs an order >= 2 tensor");
    if (ranks.size() != d) {
        throw DimensionError("rank vector has " + std::to_string(ranks.size()) +
                             " entries for an order-" + std::to_string(d) + " tensor");
    }
    if (!x.is_finite()) throw DomainError("data tensor has non-finite entries");
    if (!x.is_nonnegative()) throw DomainError("data tensor has negative entries");
    if (graph && graph->samples() != x.dim(d - 1)) {
        throw DimensionError("graph has " + std::to_string(graph->samples()) +
                             " nodes but the sample mode has size " + std::to_string(x.dim(d - 1)));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    TRCores cores = init_random(x.shape(), ranks, cfg.seed);
    std::vector<Matrix> unfoldings;
    unfoldings.reserve(d);
    for (std::size_t n = 0; n < d; ++n) unfoldings.push_back(unfold_tr(x, n));

    const Matrix* laplacian = graph ? &graph->laplacian : nullptr;
    const std::size_t last = d - 1;

    FitReport report;
    Matrix s2_last = subchain_unfold2(build_subchain(cores, last));
    double f_prev = full_objective(unfoldings[last], core_unfold2(cores, last), s2_last, laplacian,
                                   cfg.beta);
    report.initial_objective = f_prev;

    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        for (std::size_t n = 0; n < d; ++n) {
            Matrix s2 = subchain_unfold2(build_subchain(cores, n));
            const Matrix* h = n == last ? laplacian : nullptr;
            const Matrix g = solve_core(unfoldings[n], s2, core_unfold2(cores, n), cfg, h, observer,
                                        n, &report.momentum_restarts);
            const auto& old = cores.core(n);
            cores.replace_core(n, core_fold2(g, old.dim(0), old.dim(1), old.dim(2)));
            if (n == last) s2_last = std::move(s2);
        }
        const double f = full_objective(unfoldings[last], core_unfold2(cores, last), s2_last,
                                        laplacian, cfg.beta);
        if (!std::isfinite(f)) {
            throw NumericalError("objective became non-finite at sweep " + std::to_string(sweep + 1));
        }
        const double rel = f_prev > 0.0 ? std::abs(f_prev - f) / f_prev : 0.0;
        report.objective_per_sweep.push_back(f);
        report.rel_change_per_sweep.push_back(rel);
        report.seconds_per_sweep.push_back(elapsed());
        report.sweeps_run = sweep + 1;
        f_prev = f;
        if (rel < cfg.tol) {
            report.terminated_by = Termination::tolerance;
            break;
        }
    }
    report.wall_seconds = elapsed();
    return FitResult{std::move(cores), std::move(report)};
}

}  // namespace tring
