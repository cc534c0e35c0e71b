#include <exception>
#include <vector>

#include "chronoscale/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chronoscale::kernels {

namespace {

// Exceptions must not escape an OpenMP region; the first one is kept and
// rethrown after the join.
class FirstError {
public:
    template <typename Fn>
    void run(Fn&& fn) {
        if (failed_) return;
        try {
            fn();
        } catch (...) {
#pragma omp critical(chronoscale_first_error)
            {
                if (!error_) error_ = std::current_exception();
                failed_ = true;
            }
        }
    }

    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
    volatile bool failed_ = false;
};

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Eigen::MatrixXd inner_integrals_parallel(const TimeGrid& grid, const PairEval& h, const Eigen::MatrixXd& y) {
    const auto n = y.rows();
    const auto nn = static_cast<std::size_t>(n);
    const auto count = static_cast<long long>(grid.size());
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, count);
    FirstError guard;

    // Row cost grows with i; dynamic scheduling keeps threads balanced.
#pragma omp parallel
    {
        Eigen::VectorXd left(n), right(n), acc(n);
#pragma omp for schedule(dynamic, 16)
        for (long long i = 1; i < count; ++i) {
            guard.run([&] {
            const auto ii = static_cast<std::size_t>(i);
            const double s = grid.t(ii);
            acc.setZero();
            h(s, grid.t(0), std::span<const double>(y.col(0).data(), nn), std::span<double>(left.data(), nn));
            for (std::size_t k = 0; k < ii; ++k) {
                const auto next = static_cast<Eigen::Index>(k + 1);
                h(s, grid.t(k + 1), std::span<const double>(y.col(next).data(), nn),
                  std::span<double>(right.data(), nn));
                if (grid.right_scattered(k)) {
                    acc += grid[k].mu * left;
                } else {
                    acc += (0.5 * grid.step(k)) * (left + right);
                }
                left.swap(right);
            }
            z.col(static_cast<Eigen::Index>(i)) = acc;
            });
        }
    }
    guard.rethrow();
    return z;
}

Eigen::MatrixXd mild_sweep_parallel(const TimeGrid& grid, const PropagatorTable& table,
                                    const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing,
                                    MildQuadrature rule) {
    const auto count = static_cast<long long>(grid.size());
    Eigen::MatrixXd w(y0.size(), count);
    FirstError guard;

#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i) {
        guard.run([&] {
        const auto ii = static_cast<std::size_t>(i);
        Eigen::VectorXd acc = table.at(ii, 0) * y0;
        for (std::size_t k = 0; k < ii; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            if (grid.right_scattered(k)) {
                acc.noalias() += grid[k].mu * (table.at(ii, k + 1) * forcing.col(kk));
            } else if (rule == MildQuadrature::DeltaSum) {
                acc.noalias() += grid.step(k) * (table.at(ii, k) * forcing.col(kk));
            } else {
                acc.noalias() += (0.5 * grid.step(k)) * (table.at(ii, k) * forcing.col(kk) +
                                                         table.at(ii, k + 1) * forcing.col(kk + 1));
            }
        }
        w.col(static_cast<Eigen::Index>(i)) = acc;
        });
    }
    guard.rethrow();
    return w;
}

}  // namespace chronoscale::kernels
