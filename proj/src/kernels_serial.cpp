#include <string>

#include "chronoscale/calculus.hpp"
#include "chronoscale/error.hpp"
#include "chronoscale/kernels.hpp"

namespace chronoscale::kernels {

const char* to_string(MildQuadrature q) noexcept {
    return q == MildQuadrature::DeltaSum ? "delta_sum" : "trapezoid";
}

MildQuadrature quadrature_from_string(const std::string& name) {
    if (name == "delta_sum") return MildQuadrature::DeltaSum;
    if (name == "trapezoid") return MildQuadrature::Trapezoid;
    throw Error(ErrorCode::BadParams, "unknown quadrature '" + name + "'");
}

PropagatorTable::PropagatorTable(const TimeGrid& grid, const EvolutionCache& cache, std::size_t max_bytes)
    : grid_(&grid), cache_(&cache) {
    const std::size_t n = grid.size();
    const std::size_t pairs = n * (n + 1) / 2;
    if (pairs * sizeof(std::uint32_t) > max_bytes) return;

    pair_index_.resize(pairs);
    std::unordered_map<std::int64_t, std::uint32_t> slot;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = i * (i + 1) / 2;
        for (std::size_t j = 0; j <= i; ++j) {
            const double dt = grid.t(i) - grid.t(j);
            const auto key = EvolutionCache::key(dt);
            auto [it, fresh] = slot.try_emplace(key, static_cast<std::uint32_t>(mats_.size()));
            if (fresh) mats_.push_back(cache.get(dt));
            pair_index_[row + j] = it->second;
        }
    }
}

const Eigen::MatrixXd& PropagatorTable::at(std::size_t i, std::size_t j) const {
    if (pair_index_.empty()) return cache_->get(grid_->t(i) - grid_->t(j));
    return mats_[pair_index_[i * (i + 1) / 2 + j]];
}

Eigen::MatrixXd inner_integrals_serial(const TimeGrid& grid, const PairEval& h, const Eigen::MatrixXd& y) {
    const auto n = y.rows();
    const auto count = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, count);
    for (Eigen::Index i = 1; i < count; ++i) {
        Eigen::MatrixXd samples(n, i + 1);
        for (Eigen::Index k = 0; k <= i; ++k) {
            h(grid.t(static_cast<std::size_t>(i)), grid.t(static_cast<std::size_t>(k)),
              std::span<const double>(y.col(k).data(), static_cast<std::size_t>(n)),
              std::span<double>(samples.col(k).data(), static_cast<std::size_t>(n)));
        }
        z.col(i) = delta_integral(grid, samples, 0, static_cast<std::size_t>(i));
    }
    return z;
}

Eigen::MatrixXd mild_sweep_serial(const TimeGrid& grid, const EvolutionCache& cache,
                                  const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing,
                                  MildQuadrature rule) {
    const auto count = grid.size();
    Eigen::MatrixXd w(y0.size(), static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        const double s = grid.t(i);
        Eigen::VectorXd acc = cache.get(s - grid.t(0)) * y0;
        for (std::size_t k = 0; k < i; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            if (grid.right_scattered(k)) {
                acc.noalias() += grid[k].mu * (cache.get(s - grid.t(k + 1)) * forcing.col(kk));
            } else if (rule == MildQuadrature::DeltaSum) {
                acc.noalias() += grid.step(k) * (cache.get(s - grid.t(k)) * forcing.col(kk));
            } else {
                acc.noalias() += (0.5 * grid.step(k)) * (cache.get(s - grid.t(k)) * forcing.col(kk) +
                                                         cache.get(s - grid.t(k + 1)) * forcing.col(kk + 1));
            }
        }
        w.col(static_cast<Eigen::Index>(i)) = acc;
    }
    return w;
}

}  // namespace chronoscale::kernels
