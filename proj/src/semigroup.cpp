#include "chronoscale/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "chronoscale/calculus.hpp"
#include "chronoscale/error.hpp"

namespace chronoscale {

Generator::Generator(Eigen::MatrixXd a) : a_(std::move(a)) {
    if (a_.rows() < 1 || a_.rows() != a_.cols()) {
        throw Error(ErrorCode::BadParams, "generator must be a non-empty square matrix");
    }
    if (!a_.allFinite()) throw Error(ErrorCode::BadParams, "generator has non-finite entries");
}

double Generator::spectral_abscissa() const {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a_, false);
    return es.eigenvalues().real().maxCoeff();
}

bool Generator::dissipative() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_ + a_.transpose(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= 1e-12;
}

namespace {

// Higham (2005) degree-13 coefficients and the matching 1-norm bound.
constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Eigen::MatrixXd evolve(const Generator& g, double dt) {
    if (dt < 0.0) {
        if (dt > -1e-12) {
            dt = 0.0;
        } else {
            throw Error(ErrorCode::BadParams, "evolve requires dt >= 0");
        }
    }
    const auto n = g.n();
    const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
    if (dt == 0.0 || g.matrix().isZero(0.0)) return ident;

    Eigen::MatrixXd a = dt * g.matrix();
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm1)) throw Error(ErrorCode::Overflow, "dt*A is not finite");
    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
        a /= std::ldexp(1.0, squarings);
    }

    const Eigen::MatrixXd a2 = a * a;
    const Eigen::MatrixXd a4 = a2 * a2;
    const Eigen::MatrixXd a6 = a4 * a2;
    const auto& b = kPade13;
    const Eigen::MatrixXd u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                                    b[5] * a4 + b[3] * a2 + b[1] * ident;
    const Eigen::MatrixXd u = a * u_inner;
    const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                              b[2] * a2 + b[0] * ident;
    Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) {
        r = r * r;
        if (!r.allFinite()) break;
    }
    if (!r.allFinite()) {
        throw Error(ErrorCode::Overflow, "exp(dt*A) overflows at dt = " + std::to_string(dt));
    }
    return r;
}

double spectral_norm(const Eigen::MatrixXd& m, double tol) {
    if (m.size() == 0) return 0.0;
    if (m.size() == 1) return std::abs(m(0, 0));
    const Eigen::MatrixXd gram = m.transpose() * m;
    // Deterministic start with no symmetry that could align with a null space.
    Eigen::VectorXd x(gram.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = 1.0 + 0.1 * static_cast<double>(i + 1);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd y = gram * x;
        const double next = x.dot(y);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        x = y / ny;
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(0.0, lambda));
}

namespace {

constexpr std::size_t kMaxAnchors = 256;

std::vector<std::size_t> anchor_indices(std::size_t n) {
    std::vector<std::size_t> anchors;
    if (n <= kMaxAnchors) {
        for (std::size_t i = 0; i < n; ++i) anchors.push_back(i);
        return anchors;
    }
    for (std::size_t k = 0; k < kMaxAnchors; ++k) anchors.push_back(k * (n - 1) / (kMaxAnchors - 1));
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
    return anchors;
}

// Visits every sampled pair (anchor j, node i ≥ j) with ‖T(t_i − t_j)‖₂ and
// e_{⊖α}(t_i, t_j).
template <typename Visit>
std::size_t for_each_pair(const Generator& g, double alpha, const TimeGrid& grid, Visit&& visit) {
    const auto expo = ominus_exponent_table(alpha, grid);
    std::unordered_map<std::int64_t, double> norms;
    std::size_t count = 0;
    for (const auto j : anchor_indices(grid.size())) {
        for (std::size_t i = j; i < grid.size(); ++i) {
            const double dt = grid.t(i) - grid.t(j);
            const auto key = EvolutionCache::key(dt);
            auto it = norms.find(key);
            if (it == norms.end()) {
                it = norms.emplace(key, spectral_norm(evolve(g, EvolutionCache::dt_of(key)))).first;
            }
            visit(it->second, std::exp(expo[i] - expo[j]));
            ++count;
        }
    }
    return count;
}

}  // namespace

StabilityCert estimate_stability(const Generator& g, const TimeGrid& grid, double safety) {
    const double abscissa = g.spectral_abscissa();
    if (!(abscissa < 0.0)) {
        throw Error(ErrorCode::NotStable, "spectral abscissa " + std::to_string(abscissa) + " >= 0");
    }
    if (!(safety > 0.0 && safety < 1.0)) throw Error(ErrorCode::BadParams, "safety factor must lie in (0, 1)");
    StabilityCert cert;
    cert.alpha = safety * (-abscissa);
    double m = 1.0;
    cert.pairs_checked = for_each_pair(g, cert.alpha, grid, [&](double norm, double e) {
        m = std::max(m, norm / e);
    });
    cert.M = m;
    cert.max_violation = stability_violation(cert, g, grid);
    cert.verified_steps_per_unit = grid.steps_per_unit();
    return cert;
}

double stability_violation(const StabilityCert& cert, const Generator& g, const TimeGrid& grid) {
    double worst = -std::numeric_limits<double>::infinity();
    for_each_pair(g, cert.alpha, grid, [&](double norm, double e) {
        worst = std::max(worst, norm - cert.M * e);
    });
    return std::max(0.0, worst);
}

std::int64_t EvolutionCache::key(double dt) {
    return std::llround(std::ldexp(dt, 40));
}

double EvolutionCache::dt_of(std::int64_t key) {
    return std::ldexp(static_cast<double>(key), -40);
}

const Eigen::MatrixXd& EvolutionCache::get(double dt) const {
    const auto k = key(dt);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(k); it != cache_.end()) return it->second;
    }
    Eigen::MatrixXd value = evolve(g_, dt_of(k));
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(k, std::move(value)).first->second;
}

std::size_t EvolutionCache::size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

}  // namespace chronoscale
