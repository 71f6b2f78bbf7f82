#include "cavtherm/discrete_bath.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavtherm/units.hpp"

namespace cavtherm {

namespace {

// 16-point Gauss-Legendre on [-1,1] (same rule as the kernel quadrature,
// used here per bin).
constexpr double kNodes[8] = {0.0950125098376374, 0.2816035507792589,
                              0.4580167776572274, 0.6178762444026438,
                              0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double kWeights[8] = {0.1894506104550685, 0.1826034150449236,
                                0.1691565193950025, 0.1495959888165767,
                                0.1246289712555339, 0.0951585116824928,
                                0.0622535239386479, 0.0271524594117541};

// Integrals of J and omega*J over [lo, hi], composite so that wide bins
// still resolve the line: panel width capped at a quarter line width.
void bin_moments(const QGaussianSpectrum& spin, double lo, double hi,
                 double& mass, double& first) {
    const auto panels = static_cast<std::size_t>(std::clamp(
        std::ceil((hi - lo) / (0.25 * spin.d)), 1.0, 4096.0));
    const double pw = (hi - lo) / static_cast<double>(panels);
    mass = first = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double c = lo + (static_cast<double>(p) + 0.5) * pw;
        const double h = 0.5 * pw;
        for (int m = 0; m < 8; ++m)
            for (const double x : {c - h * kNodes[m], c + h * kNodes[m]}) {
                const double j = h * kWeights[m] * spin.density(x);
                mass += j;
                first += x * j;
            }
    }
}

} // namespace

namespace {

// Gauss quadrature with respect to the measure J_s(w)/2pi on the window:
// Stieltjes-Lanczos on a fine cell discretization builds the Jacobi
// matrix; its eigenvalues are the mode frequencies and the squared first
// eigenvector components carry the weights. Matching the first 2M
// spectral moments keeps the finite bath faithful far longer than
// per-bin midpoint binning.
void gauss_modes(const QGaussianSpectrum& spin, std::size_t M, double lo,
                 double hi, std::vector<double>& freqs,
                 std::vector<double>& weights, double& total) {
    const std::size_t cells = std::max<std::size_t>(4096, 32 * M);
    Eigen::VectorXd x(static_cast<Eigen::Index>(cells));
    Eigen::VectorXd w(static_cast<Eigen::Index>(cells));
    const double cw = (hi - lo) / static_cast<double>(cells);
    for (std::size_t k = 0; k < cells; ++k) {
        const double a = lo + cw * static_cast<double>(k);
        double mass = 0.0, first = 0.0;
        bin_moments(spin, a, a + cw, mass, first);
        const auto i = static_cast<Eigen::Index>(k);
        w(i) = mass / (2.0 * units::pi);
        x(i) = (mass > 0.0) ? first / mass : a + 0.5 * cw;
    }
    total = w.sum();

    // Lanczos with full reorthogonalization under <a,b> = sum w_k a_k b_k
    const auto m = static_cast<Eigen::Index>(M);
    Eigen::MatrixXd Q(static_cast<Eigen::Index>(cells), m);
    Eigen::VectorXd alpha(m), beta(m);
    Q.col(0).setConstant(1.0 / std::sqrt(total));
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::VectorXd r = x.cwiseProduct(Q.col(j));
        alpha(j) = Q.col(j).cwiseProduct(w).dot(r);
        if (j + 1 == m)
            break;
        for (Eigen::Index i = 0; i <= j; ++i)
            r -= Q.col(i).cwiseProduct(w).dot(r) * Q.col(i);
        for (Eigen::Index i = 0; i <= j; ++i)
            r -= Q.col(i).cwiseProduct(w).dot(r) * Q.col(i);
        const double b = std::sqrt(r.cwiseProduct(w).dot(r));
        if (!(b > 0.0))
            throw NumericalError("discretize: spectral measure has fewer than "
                                 "M distinct support points");
        beta(j + 1) = b;
        Q.col(j + 1) = r / b;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        T(j, j) = alpha(j);
        if (j > 0)
            T(j, j - 1) = T(j - 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(T);
    if (solver.info() != Eigen::Success)
        throw NumericalError("discretize: Jacobi matrix diagonalization failed");
    freqs.resize(M);
    weights.resize(M);
    for (Eigen::Index j = 0; j < m; ++j) {
        freqs[static_cast<std::size_t>(j)] = solver.eigenvalues()(j);
        const double c = solver.eigenvectors()(0, j);
        weights[static_cast<std::size_t>(j)] = total * c * c;
    }
}

} // namespace

DiscreteBath discretize(const SpectralEnvironment& env, std::size_t M,
                        double window_low, double window_high,
                        bool include_leakage) {
    if (M < 1)
        throw ValidationError("discretize: M must be at least 1");
    if (!(window_low < window_high))
        throw ValidationError("discretize: empty frequency window");

    DiscreteBath bath;
    bath.thermal_scale = env.thermal_scale;
    const double width = (window_high - window_low) / static_cast<double>(M);
    // conservative validity bound: Gauss nodes cluster where the weight
    // sits, so their local spacing is at most the uniform one
    bath.recurrence_time = 2.0 * units::pi / width;

    if (env.spin) {
        std::vector<double> weights;
        double total = 0.0;
        gauss_modes(*env.spin, M, window_low, window_high, bath.freqs, weights,
                    total);
        const double full = env.spin->Omega * env.spin->Omega;
        if (!include_leakage && total < 0.999 * full) {
            std::ostringstream msg;
            msg << "discretize: window covers only " << total / full
                << " of the spectral weight (need >= 0.999)";
            throw ValidationError(msg.str());
        }
        bath.couplings.resize(M);
        for (std::size_t j = 0; j < M; ++j) {
            double g2 = weights[j];
            if (include_leakage)
                g2 += 2.0 * env.kappa * width / (2.0 * units::pi);
            bath.couplings[j] = std::sqrt(std::max(0.0, g2));
        }
    } else {
        // leakage-only comb on uniform bins (opt-in; spinless otherwise)
        bath.freqs.resize(M);
        bath.couplings.resize(M);
        for (std::size_t j = 0; j < M; ++j) {
            bath.freqs[j] = window_low + (static_cast<double>(j) + 0.5) * width;
            const double g2 = include_leakage
                                  ? 2.0 * env.kappa * width / (2.0 * units::pi)
                                  : 0.0;
            bath.couplings[j] = std::sqrt(g2);
        }
    }
    return bath;
}

namespace {

struct EigenSystem {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs; // columns
};

EigenSystem diagonalize(const DiscreteBath& bath, double omega_c) {
    const auto M = static_cast<Eigen::Index>(bath.freqs.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M + 1, M + 1);
    H(0, 0) = omega_c;
    for (Eigen::Index j = 0; j < M; ++j) {
        H(j + 1, j + 1) = bath.freqs[static_cast<std::size_t>(j)];
        H(0, j + 1) = H(j + 1, 0) = bath.couplings[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success)
        throw NumericalError("discrete_bath: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

} // namespace

ComplexSeries propagate_u(const DiscreteBath& bath, double omega_c,
                          const TimeGrid& grid, double frame_freq) {
    grid.validate();
    const EigenSystem es = diagonalize(bath, omega_c);
    const auto K = es.evals.size();
    ComplexSeries u(grid.n_steps);
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double t = grid.time(i) - grid.t0;
        Complex acc{0.0, 0.0};
        for (Eigen::Index m = 0; m < K; ++m) {
            const double w = es.evecs(0, m) * es.evecs(0, m);
            const double ph = (es.evals(m) - frame_freq) * t;
            acc += w * Complex{std::cos(ph), -std::sin(ph)};
        }
        u[i] = acc;
    }
    return u;
}

RealSeries propagate_v(const DiscreteBath& bath, double omega_c,
                       const TimeGrid& grid) {
    grid.validate();
    const EigenSystem es = diagonalize(bath, omega_c);
    const auto K = es.evals.size();
    const auto M = static_cast<Eigen::Index>(bath.freqs.size());
    RealSeries v(grid.n_steps, 0.0);
    if (bath.thermal_scale == 0.0)
        return v;

    RealSeries nbar(static_cast<std::size_t>(M));
    for (Eigen::Index j = 0; j < M; ++j)
        nbar[static_cast<std::size_t>(j)] =
            bose_occupation(bath.freqs[static_cast<std::size_t>(j)], bath.thermal_scale);

    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double t = grid.time(i) - grid.t0;
        double acc = 0.0;
        for (Eigen::Index j = 0; j < M; ++j) {
            Complex amp{0.0, 0.0};
            for (Eigen::Index m = 0; m < K; ++m) {
                const double w = es.evecs(0, m) * es.evecs(j + 1, m);
                const double ph = es.evals(m) * t;
                amp += w * Complex{std::cos(ph), -std::sin(ph)};
            }
            acc += nbar[static_cast<std::size_t>(j)] * std::norm(amp);
        }
        v[i] = acc;
    }
    return v;
}

} // namespace cavtherm
