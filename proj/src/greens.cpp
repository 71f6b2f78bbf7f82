#include "cavtherm/greens.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "cavtherm/series.hpp"
#include "csv_util.hpp"

namespace cavtherm {

namespace {

void check_kernels(const KernelTable& kernels, const TimeGrid& grid) {
    if (kernels.dt != grid.dt)
        throw ValidationError("greens_solver: kernel table dt does not match grid");
    if (kernels.n_steps < grid.n_steps)
        throw ValidationError("greens_solver: kernel table does not cover the grid");
}

// Trapezoidal memory sum dt * sum_{j=0}^{n} w_j g[n-j] u[j], optionally
// excluding the j = n term (used by the implicit step).
Complex memory_sum(const ComplexSeries& g, const ComplexSeries& u, std::size_t n,
                   double dt, bool include_last) {
    if (n == 0)
        return include_last ? 0.5 * dt * g[0] * u[0] : Complex{0.0, 0.0};
    Complex s = 0.5 * g[n] * u[0];
    for (std::size_t j = 1; j < n; ++j)
        s += g[n - j] * u[j];
    if (include_last)
        s += 0.5 * g[0] * u[n];
    return dt * s;
}

// RAII wrapper around the fixed-size FFTW plans used by the Toeplitz
// quadratic form.
class ToeplitzForm {
public:
    // any embedding length >= 2n-1 preserves the Toeplitz product; a power
    // of two keeps the FFTs fast for prime-ish n
    ToeplitzForm(const ComplexSeries& kernel_col, std::size_t n)
        : n_(n), len_(std::bit_ceil(2 * n)) {
        buf_ = fftw_alloc_complex(len_);
        spec_ = fftw_alloc_complex(len_);
        khat_ = fftw_alloc_complex(len_);
        fwd_ = fftw_plan_dft_1d(static_cast<int>(len_), buf_, spec_, FFTW_FORWARD,
                                FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_1d(static_cast<int>(len_), spec_, buf_, FFTW_BACKWARD,
                                FFTW_ESTIMATE);
        // circulant embedding of the Hermitian Toeplitz matrix
        // T_{jk} = kernel((j-k)dt), kernel(-s) = conj(kernel(s))
        for (std::size_t i = 0; i < len_; ++i)
            buf_[i][0] = buf_[i][1] = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            buf_[k][0] = kernel_col[k].real();
            buf_[k][1] = kernel_col[k].imag();
        }
        for (std::size_t k = 1; k < n_; ++k) {
            buf_[len_ - k][0] = kernel_col[k].real();
            buf_[len_ - k][1] = -kernel_col[k].imag();
        }
        fftw_execute(fwd_);
        for (std::size_t i = 0; i < len_; ++i) {
            khat_[i][0] = spec_[i][0];
            khat_[i][1] = spec_[i][1];
        }
    }

    ~ToeplitzForm() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(buf_);
        fftw_free(spec_);
        fftw_free(khat_);
    }

    ToeplitzForm(const ToeplitzForm&) = delete;
    ToeplitzForm& operator=(const ToeplitzForm&) = delete;

    // a^T T conj(a) for a vector supported on the first m entries.
    Complex quadratic_form(const ComplexSeries& a, std::size_t m) {
        for (std::size_t i = 0; i < len_; ++i)
            buf_[i][0] = buf_[i][1] = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            buf_[j][0] = a[j].real();
            buf_[j][1] = -a[j].imag(); // conj(a)
        }
        fftw_execute(fwd_);
        for (std::size_t i = 0; i < len_; ++i) {
            const double re = spec_[i][0] * khat_[i][0] - spec_[i][1] * khat_[i][1];
            const double im = spec_[i][0] * khat_[i][1] + spec_[i][1] * khat_[i][0];
            spec_[i][0] = re;
            spec_[i][1] = im;
        }
        fftw_execute(inv_);
        const double norm = 1.0 / static_cast<double>(len_);
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < m; ++j)
            acc += a[j] * Complex{buf_[j][0] * norm, buf_[j][1] * norm};
        return acc;
    }

private:
    std::size_t n_, len_;
    fftw_complex* buf_;
    fftw_complex* spec_;
    fftw_complex* khat_;
    fftw_plan fwd_, inv_;
};

} // namespace

ComplexSeries solve_u(const KernelTable& kernels, const TimeGrid& grid) {
    grid.validate();
    check_kernels(kernels, grid);
    const std::size_t n = grid.n_steps;
    const double dt = grid.dt;
    const double kappa = kernels.kappa_local;
    const ComplexSeries& g = kernels.g_vals;

    ComplexSeries u(n);
    u[0] = Complex{1.0, 0.0};
    // implicit trapezoidal step: the j = n+1 memory term and the local
    // damping are solved for linearly
    const Complex denom = 1.0 + 0.5 * dt * kappa + 0.25 * dt * dt * g[0];
    Complex f_prev = -kappa * u[0] - memory_sum(g, u, 0, dt, true);
    for (std::size_t m = 0; m + 1 < n; ++m) {
        const Complex s_part = memory_sum(g, u, m + 1, dt, false);
        u[m + 1] = (u[m] + 0.5 * dt * (f_prev - s_part)) / denom;
        f_prev = -kappa * u[m + 1] - (s_part + 0.5 * dt * g[0] * u[m + 1]);
    }

    for (std::size_t m = 0; m < n; ++m) {
        if (std::abs(u[m]) > 1.0 + 1e-9) {
            std::ostringstream msg;
            msg << "solve_u: |u| = " << std::abs(u[m]) << " exceeds 1 at t = "
                << grid.time(m) << " ns (unstable kernel or step too large)";
            throw NumericalError(msg.str());
        }
    }
    return u;
}

ComplexSeries u_derivative(const ComplexSeries& u, const KernelTable& kernels,
                           const TimeGrid& grid) {
    check_kernels(kernels, grid);
    const double kappa = kernels.kappa_local;
    ComplexSeries du(u.size());
    for (std::size_t m = 0; m < u.size(); ++m)
        du[m] = -kappa * u[m] - memory_sum(kernels.g_vals, u, m, grid.dt, true);
    return du;
}

namespace {

// Trapezoidal convolution of `ker` with the drive envelope restricted to
// its support: weights are 1/2 at the two boundary indices of the
// intersection of [0, n] with the drive window, 1 inside.
Complex drive_convolution(const ComplexSeries& ker, const ComplexSeries& f,
                          std::size_t n, std::ptrdiff_t j_on, std::ptrdiff_t j_off,
                          double dt) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j_on);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n), j_off);
    if (lo >= hi)
        return {0.0, 0.0};
    Complex s = 0.5 * (ker[n - lo] * f[lo] + ker[n - hi] * f[hi]);
    for (std::ptrdiff_t j = lo + 1; j < hi; ++j)
        s += ker[n - j] * f[j];
    return dt * s;
}

} // namespace

void solve_y(const ComplexSeries& u, const ComplexSeries& udot,
             const DriveProtocol& drive, const TimeGrid& grid, double frame_freq,
             ComplexSeries& y_out, ComplexSeries& ydot_out) {
    const std::size_t n = grid.n_steps;
    y_out.assign(n, Complex{0.0, 0.0});
    ydot_out.assign(n, Complex{0.0, 0.0});
    if (drive.kind == DriveProtocol::Kind::Off)
        return;
    drive.validate();
    if (std::abs(drive.drive_freq - frame_freq) * grid.dt > 0.5)
        throw ValidationError(
            "solve_y: drive detuning from the rotating frame is under-resolved "
            "by the time step (|omega_d - frame_freq|*dt > 0.5)");

    ComplexSeries f(n);
    for (std::size_t j = 0; j < n; ++j)
        f[j] = drive.envelope_rot(grid.time(j), frame_freq);
    const double dt = grid.dt;
    const auto j_on =
        static_cast<std::ptrdiff_t>(std::llround((drive.t_on - grid.t0) / dt));
    const auto j_off =
        static_cast<std::ptrdiff_t>(std::llround((drive.t_off - grid.t0) / dt));
    const Complex mi{0.0, -1.0};
    for (std::size_t m = 0; m < n; ++m) {
        y_out[m] = mi * drive_convolution(u, f, m, j_on, j_off, dt);
        ydot_out[m] = mi * (f[m] + drive_convolution(udot, f, m, j_on, j_off, dt));
    }
}

void solve_v_diag(const ComplexSeries& u, const KernelTable& kernels,
                  const TimeGrid& grid, RealSeries& v_out, RealSeries& vdot_out) {
    check_kernels(kernels, grid);
    const std::size_t n = grid.n_steps;
    const double dt = grid.dt;
    v_out.assign(n, 0.0);
    vdot_out.assign(n, 0.0);

    bool thermal = false;
    for (const auto& z : kernels.gt_vals)
        if (z != Complex{0.0, 0.0}) {
            thermal = true;
            break;
        }
    if (thermal) {
        ToeplitzForm form(kernels.gt_vals, n);
        ComplexSeries a(n);
        for (std::size_t m = 1; m < n; ++m) {
            // a_j = w_j * u(t_m - t_j), trapezoidal weights on [0, t_m]
            for (std::size_t j = 0; j <= m; ++j)
                a[j] = u[m - j];
            a[0] *= 0.5;
            a[m] *= 0.5;
            const Complex q = dt * dt * form.quadratic_form(a, m + 1);
            if (std::abs(q.imag()) > 1e-12 * std::max(1.0, std::abs(q)))
                throw NumericalError("solve_v_diag: quadratic form lost hermiticity");
            if (q.real() < -1e-10) {
                std::ostringstream msg;
                msg << "solve_v_diag: negative correlation v(t,t) = " << q.real()
                    << " at t = " << grid.time(m) << " ns (kernel corruption)";
                throw NumericalError(msg.str());
            }
            v_out[m] = q.real();
        }
    }
    vdot_out = differentiate(v_out, dt);
}

GreensSolution solve_greens(const KernelTable& kernels, const TimeGrid& grid,
                            const DriveProtocol& drive) {
    GreensSolution sol;
    sol.grid = grid;
    sol.frame_freq = kernels.frame_freq;
    sol.u = solve_u(kernels, grid);
    sol.udot = u_derivative(sol.u, kernels, grid);
    solve_y(sol.u, sol.udot, drive, grid, kernels.frame_freq, sol.y, sol.ydot);
    solve_v_diag(sol.u, kernels, grid, sol.v_diag, sol.v_dot);
    return sol;
}

void write_greens_csv(const GreensSolution& sol, std::ostream& os) {
    using detail::fmt;
    detail::put_row(os, "t_ns,re_u,im_u,re_y,im_y,v,v_dot");
    for (std::size_t i = 0; i < sol.grid.n_steps; ++i) {
        std::string row = fmt(sol.grid.time(i));
        row += "," + fmt(sol.u[i].real());
        row += "," + fmt(sol.u[i].imag());
        row += "," + fmt(sol.y[i].real());
        row += "," + fmt(sol.y[i].imag());
        row += "," + fmt(sol.v_diag[i]);
        row += "," + fmt(sol.v_dot[i]);
        detail::put_row(os, row);
    }
}

} // namespace cavtherm
