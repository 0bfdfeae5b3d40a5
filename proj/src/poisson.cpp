#include "vawt/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vawt/vec2.hpp"

namespace vawt::alm2d {

namespace {

fftw_r2r_kind forward_kind(AxisBoundary b) {
    switch (b) {
        case AxisBoundary::NeumannNeumann: return FFTW_REDFT10;
        case AxisBoundary::NeumannDirichlet: return FFTW_REDFT11;
        case AxisBoundary::Periodic: return FFTW_R2HC;
    }
    return FFTW_REDFT10;
}

fftw_r2r_kind inverse_kind(AxisBoundary b) {
    switch (b) {
        case AxisBoundary::NeumannNeumann: return FFTW_REDFT01;
        case AxisBoundary::NeumannDirichlet: return FFTW_REDFT11;
        case AxisBoundary::Periodic: return FFTW_HC2R;
    }
    return FFTW_REDFT01;
}

double transform_scale(AxisBoundary b, int n) {
    return b == AxisBoundary::Periodic ? static_cast<double>(n) : 2.0 * n;
}

std::vector<double> axis_eigenvalues(AxisBoundary b, int n, double h) {
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        double arg = 0.0;
        switch (b) {
            case AxisBoundary::NeumannNeumann: arg = kPi * m / n; break;
            case AxisBoundary::NeumannDirichlet: arg = kPi * (m + 0.5) / n; break;
            case AxisBoundary::Periodic: {
                const int k = m <= n / 2 ? m : n - m;
                arg = kTwoPi * k / n;
                break;
            }
        }
        lambda[static_cast<std::size_t>(m)] = -(2.0 - 2.0 * std::cos(arg)) / (h * h);
    }
    return lambda;
}

}  // namespace

struct PoissonSolver::Plans {
    std::vector<double> buffer;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    ~Plans() {
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

PoissonSolver::PoissonSolver(int nx, int ny, double dx, double dy, AxisBoundary x_axis,
                             AxisBoundary y_axis)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), x_axis_(x_axis), y_axis_(y_axis) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("PoissonSolver: grid too small");
    if (!(dx > 0.0 && dy > 0.0)) throw std::invalid_argument("PoissonSolver: bad spacing");
    singular_ = x_axis != AxisBoundary::NeumannDirichlet && y_axis != AxisBoundary::NeumannDirichlet;

    const auto lx = axis_eigenvalues(x_axis, nx, dx);
    const auto ly = axis_eigenvalues(y_axis, ny, dy);
    eigen_.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            eigen_[static_cast<std::size_t>(j) * nx + i] = lx[i] + ly[j];
    normalization_ = transform_scale(x_axis, nx) * transform_scale(y_axis, ny);

    plans_ = std::make_unique<Plans>();
    plans_->buffer.resize(eigen_.size());
    // FFTW_ESTIMATE keeps the chosen algorithm, and so the rounding, identical run to run.
    plans_->forward = fftw_plan_r2r_2d(ny, nx, plans_->buffer.data(), plans_->buffer.data(),
                                       forward_kind(y_axis), forward_kind(x_axis), FFTW_ESTIMATE);
    plans_->inverse = fftw_plan_r2r_2d(ny, nx, plans_->buffer.data(), plans_->buffer.data(),
                                       inverse_kind(y_axis), inverse_kind(x_axis), FFTW_ESTIMATE);
    if (!plans_->forward || !plans_->inverse)
        throw std::runtime_error("PoissonSolver: FFTW planning failed");
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

void PoissonSolver::apply(std::span<const double> phi, std::span<double> out) const {
    const double idx2 = 1.0 / (dx_ * dx_);
    const double idy2 = 1.0 / (dy_ * dy_);
    const auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(j) * nx_ + i]; };
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const double c = at(i, j);
            double west, east, south, north;
            if (i > 0) west = at(i - 1, j);
            else west = x_axis_ == AxisBoundary::Periodic ? at(nx_ - 1, j) : c;
            if (i < nx_ - 1) east = at(i + 1, j);
            else if (x_axis_ == AxisBoundary::Periodic) east = at(0, j);
            else if (x_axis_ == AxisBoundary::NeumannDirichlet) east = -c;
            else east = c;
            if (j > 0) south = at(i, j - 1);
            else south = y_axis_ == AxisBoundary::Periodic ? at(i, ny_ - 1) : c;
            if (j < ny_ - 1) north = at(i, j + 1);
            else if (y_axis_ == AxisBoundary::Periodic) north = at(i, 0);
            else if (y_axis_ == AxisBoundary::NeumannDirichlet) north = -c;
            else north = c;
            out[static_cast<std::size_t>(j) * nx_ + i] =
                (west - 2.0 * c + east) * idx2 + (south - 2.0 * c + north) * idy2;
        }
    }
}

void PoissonSolver::spectral_solve(std::span<const double> rhs, std::span<double> phi) const {
    auto& buf = plans_->buffer;
    std::copy(rhs.begin(), rhs.end(), buf.begin());
    fftw_execute(plans_->forward);
    for (std::size_t k = 0; k < buf.size(); ++k) {
        const double lambda = eigen_[k];
        buf[k] = lambda == 0.0 ? 0.0 : buf[k] / (lambda * normalization_);
    }
    fftw_execute(plans_->inverse);
    std::copy(buf.begin(), buf.end(), phi.begin());
}

PoissonSolver::Stats PoissonSolver::solve(std::span<const double> rhs, std::span<double> phi,
                                          double tolerance, Preconditioner preconditioner,
                                          int max_iterations) const {
    const std::size_t n = eigen_.size();
    if (rhs.size() != n || phi.size() != n)
        throw std::invalid_argument("PoissonSolver::solve: size mismatch");
    if (max_iterations <= 0) max_iterations = static_cast<int>(4 * n);

    auto remove_mean = [&](std::vector<double>& v) {
        if (!singular_) return;
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
        for (auto& x : v) x -= mean;
    };
    auto dotp = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    };

    // Work with A = -L, which is symmetric positive (semi-)definite.
    std::vector<double> b(rhs.begin(), rhs.end());
    for (auto& x : b) x = -x;
    remove_mean(b);
    const double b_norm = std::sqrt(dotp(b, b));

    std::vector<double> x(n, 0.0), r = b, z(n), p(n), ap(n);
    Stats stats;
    if (b_norm == 0.0) {
        std::fill(phi.begin(), phi.end(), 0.0);
        return stats;
    }

    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (preconditioner == Preconditioner::Spectral) {
            spectral_solve(in, out);  // solves L out = in, so negate for A
            for (auto& v : out) v = -v;
        } else {
            out = in;
        }
        remove_mean(out);
    };

    precondition(r, z);
    p = z;
    double rz = dotp(r, z);
    double res = 1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        apply(p, ap);
        for (auto& v : ap) v = -v;
        const double pap = dotp(p, ap);
        if (pap <= 0.0) break;
        const double alpha = rz / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        stats.iterations = it;
        res = std::sqrt(dotp(r, r)) / b_norm;
        if (res <= tolerance) break;
        precondition(r, z);
        const double rz_new = dotp(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    stats.relative_residual = res;
    remove_mean(x);
    std::copy(x.begin(), x.end(), phi.begin());
    return stats;
}

}  // namespace vawt::alm2d
