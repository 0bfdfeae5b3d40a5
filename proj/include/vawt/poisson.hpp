#pragma once

#include <memory>
#include <span>
#include <vector>

namespace vawt::alm2d {

/// Boundary behaviour of the pressure correction along one axis.
enum class AxisBoundary {
    NeumannNeumann,    // both sides have prescribed normal velocity
    NeumannDirichlet,  // prescribed velocity at the low end, zero pressure at the high end
    Periodic,
};

/// Cell-centered 5-point Laplacian on an nx-by-ny grid, row-major with x fastest.
class PoissonSolver {
public:
    enum class Preconditioner { Spectral, None };

    struct Stats {
        int iterations = 0;
        double relative_residual = 0.0;
    };

    PoissonSolver(int nx, int ny, double dx, double dy, AxisBoundary x_axis, AxisBoundary y_axis);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    /// out = L * phi with the boundary conditions built in.
    void apply(std::span<const double> phi, std::span<double> out) const;

    /// Exact solve through per-axis cosine/Fourier transforms. The constant null space,
    /// when present, is removed from rhs and solution.
    void spectral_solve(std::span<const double> rhs, std::span<double> phi) const;

    /// Conjugate gradients on -L to `tolerance` relative residual.
    Stats solve(std::span<const double> rhs, std::span<double> phi, double tolerance = 1e-10,
                Preconditioner preconditioner = Preconditioner::Spectral,
                int max_iterations = 0) const;

    bool singular() const noexcept { return singular_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }

private:
    struct Plans;

    int nx_, ny_;
    double dx_, dy_;
    AxisBoundary x_axis_, y_axis_;
    bool singular_;
    std::vector<double> eigen_;  // combined eigenvalue per transformed coefficient
    double normalization_ = 1.0;
    std::unique_ptr<Plans> plans_;
};

}  // namespace vawt::alm2d
