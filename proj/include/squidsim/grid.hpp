#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace squidsim {

/// Uniform 1D grid in the dimensionless flux coordinate. Endpoints are hard
/// walls for the eigensolver; parity classification requires x_min = -x_max.
struct Grid {
    double x_min = -0.8;
    double x_max = 0.8;
    int n_points = 4001;

    Grid() = default;
    Grid(double xmin, double xmax, int n) : x_min(xmin), x_max(xmax), n_points(n) {
        validate();
    }

    void validate() const {
        if (!(x_min < 0.0 && 0.0 < x_max))
            throw std::invalid_argument("grid must straddle x = 0");
        if (n_points < 501)
            throw std::invalid_argument("grid needs at least 501 points");
    }

    double dx() const { return (x_max - x_min) / (n_points - 1); }

    bool symmetric() const {
        return std::abs(x_min + x_max) <= 1e-12 * (x_max - x_min);
    }

    Eigen::VectorXd points() const {
        Eigen::VectorXd x(n_points);
        const double h = dx();
        for (int i = 0; i < n_points; ++i) x[i] = x_min + i * h;
        return x;
    }

    /// Same span, grid density multiplied by an integer factor.
    Grid refined(int factor) const {
        return Grid(x_min, x_max, (n_points - 1) * factor + 1);
    }
};

/// Trapezoid inner product on a uniform grid.
inline double trapezoid(const Eigen::VectorXd& f, const Eigen::VectorXd& g, double dx) {
    const Eigen::Index n = f.size();
    double s = 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) s += f[i] * g[i];
    return s * dx;
}

inline double trapezoid(const Eigen::VectorXd& f, double dx) {
    const Eigen::Index n = f.size();
    double s = 0.5 * (f[0] + f[n - 1]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) s += f[i];
    return s * dx;
}

} // namespace squidsim
