#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <vector>

#include "artikit/errors.hpp"
#include "artikit/rng.hpp"

namespace artikit {

struct ViewpointSet {
    std::vector<Eigen::Vector3d> directions;  // unit vectors
    double radius = 1.0;
    std::optional<double> energy;  // Coulomb energy, spherical mode only
};

// sum over pairs of 1 / |p_i - p_j| (Thomson potential, exponent 1)
inline double coulomb_energy(const std::vector<Eigen::Vector3d>& points) {
    double energy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            energy += 1.0 / (points[i] - points[j]).norm();
    return energy;
}

// n azimuths 2*pi*k/n at a fixed elevation above the equator plane.
inline ViewpointSet sample_equatorial(int n, double elevation, double radius = 1.0) {
    if (n < 1) throw InvalidCountError("need at least 1 viewpoint, got " + std::to_string(n));
    ViewpointSet set;
    set.radius = radius;
    const double ce = std::cos(elevation), se = std::sin(elevation);
    for (int k = 0; k < n; ++k) {
        const double azimuth = 2.0 * M_PI * k / n;
        set.directions.emplace_back(ce * std::cos(azimuth), ce * std::sin(azimuth), se);
    }
    return set;
}

struct MinEnergyOptions {
    int max_iters = 10000;
    double tol = 1e-10;
    int restarts = 10;
    double radius = 1.0;
};

namespace detail {

// Projected gradient descent on the Coulomb energy with step halving on
// energy increase; terminates when the largest accepted displacement falls
// below tol. Returns the final energy.
inline double descend_energy(std::vector<Eigen::Vector3d>& points, int max_iters, double tol) {
    const std::size_t n = points.size();
    double energy = coulomb_energy(points);
    double step = 0.1;
    std::vector<Eigen::Vector3d> gradient(n), proposal(n);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (auto& g : gradient) g.setZero();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Eigen::Vector3d delta = points[i] - points[j];
                const double r = delta.norm();
                const Eigen::Vector3d pull = delta / (r * r * r);  // -d/dp_i of 1/r
                gradient[i] -= pull;
                gradient[j] += pull;
            }
        }
        // descend with step halving until the energy does not increase
        bool accepted = false;
        double displacement = 0.0;
        while (step > 1e-16) {
            displacement = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                proposal[i] = (points[i] - step * gradient[i]).normalized();
                displacement = std::max(displacement, (proposal[i] - points[i]).norm());
            }
            const double proposed = coulomb_energy(proposal);
            if (proposed <= energy) {
                points = proposal;
                energy = proposed;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || displacement < tol) break;
        step *= 1.2;  // cautiously regrow after a successful step
    }
    return energy;
}

}  // namespace detail

// Near-uniform sphere coverage by Coulomb-energy minimization, best of
// `restarts` seeded starts. Deterministic for a fixed seed.
inline ViewpointSet sample_min_energy(int n, std::uint64_t seed, const MinEnergyOptions& options = {}) {
    if (n < 2) throw InvalidCountError("need at least 2 viewpoints, got " + std::to_string(n));
    ViewpointSet best;
    best.radius = options.radius;
    double best_energy = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < std::max(options.restarts, 1); ++restart) {
        Rng rng(mix_seed(seed, "restart-" + std::to_string(restart)));
        std::vector<Eigen::Vector3d> points(static_cast<std::size_t>(n));
        for (auto& p : points) p = rng.unit_vector();
        const double energy = detail::descend_energy(points, options.max_iters, options.tol);
        if (energy < best_energy) {
            best_energy = energy;
            best.directions = std::move(points);
        }
    }
    best.energy = best_energy;
    return best;
}

}  // namespace artikit
