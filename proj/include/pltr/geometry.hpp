#pragma once

#include <cstddef>
#include <span>

#include "pltr/types.hpp"

namespace pltr {

enum class DistanceKind { Euclidean, SquaredEuclidean, Cosine };

// Guard for the 1/dist singularity at feature-prototype coincidence.
inline constexpr double kDistanceEps = 1e-8;
// Temperatures are clamped to this floor after every optimizer step.
inline constexpr double kTemperatureFloor = 1e-4;

// Learnable scale factors inside the Euclidean distance.
//   None     -- plain distance (identical to all-ones temperatures)
//   Channel  -- per-dimension T_i dividing each squared component
//   Class    -- per-class T_y dividing the whole squared sum
//   Dense    -- per-class, per-dimension T_{y,i}
struct TemperatureScheme {
    enum class Kind { None, Channel, Class, Dense };

    Kind kind = Kind::None;
    Matrix values;  // Channel: 1 x d, Class: K x 1, Dense: K x d

    static TemperatureScheme none() { return {}; }
    static TemperatureScheme channel(std::size_t dim) { return {Kind::Channel, Matrix(1, dim, 1.0)}; }
    static TemperatureScheme per_class(std::size_t num_classes) {
        return {Kind::Class, Matrix(num_classes, 1, 1.0)};
    }
    static TemperatureScheme dense(std::size_t num_classes, std::size_t dim) {
        return {Kind::Dense, Matrix(num_classes, dim, 1.0)};
    }

    bool active() const { return kind != Kind::None; }
    void clamp_floor(double t_floor);
    // Throws unless every temperature exceeds the floor and shape matches (K, d).
    void check(std::size_t num_classes, std::size_t dim) const;
};

// Distance from feature x to class-y prototype c.
//   Euclidean        sqrt(sum_i (x-c)_i^2 / T_eff)
//   SquaredEuclidean sum_i (x-c)_i^2          (no temperatures)
//   Cosine           1 - x.c / (|x||c|)       (no temperatures)
double distance(std::span<const double> x, std::span<const double> c, std::size_t class_index,
                DistanceKind kind, const TemperatureScheme& temps);

// Exact partial derivative of distance() with respect to c, written to grad_out.
// Euclidean kinds divide by max(dist, d_eps) near coincidence.
void distance_grad_prototype(std::span<const double> x, std::span<const double> c,
                             std::size_t class_index, DistanceKind kind,
                             const TemperatureScheme& temps, std::span<double> grad_out,
                             double d_eps = kDistanceEps);

// Exact partial derivative of distance() with respect to the temperatures,
// written into grad_out with the same shape as temps.values (zeros elsewhere).
// Requires Euclidean distance and an active scheme.
void distance_grad_temps(std::span<const double> x, std::span<const double> c,
                         std::size_t class_index, const TemperatureScheme& temps,
                         Matrix& grad_out, double d_eps = kDistanceEps);

}  // namespace pltr
