#include "pltr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pltr {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_pair(std::span<const double> x, std::span<const double> c, DistanceKind kind,
                const TemperatureScheme& temps) {
    require(x.size() == c.size(), "dimension mismatch between feature and prototype");
    require(!temps.active() || kind == DistanceKind::Euclidean,
            "temperatures combine only with euclidean distance");
}

// Sum of squared differences with the scheme's divisors applied. The None
// path and the all-ones Channel path accumulate identically (x / 1.0 == x).
double scaled_squared_sum(std::span<const double> x, std::span<const double> c,
                          std::size_t class_index, const TemperatureScheme& temps) {
    double s = 0.0;
    switch (temps.kind) {
        case TemperatureScheme::Kind::None:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                s += diff * diff;
            }
            break;
        case TemperatureScheme::Kind::Channel:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                s += diff * diff / temps.values(0, i);
            }
            break;
        case TemperatureScheme::Kind::Class:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                s += diff * diff;
            }
            s /= temps.values(class_index, 0);
            break;
        case TemperatureScheme::Kind::Dense:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                s += diff * diff / temps.values(class_index, i);
            }
            break;
    }
    return s;
}

}  // namespace

void TemperatureScheme::clamp_floor(double t_floor) {
    for (double& t : values.flat()) t = std::max(t, t_floor);
}

void TemperatureScheme::check(std::size_t num_classes, std::size_t dim) const {
    switch (kind) {
        case Kind::None:
            require(values.empty(), "inactive scheme must carry no values");
            return;
        case Kind::Channel:
            require(values.rows() == 1 && values.cols() == dim, "channel temperatures must be 1 x d");
            break;
        case Kind::Class:
            require(values.rows() == num_classes && values.cols() == 1,
                    "class temperatures must be K x 1");
            break;
        case Kind::Dense:
            require(values.rows() == num_classes && values.cols() == dim,
                    "dense temperatures must be K x d");
            break;
    }
    for (double t : values.flat())
        if (!(t > 0.0)) throw std::invalid_argument("temperatures must be positive");
}

double distance(std::span<const double> x, std::span<const double> c, std::size_t class_index,
                DistanceKind kind, const TemperatureScheme& temps) {
    check_pair(x, c, kind, temps);
    switch (kind) {
        case DistanceKind::Euclidean:
            return std::sqrt(scaled_squared_sum(x, c, class_index, temps));
        case DistanceKind::SquaredEuclidean:
            return scaled_squared_sum(x, c, class_index, temps);
        case DistanceKind::Cosine: {
            const double nx = l2_norm(x);
            const double nc = l2_norm(c);
            require(nx > 0.0 && nc > 0.0, "cosine distance requires nonzero vectors");
            return 1.0 - dot(x, c) / (nx * nc);
        }
    }
    throw std::logic_error("unreachable distance kind");
}

void distance_grad_prototype(std::span<const double> x, std::span<const double> c,
                             std::size_t class_index, DistanceKind kind,
                             const TemperatureScheme& temps, std::span<double> grad_out,
                             double d_eps) {
    check_pair(x, c, kind, temps);
    require(grad_out.size() == c.size(), "gradient output has wrong dimension");
    switch (kind) {
        case DistanceKind::Euclidean: {
            const double dist = std::sqrt(scaled_squared_sum(x, c, class_index, temps));
            const double denom = std::max(dist, d_eps);
            for (std::size_t i = 0; i < c.size(); ++i) {
                double t_eff = 1.0;
                switch (temps.kind) {
                    case TemperatureScheme::Kind::None: break;
                    case TemperatureScheme::Kind::Channel: t_eff = temps.values(0, i); break;
                    case TemperatureScheme::Kind::Class: t_eff = temps.values(class_index, 0); break;
                    case TemperatureScheme::Kind::Dense: t_eff = temps.values(class_index, i); break;
                }
                grad_out[i] = -(x[i] - c[i]) / (t_eff * denom);
            }
            return;
        }
        case DistanceKind::SquaredEuclidean:
            for (std::size_t i = 0; i < c.size(); ++i) grad_out[i] = -2.0 * (x[i] - c[i]);
            return;
        case DistanceKind::Cosine: {
            const double nx = l2_norm(x);
            const double nc = l2_norm(c);
            require(nx > 0.0 && nc > 0.0, "cosine distance requires nonzero vectors");
            const double xc = dot(x, c);
            const double inv = 1.0 / (nx * nc);
            const double scale = xc / (nx * nc * nc * nc);
            for (std::size_t i = 0; i < c.size(); ++i)
                grad_out[i] = -x[i] * inv + scale * c[i];
            return;
        }
    }
    throw std::logic_error("unreachable distance kind");
}

void distance_grad_temps(std::span<const double> x, std::span<const double> c,
                         std::size_t class_index, const TemperatureScheme& temps,
                         Matrix& grad_out, double d_eps) {
    require(temps.active(), "temperature gradient requires an active scheme");
    require(x.size() == c.size(), "dimension mismatch between feature and prototype");
    if (grad_out.rows() != temps.values.rows() || grad_out.cols() != temps.values.cols())
        grad_out = Matrix(temps.values.rows(), temps.values.cols());
    else
        grad_out.fill(0.0);

    const double dist = std::sqrt(scaled_squared_sum(x, c, class_index, temps));
    const double denom = std::max(dist, d_eps);
    switch (temps.kind) {
        case TemperatureScheme::Kind::Channel:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                const double t = temps.values(0, i);
                grad_out(0, i) = -diff * diff / (2.0 * t * t * denom);
            }
            return;
        case TemperatureScheme::Kind::Class: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                s += diff * diff;
            }
            const double t = temps.values(class_index, 0);
            grad_out(class_index, 0) = -s / (2.0 * t * t * denom);
            return;
        }
        case TemperatureScheme::Kind::Dense:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - c[i];
                const double t = temps.values(class_index, i);
                grad_out(class_index, i) = -diff * diff / (2.0 * t * t * denom);
            }
            return;
        case TemperatureScheme::Kind::None: break;
    }
    throw std::logic_error("unreachable temperature kind");
}

}  // namespace pltr
