#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace grs {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A computation left (or would leave) the open chart domain.
struct BoundaryError : Error {
    explicit BoundaryError(const std::string& what,
                           double exit_parameter = std::numeric_limits<double>::quiet_NaN())
        : Error(what), exit_parameter(exit_parameter) {}
    /// Curve parameter at which the domain was exited, NaN if not applicable.
    double exit_parameter;
};

struct InvalidMetricError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct NoGeodesicError : Error {
    using Error::Error;
};

struct EmptySetError : Error {
    using Error::Error;
};

struct InvalidRotationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

/// Open (possibly unbounded) per-coordinate interval.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return std::isfinite(x) && x > lo && x < hi; }
};

inline Interval unbounded() { return Interval{}; }

/// A single open coordinate patch. All geometry in this library lives in one
/// chart; leaving it is an error, not a transition to a neighbouring patch.
class Chart {
public:
    Chart(std::string name, std::vector<Interval> bounds)
        : name_(std::move(name)), bounds_(std::move(bounds)) {}

    const std::string& name() const { return name_; }
    int dim() const { return static_cast<int>(bounds_.size()); }
    const std::vector<Interval>& bounds() const { return bounds_; }

    bool contains(const Eigen::VectorXd& coords) const {
        if (coords.size() != dim()) return false;
        for (int i = 0; i < dim(); ++i) {
            if (!bounds_[static_cast<std::size_t>(i)].contains(coords[i])) return false;
        }
        return true;
    }

private:
    std::string name_;
    std::vector<Interval> bounds_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::string name, std::vector<Interval> bounds) {
    return std::make_shared<const Chart>(std::move(name), std::move(bounds));
}

/// A state in chart coordinates. Validated against the chart's open domain on
/// construction, so a ChartPoint is always a legal point of its manifold.
class ChartPoint {
public:
    ChartPoint(ChartPtr chart, Eigen::VectorXd coords)
        : chart_(std::move(chart)), coords_(std::move(coords)) {
        if (!chart_) throw Error("ChartPoint: null chart");
        if (!chart_->contains(coords_)) {
            throw BoundaryError("ChartPoint: coordinates outside open chart domain of '" +
                                chart_->name() + "'");
        }
    }

    const ChartPtr& chart() const { return chart_; }
    const Eigen::VectorXd& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[i]; }

    bool same_chart(const ChartPoint& other) const { return chart_ == other.chart_; }

private:
    ChartPtr chart_;
    Eigen::VectorXd coords_;
};

/// A velocity with its base point; components are w.r.t. the chart's
/// coordinate basis.
class TangentVector {
public:
    TangentVector(ChartPoint base, Eigen::VectorXd components)
        : base_(std::move(base)), components_(std::move(components)) {
        if (components_.size() != base_.dim()) {
            throw ShapeError("TangentVector: component count does not match chart dimension");
        }
        if (!components_.allFinite()) {
            throw Error("TangentVector: non-finite components");
        }
    }

    const ChartPoint& base() const { return base_; }
    const Eigen::VectorXd& components() const { return components_; }
    int dim() const { return static_cast<int>(components_.size()); }

private:
    ChartPoint base_;
    Eigen::VectorXd components_;
};

/// Christoffel symbols at a point: gamma[k](i, j) is the k-th output
/// component for input directions i, j. Symmetric in (i, j).
using ChristoffelTensor = std::vector<Eigen::MatrixXd>;

inline ChristoffelTensor zero_christoffel(int n) {
    return ChristoffelTensor(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
}

/// Contraction sum_{i,j} dir^i gamma[k](i,j) w^j used by covariant
/// derivatives and transport equations.
inline Eigen::VectorXd contract_christoffel(const ChristoffelTensor& gamma,
                                            const Eigen::VectorXd& dir,
                                            const Eigen::VectorXd& w) {
    const int n = static_cast<int>(gamma.size());
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) out[k] = dir.dot(gamma[static_cast<std::size_t>(k)] * w);
    return out;
}

}  // namespace grs
