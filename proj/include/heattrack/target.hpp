#pragma once

#include <vector>

#include "heattrack/grid.hpp"

namespace heattrack {

/// A tracking target w on [0, T], extended by zero to t < 0.
class Target {
public:
    virtual ~Target() = default;

    virtual double t_end() const = 0;

    /// w(t); returns 0 for t < 0 and clamps t > T to T.
    virtual double value(double t) const = 0;

    /// True when derivatives() is backed by a closed form.
    virtual bool has_derivatives() const { return false; }

    /// w^{(0..order)}(t). Only meaningful when has_derivatives().
    virtual std::vector<double> derivatives(double t, int order) const;

    /// W^{1,inf}(0,T) norm: max of |w| and |w'| over a 4000-interval sweep,
    /// using the closed-form derivative when one exists.
    virtual double w1inf_norm() const;

    Signal sample(const TimeGrid& grid) const;
};

}  // namespace heattrack
