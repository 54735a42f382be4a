#pragma once

// A function sampled on an increasing grid, stored as (sign, log-magnitude)
// pairs so that e^{Q}-sized values survive.

#include "qsdlab/logval.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>
#include <algorithm>

namespace qsdlab {

struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LogGridFunction {
public:
    LogGridFunction() = default;
    LogGridFunction(std::vector<double> xs, std::vector<LogValue> vs)
        : xs_(std::move(xs)), vs_(std::move(vs)) {
        if (xs_.size() != vs_.size()) throw GridError("grid/value length mismatch");
        if (xs_.empty()) throw GridError("empty grid");
        if (xs_.front() != 0.0) throw GridError("grid must start at 0");
        for (std::size_t i = 1; i < xs_.size(); ++i)
            if (!(xs_[i] > xs_[i - 1])) throw GridError("grid must be strictly increasing");
    }

    const std::vector<double>& grid() const { return xs_; }
    const std::vector<LogValue>& values() const { return vs_; }
    std::size_t size() const { return xs_.size(); }
    double front_x() const { return xs_.front(); }
    double back_x() const { return xs_.back(); }
    LogValue back() const { return vs_.back(); }

    // Index of the interval [xs_[i], xs_[i+1]] containing x.
    std::size_t interval(double x) const {
        if (x < xs_.front() || x > xs_.back())
            throw GridError("query outside grid range");
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        if (i > 0) --i;
        if (i + 1 >= xs_.size()) i = xs_.size() - 2;
        return i;
    }

    // Linear interpolation in the value domain, carried out with signed
    // log arithmetic. Extrapolation beyond the grid is an error.
    LogValue at(double x) const {
        if (xs_.size() == 1) {
            if (x != xs_.front()) throw GridError("query outside grid range");
            return vs_.front();
        }
        std::size_t i = interval(x);
        double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
        return vs_[i].scaled(1.0 - w) + vs_[i + 1].scaled(w);
    }

    double value_at(double x) const { return at(x).value(); }

private:
    std::vector<double> xs_;
    std::vector<LogValue> vs_;
};

} // namespace qsdlab
