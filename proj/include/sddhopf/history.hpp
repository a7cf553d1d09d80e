#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sddhopf/error.hpp"
#include "sddhopf/model.hpp"

namespace sddhopf {

/// C^1 initial function on [-alpha0, 0] with its derivative.
struct InitialData {
    std::function<State2(double)> value;
    std::function<State2(double)> derivative;
    double alpha0 = 1.0;
};

/// Constant initial function; its derivative vanishes.
inline InitialData constant_initial_data(State2 value, double alpha0) {
    return {[value](double) { return value; }, [](double) { return State2{0.0, 0.0}; }, alpha0};
}

/// Raised when a delayed argument lies past the computed part of the solution.
/// The integrator answers it by shrinking the step.
struct FrontierExceeded {
    double requested = 0.0;
    double frontier = 0.0;
};

/// Quartic dense output of one Runge-Kutta step on [t0, t0 + h].
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State2, 5> rcont{};

    double t1() const { return t0 + h; }

    State2 operator()(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        State2 out;
        for (int i = 0; i < 2; ++i) {
            out[i] = rcont[0][i] +
                     s * (rcont[1][i] + s1 * (rcont[2][i] + s * (rcont[3][i] + s1 * rcont[4][i])));
        }
        return out;
    }
};

/// Solution history: the initial function followed by contiguous dense segments.
class DenseHistory {
public:
    explicit DenseHistory(InitialData init, double t_initial = 0.0)
        : init_(std::move(init)), t_initial_(t_initial), frontier_(t_initial) {
        require(static_cast<bool>(init_.value) && static_cast<bool>(init_.derivative),
                ErrorKind::InvalidArgument, "initial data callbacks are not set");
        require(init_.alpha0 > 0.0, ErrorKind::InvalidArgument, "initial interval must have positive length");
        // Sampled slope bound of the initial function, for the delay uniqueness check.
        constexpr int kSamples = 256;
        for (int i = 0; i <= kSamples; ++i) {
            const double s = t_initial_ - init_.alpha0 * i / kSamples;
            max_abs_dx_ = std::max(max_abs_dx_, std::abs(init_.derivative(s)[0]));
        }
    }

    double start() const { return t_initial_ - init_.alpha0; }
    double initial_time() const { return t_initial_; }
    double frontier() const { return frontier_; }
    const InitialData& initial() const { return init_; }
    const std::vector<DenseSegment>& segments() const { return segments_; }

    /// sup |x'| seen so far (initial data sampled, then accepted steps).
    double max_abs_dx() const { return max_abs_dx_; }
    void note_slope(double dx) { max_abs_dx_ = std::max(max_abs_dx_, std::abs(dx)); }

    State2 operator()(double t) const {
        if (t <= t_initial_) {
            if (t < start() - 1e-12 * std::max(1.0, std::abs(start()))) {
                throw Error(ErrorKind::HistoryTooShort,
                            "history queried at " + std::to_string(t) + " before its start " +
                                std::to_string(start()));
            }
            return init_.value(std::max(t, start()));
        }
        if (t > frontier_ + kSlack * std::max(1.0, std::abs(frontier_))) {
            throw FrontierExceeded{t, frontier_};
        }
        auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double v, const DenseSegment& s) { return v < s.t0; });
        if (it == segments_.begin()) return init_.value(t_initial_);
        return (*(it - 1))(std::min(t, frontier_));
    }

    void append(const DenseSegment& seg) {
        segments_.push_back(seg);
        frontier_ = seg.t1();
    }

private:
    static constexpr double kSlack = 1e-13;
    InitialData init_;
    double t_initial_;
    double frontier_;
    double max_abs_dx_ = 0.0;
    std::vector<DenseSegment> segments_;
};

}  // namespace sddhopf
