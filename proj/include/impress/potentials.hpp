#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "impress/impulsive.hpp"

namespace impress {

// Bounded observables f: X -> R used as weights in the partition functions.
//
// Three families are built in:
//   constant        f = c on any space
//   fourier_circle  a0 + sum_k a_k sin(2 pi k x) + b_k cos(2 pi k x), circle only
//   tabulated       piecewise-linear through sorted nodes; periodic on the
//                   circle, clamped to the node range on an interval
class Potential {
  public:
    static Potential constant(double c);
    static Potential fourier_circle(std::vector<double> sin_coeffs,
                                    std::vector<double> cos_coeffs = {},
                                    double constant_term = 0.0);
    static Potential tabulated(std::vector<double> nodes, std::vector<double> values);

    double evaluate(const Space& space, const StatePoint& x) const;

    // Exact bound on sup |f|: constants and Fourier sums bound by coefficient
    // mass; piecewise-linear attains its extrema at nodes.
    double sup_norm_bound() const;

    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const;
    std::string describe() const;

  private:
    enum class Kind { Constant, FourierCircle, Tabulated };
    Kind kind_ = Kind::Constant;
    double c_ = 0.0;
    std::vector<double> sin_coeffs_;
    std::vector<double> cos_coeffs_;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

// Exact check of the jump-compatibility condition f(x) = f(I(x)) on the
// finite trigger set.
struct Condition1Report {
    bool pass = true;
    double worst_gap = 0.0;
    StatePoint worst_point{0.0};
};

Condition1Report check_condition1(const Potential& f, const ImpulsiveSystem& sys);

// Sampled probe of the bounded-distortion condition: for orbit pairs that
// stay eps-close whenever both are outside the eps-ball around the trigger
// set, record the running gap of their orbit integrals. The result is an
// empirical bound, never a proof.
struct Condition2Report {
    double eps = 0.0;
    int trials = 0;
    double horizon = 0.0;
    double max_gap = 0.0;                  // empirical K-hat
    std::vector<double> checkpoint_times;  // quarter points of the horizon
    std::vector<double> gap_by_checkpoint;
    bool growth_flag = false;  // late-window gaps dominate early-window ones
};

Condition2Report probe_condition2(const Potential& f, const ImpulsiveSystem& sys,
                                  double eps, int trials, double horizon,
                                  std::uint64_t seed);

}  // namespace impress
