#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "impress/dynmetrics.hpp"
#include "impress/potentials.hpp"

namespace impress {

// Six pressure estimators: spanning-set (R) and separated-set (S) partition
// functions, each over one of the three stage metrics.
enum class EstimatorKind { ClassicalR, ClassicalS, BarR, BarS, HatR, HatS };

bool is_spanning_kind(EstimatorKind kind);
StageMetric stage_of(EstimatorKind kind);
std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);
const std::vector<EstimatorKind>& all_estimator_kinds();

// Experiment lattice: horizons, resolutions, smoothing windows, and the
// candidate grid standing in for the whole space.
struct Schedule {
    std::vector<double> T_list;      // strictly increasing
    std::vector<double> eps_list;    // strictly decreasing
    std::vector<double> delta_list;  // strictly decreasing
    CandidateGrid grid;
    int m = 32;                   // shift samples per smoothing window
    double t_step_factor = 0.25;  // stage spacing as a fraction of delta

    void validate() const;
    PseudoMetricParams params_for(double delta) const;
    double birkhoff_dt() const;  // min(min delta / 8, 0.01)
};

// Orbit samples for every grid candidate on the common grid of spacing
// g = delta/m, from which stage metrics are evaluated without recomputing
// trajectories per pair. Values agree with the direct evaluation path.
class OrbitTable {
  public:
    OrbitTable(const ImpulsiveSystem& sys, const CandidateGrid& grid, double delta,
               int m, double t_step, double T_max);

    std::size_t size() const { return samples_.size(); }
    double sample_spacing() const { return g_; }
    const ImpulsiveSystem& system() const { return *sys_; }

    // Exact dynamical distance between two cached orbits (no early exit).
    double dyn_between(std::size_t i, std::size_t j, StageMetric kind, double T) const;
    // True iff some stage witnesses stage-metric >= eps (early exit on hit).
    bool separated_at(std::size_t i, std::size_t j, StageMetric kind, double T,
                      double eps) const;
    // True iff every stage stays < eps; uses the hat-stage bound to shortcut
    // bar evaluations (bar <= hat pointwise).
    bool covers(std::size_t i, std::size_t j, StageMetric kind, double T,
                double eps) const;
    // Stage metric at one cached sample index (i0 counts sample steps).
    double stage_value(std::size_t i, std::size_t j, StageMetric kind,
                       std::size_t i0) const;
    // True iff the first, middle or final stage already witnesses
    // separation; false means the pair plausibly covers (necessary, not
    // sufficient). Used to prefilter covering candidates cheaply.
    bool probe_separated(std::size_t i, std::size_t j, StageMetric kind, double T,
                         double eps) const;

  private:
    // Calls the visitor at every stage sample index (multiples of the stage
    // step below T, then T itself); stops early when the visitor returns
    // true and reports whether that happened.
    template <typename Visitor>
    bool visit_stages(double T, Visitor&& visit) const {
        const auto idx_T = static_cast<std::size_t>(std::llround(T / g_));
        for (std::size_t i0 = 0; static_cast<double>(i0) * g_ < T - 1e-12;
             i0 += stage_step_) {
            if (visit(i0)) return true;
        }
        return visit(idx_T);
    }

    double hat_stage(std::size_t i, std::size_t j, std::size_t i0) const;

    // Same value as Space::distance for the cached samples, which are
    // always canonical, so the circle and interval cases skip range
    // reduction on the hot path.
    double point_dist(const StatePoint& a, const StatePoint& b) const {
        if (fast_circle_) {
            const double d = a.x() > b.x() ? a.x() - b.x() : b.x() - a.x();
            return d <= 0.5 ? d : 1.0 - d;
        }
        if (fast_interval_) {
            return a.x() > b.x() ? a.x() - b.x() : b.x() - a.x();
        }
        return sys_->space().distance(a, b);
    }

    const ImpulsiveSystem* sys_;
    double g_ = 0.0;
    int m_ = 0;
    std::size_t stage_step_ = 1;
    bool fast_circle_ = false;
    bool fast_interval_ = false;
    std::vector<std::vector<StatePoint>> samples_;
};

// Orbit integral of the potential: composite trapezoid applied per flow
// segment so integration never straddles an impulse; exact for constants.
double birkhoff_integral(const ImpulsiveSystem& sys, const Potential& f,
                         const StatePoint& x, double T, double dt);

// Stable log of a sum of exponentials.
double log_sum_exp(const std::vector<double>& exponents);

// Sum over the set of exp(orbit integral), in log space.
double partition_function(const ImpulsiveSystem& sys, const Potential& f,
                          const std::vector<StatePoint>& set, double T, double dt);

// Greedy maximal separated subset of the grid, in deterministic grid order.
std::vector<std::size_t> build_separated(const OrbitTable& table, StageMetric kind,
                                         double T, double eps);
// Greedy maximum-coverage spanning subset of the grid.
std::vector<std::size_t> build_spanning(const OrbitTable& table, StageMetric kind,
                                        double T, double eps);
// Every grid point within eps of some set member under the dynamical metric.
bool verify_spanning(const OrbitTable& table, StageMetric kind, double T, double eps,
                     const std::vector<std::size_t>& set);

struct PressureRow {
    EstimatorKind kind;
    double T = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double logZ = 0.0;
    std::size_t set_size = 0;
    double seconds = 0.0;
};

struct SlopeFit {
    EstimatorKind kind;
    double eps = 0.0;
    double delta = 0.0;
    double slope = 0.0;
    double residual = 0.0;
    int points_used = 0;
    bool saturated_tail = false;  // grid-saturated rows were excluded
};

struct PressureTable {
    EstimatorKind kind;
    std::vector<PressureRow> rows;
    std::vector<SlopeFit> fits;
    std::vector<std::string> warnings;
    double headline = 0.0;  // slope at the smallest (eps, delta)
    double headline_eps = 0.0;
    double headline_delta = 0.0;

    const SlopeFit* fit_for(double eps, double delta) const;
};

struct EstimateOptions {
    bool record_timings = false;  // keep the seconds column at zero by default
};

PressureTable estimate_pressure(const ImpulsiveSystem& sys, const Potential& f,
                                EstimatorKind kind, const Schedule& schedule,
                                const EstimateOptions& options = {});

// Closed-form value of sup over invariant measures of (entropy + integral of
// f) for the documented example systems; throws std::invalid_argument for
// systems without a documented oracle.
double variational_oracle(const std::string& system_id, const Potential& f);

// Diagnostic transform: flow a point forward until it leaves the trigger set
// and its outgoing tube, landing in the admissible region.
StatePoint move_into_admissible(const ImpulsiveSystem& sys, const StatePoint& x);

}  // namespace impress
