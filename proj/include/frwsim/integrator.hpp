#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frwsim/error.hpp"
#include "frwsim/initial_data.hpp"
#include "frwsim/model.hpp"

namespace frwsim {

/// paper: the field velocity is clamped to zero at its first downward zero
/// crossing (the non-decreasing field continuation).
/// kg: plain Klein-Gordon continuation; chi oscillates through zero.
enum class Mode { paper, kg };

[[nodiscard]] std::string_view to_string(Mode mode) noexcept;
[[nodiscard]] std::optional<Mode> parse_mode(std::string_view text) noexcept;

struct Guards {
    double max_abs_u = 1e3;
    double max_abs_phi = 1e6;
    double min_v = 1e-300;

    friend bool operator==(const Guards&, const Guards&) = default;
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 0.01;
    double t_end = 10.0;
    double sample_dt = 0.01;
    Mode mode = Mode::paper;
    Guards guards;
    /// Integrate data that fail the global-existence hypotheses.
    bool override_admissibility = false;

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Throws DomainError unless tolerances are positive, h_min <= h_init <= h_max,
/// t_end > 0, sample_dt > 0 and every field is finite.
void validate(const IntegratorConfig& config);

/// The data fail the global-existence hypotheses and no override was given.
class InadmissibleData : public DomainError {
public:
    using DomainError::DomainError;
};

enum class EventKind { FieldFrozen, ChiZeroCrossing, GuardTripped };

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;
[[nodiscard]] std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::FieldFrozen;
    std::string detail;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Sample {
    CosmoState state;
    DerivedQuantities derived;
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;

    friend bool operator==(const IntegratorStats&, const IntegratorStats&) = default;
};

enum class Termination { completed, guard_tripped, step_underflow };

[[nodiscard]] std::string_view to_string(Termination t) noexcept;
[[nodiscard]] std::optional<Termination> parse_termination(std::string_view text) noexcept;

struct Trajectory {
    ModelParams params;
    InitialData initial;
    IntegratorConfig config;
    std::vector<Sample> samples;  // strictly increasing t, samples[0] is the initial state
    std::vector<Event> events;
    IntegratorStats stats;
    Termination termination = Termination::completed;

    /// Time of the FieldFrozen event, if one occurred.
    [[nodiscard]] std::optional<double> freeze_time() const;
    [[nodiscard]] bool has_event(EventKind kind) const;
};

/// Component order of the evolved vector: u, v, phi, chi, rho.
using StateVector = std::array<double, 5>;

[[nodiscard]] StateVector to_vector(const CosmoState& s) noexcept;
[[nodiscard]] CosmoState from_vector(double t, const StateVector& y) noexcept;

/// Fourth-order continuous extension of one Dormand-Prince step.
class DenseOutput {
public:
    DenseOutput() = default;
    DenseOutput(double t0, double h, const std::array<StateVector, 5>& coeffs)
        : t0_(t0), h_(h), coeffs_(coeffs) {}

    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double t1() const noexcept { return t0_ + h_; }
    [[nodiscard]] CosmoState at(double t) const noexcept;

private:
    double t0_ = 0.0;
    double h_ = 0.0;
    std::array<StateVector, 5> coeffs_{};
};

struct StepResult {
    CosmoState state;
    /// Raw difference between the embedded 5th and 4th order solutions.
    StateVector local_error{};
    /// RMS of local_error scaled by abs_tol + rel_tol * max(|y_old|, |y_new|).
    double error_norm = 0.0;
    double h_next = 0.0;
    DenseOutput dense;
};

/// One trial Dormand-Prince 5(4) step. With frozen set, chi is held at zero
/// and phi does not move. Rejection (error_norm > 1) is not an error; the
/// caller retries with h_next. Throws StepSizeUnderflow for h < h_min and
/// DomainError for h > h_max.
[[nodiscard]] StepResult step(const CosmoState& state, const ModelParams& params, double h,
                              const IntegratorConfig& config, bool frozen = false);

/// Integrates from the initial data to config.t_end, sampling every
/// config.sample_dt. Guard trips and step-size underflow end the run early
/// and are reported through Trajectory::termination; they never throw.
/// Throws DomainError on invalid input and InadmissibleData when the
/// global-existence hypotheses fail without override.
[[nodiscard]] Trajectory integrate(const InitialData& initial, const ModelParams& params,
                                   const IntegratorConfig& config);

}  // namespace frwsim
