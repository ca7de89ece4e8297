#include "frwsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace frwsim {

std::string_view to_string(Mode mode) noexcept {
    return mode == Mode::paper ? "paper" : "kg";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
    if (text == "paper") return Mode::paper;
    if (text == "kg") return Mode::kg;
    return std::nullopt;
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::FieldFrozen: return "FieldFrozen";
        case EventKind::ChiZeroCrossing: return "ChiZeroCrossing";
        case EventKind::GuardTripped: return "GuardTripped";
    }
    return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
    for (auto k : {EventKind::FieldFrozen, EventKind::ChiZeroCrossing, EventKind::GuardTripped}) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::guard_tripped: return "guard_tripped";
        case Termination::step_underflow: return "step_underflow";
    }
    return "unknown";
}

std::optional<Termination> parse_termination(std::string_view text) noexcept {
    for (auto t : {Termination::completed, Termination::guard_tripped,
                   Termination::step_underflow}) {
        if (text == to_string(t)) return t;
    }
    return std::nullopt;
}

void validate(const IntegratorConfig& c) {
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(c.rel_tol) || !finite(c.abs_tol) || c.rel_tol <= 0.0 || c.abs_tol <= 0.0) {
        throw DomainError("rel_tol and abs_tol must be finite and > 0");
    }
    if (!finite(c.h_min) || !finite(c.h_init) || !finite(c.h_max) || !(c.h_min > 0.0) ||
        !(c.h_min <= c.h_init) || !(c.h_init <= c.h_max)) {
        throw DomainError("step bounds must satisfy 0 < h_min <= h_init <= h_max");
    }
    if (!finite(c.t_end) || c.t_end <= 0.0) throw DomainError("t_end must be > 0");
    if (!finite(c.sample_dt) || c.sample_dt <= 0.0) throw DomainError("sample_dt must be > 0");
    if (!finite(c.guards.max_abs_u) || !finite(c.guards.max_abs_phi) ||
        !finite(c.guards.min_v) || c.guards.max_abs_u <= 0.0 || c.guards.max_abs_phi <= 0.0 ||
        c.guards.min_v < 0.0) {
        throw DomainError("guards must be finite with positive bounds");
    }
}

std::optional<double> Trajectory::freeze_time() const {
    for (const auto& e : events) {
        if (e.kind == EventKind::FieldFrozen) return e.t;
    }
    return std::nullopt;
}

bool Trajectory::has_event(EventKind kind) const {
    return std::any_of(events.begin(), events.end(),
                       [kind](const Event& e) { return e.kind == kind; });
}

StateVector to_vector(const CosmoState& s) noexcept { return {s.u, s.v, s.phi, s.chi, s.rho}; }

CosmoState from_vector(double t, const StateVector& y) noexcept {
    return CosmoState{t, y[0], y[1], y[2], y[3], y[4]};
}

CosmoState DenseOutput::at(double t) const noexcept {
    const double theta = h_ == 0.0 ? 0.0 : (t - t0_) / h_;
    const double theta1 = 1.0 - theta;
    StateVector y;
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = coeffs_[0][i] +
               theta * (coeffs_[1][i] +
                        theta1 * (coeffs_[2][i] +
                                  theta * (coeffs_[3][i] + theta1 * coeffs_[4][i])));
    }
    return from_vector(t, y);
}

namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b5 - b4
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafety = 0.9;
constexpr double kMinGrowth = 0.2;
constexpr double kMaxGrowth = 5.0;
constexpr int kMaxBisections = 60;

StateVector evaluate(const StateVector& y, const ModelParams& p, bool frozen) {
    CosmoState s = from_vector(0.0, y);
    if (frozen) s.chi = 0.0;
    const StateDerivative d = rhs(s, p);
    if (frozen) return {d.du, d.dv, 0.0, 0.0, d.drho};
    return {d.du, d.dv, d.dphi, d.dchi, d.drho};
}

template <typename... Terms>
StateVector combine(const StateVector& y, double h, const Terms&... terms) {
    StateVector out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        ((acc += terms.first * (*terms.second)[i]), ...);
        out[i] += h * acc;
    }
    return out;
}

using Term = std::pair<double, const StateVector*>;

bool finite(const StateVector& y) {
    return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

StepResult trial_step(const CosmoState& state, const ModelParams& p, double h,
                      const IntegratorConfig& cfg, bool frozen) {
    StateVector y0 = to_vector(state);
    if (frozen) y0[3] = 0.0;
    const StateVector k1 = evaluate(y0, p, frozen);
    const StateVector k2 = evaluate(combine(y0, h, Term{a21, &k1}), p, frozen);
    const StateVector k3 = evaluate(combine(y0, h, Term{a31, &k1}, Term{a32, &k2}), p, frozen);
    const StateVector k4 = evaluate(
        combine(y0, h, Term{a41, &k1}, Term{a42, &k2}, Term{a43, &k3}), p, frozen);
    const StateVector k5 = evaluate(combine(y0, h, Term{a51, &k1}, Term{a52, &k2},
                                            Term{a53, &k3}, Term{a54, &k4}),
                                    p, frozen);
    const StateVector k6 = evaluate(combine(y0, h, Term{a61, &k1}, Term{a62, &k2},
                                            Term{a63, &k3}, Term{a64, &k4}, Term{a65, &k5}),
                                    p, frozen);
    const StateVector y1 = combine(y0, h, Term{a71, &k1}, Term{a73, &k3}, Term{a74, &k4},
                                   Term{a75, &k5}, Term{a76, &k6});
    const StateVector k7 = evaluate(y1, p, frozen);

    StepResult r;
    r.state = from_vector(state.t + h, y1);
    double sum = 0.0;
    for (std::size_t i = 0; i < y1.size(); ++i) {
        r.local_error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double ratio = r.local_error[i] / scale;
        sum += ratio * ratio;
    }
    r.error_norm = std::sqrt(sum / static_cast<double>(y1.size()));
    if (!std::isfinite(r.error_norm)) r.error_norm = std::numeric_limits<double>::infinity();

    double factor = kMaxGrowth;
    if (r.error_norm > 0.0) {
        factor = std::clamp(kSafety * std::pow(r.error_norm, -0.2), kMinGrowth, kMaxGrowth);
    }
    r.h_next = h * factor;

    std::array<StateVector, 5> coeffs;
    for (std::size_t i = 0; i < y1.size(); ++i) {
        const double diff = y1[i] - y0[i];
        const double bspl = h * k1[i] - diff;
        coeffs[0][i] = y0[i];
        coeffs[1][i] = diff;
        coeffs[2][i] = bspl;
        coeffs[3][i] = diff - h * k7[i] - bspl;
        coeffs[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                            d7 * k7[i]);
    }
    r.dense = DenseOutput(state.t, h, coeffs);
    return r;
}

/// Locates a sign change of chi inside one step by bisection on the dense
/// interpolant. chi(lo) and chi(hi) must have opposite signs (or hi == 0).
double locate_chi_zero(const DenseOutput& dense, double tol) {
    double lo = dense.t0();
    double hi = dense.t1();
    const double chi_lo = dense.at(lo).chi;
    for (int i = 0; i < kMaxBisections && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double chi_mid = dense.at(mid).chi;
        if (chi_mid == 0.0) return mid;
        if ((chi_mid > 0.0) == (chi_lo > 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::string describe(const CosmoState& s) {
    std::ostringstream out;
    out.precision(17);
    out << "u=" << s.u << " v=" << s.v << " phi=" << s.phi << " chi=" << s.chi
        << " rho=" << s.rho;
    return out.str();
}

std::optional<std::string> guard_violation(const CosmoState& s, const Guards& g) {
    if (!finite(to_vector(s))) return "non-finite state: " + describe(s);
    if (std::abs(s.u) > g.max_abs_u) return "|u| exceeds guard: " + describe(s);
    if (std::abs(s.phi) > g.max_abs_phi) return "|phi| exceeds guard: " + describe(s);
    if (s.v < g.min_v) return "v below guard: " + describe(s);
    return std::nullopt;
}

/// Output grid t_k = k * sample_dt, with t_end appended when it is off-grid.
class SampleClock {
public:
    SampleClock(double t_end, double dt) : t_end_(t_end), dt_(dt) {}

    /// Next pending sample time, or nullopt once t_end has been emitted.
    [[nodiscard]] std::optional<double> next() const {
        if (done_) return std::nullopt;
        const double t = static_cast<double>(k_) * dt_;
        if (t >= t_end_ - 1e-9 * dt_) return t_end_;
        return t;
    }
    void advance() {
        const double t = static_cast<double>(k_) * dt_;
        if (t >= t_end_ - 1e-9 * dt_) done_ = true;
        ++k_;
    }

private:
    double t_end_;
    double dt_;
    std::size_t k_ = 1;
    bool done_ = false;
};

void push_sample(Trajectory& traj, const CosmoState& s) {
    traj.samples.push_back(Sample{s, derived(s, traj.params)});
}

/// Emits every pending sample time in (t0, upto] from the dense output.
void emit_samples(Trajectory& traj, SampleClock& clock, const DenseOutput& dense,
                  double upto, const CosmoState& end_state, bool frozen) {
    while (auto t = clock.next()) {
        if (*t > upto) break;
        CosmoState s = *t == end_state.t ? end_state : dense.at(*t);
        if (frozen) s.chi = 0.0;
        push_sample(traj, s);
        clock.advance();
    }
}

}  // namespace

StepResult step(const CosmoState& state, const ModelParams& params, double h,
                const IntegratorConfig& config, bool frozen) {
    if (!(h >= config.h_min)) {
        std::ostringstream msg;
        msg << "step size " << h << " below h_min " << config.h_min;
        throw StepSizeUnderflow(msg.str());
    }
    if (!(h <= config.h_max)) throw DomainError("step size exceeds h_max");
    require_finite(state);
    return trial_step(state, params, h, config, frozen);
}

Trajectory integrate(const InitialData& initial, const ModelParams& params,
                     const IntegratorConfig& config) {
    validate(config);
    validate(initial, params);
    const AdmissibilityReport adm = validate_theorem1(params, initial);
    if (!adm.theorem1_applicable && !config.override_admissibility) {
        throw InadmissibleData(
            "initial data fail the global-existence hypotheses "
            "(Lambda > -4 pi m^2 phi0^2, phi0 > 0, u0 > 0); set override_admissibility to "
            "integrate anyway");
    }

    Trajectory traj;
    traj.params = params;
    traj.initial = initial;
    traj.config = config;

    CosmoState state = build_state(initial);
    bool frozen = false;
    if (config.mode == Mode::paper && state.chi == 0.0 && rhs(state, params).dchi < 0.0) {
        frozen = true;
        traj.events.push_back({0.0, EventKind::FieldFrozen,
                               "field velocity is zero and decelerating at t=0"});
    }
    push_sample(traj, state);
    ++traj.stats.rhs_evals;

    SampleClock clock(config.t_end, config.sample_dt);
    double h = config.h_init;
    const double t_end = config.t_end;

    while (state.t < t_end) {
        const double remaining = t_end - state.t;
        const bool last = h >= remaining;
        const double h_try = last ? remaining : h;
        StepResult r = trial_step(state, params, h_try, config, frozen);
        traj.stats.rhs_evals += 7;

        if (!(r.error_norm <= 1.0)) {
            ++traj.stats.rejected;
            h = std::min(r.h_next, config.h_max);
            if (h < config.h_min) {
                traj.termination = Termination::step_underflow;
                return traj;
            }
            continue;
        }
        if (last) r.state.t = t_end;
        if (frozen) r.state.chi = 0.0;

        if (auto why = guard_violation(r.state, config.guards)) {
            traj.events.push_back({r.state.t, EventKind::GuardTripped, *why});
            traj.termination = Termination::guard_tripped;
            return traj;
        }
        ++traj.stats.accepted;

        const double chi0 = state.chi;
        const double chi1 = r.state.chi;
        const bool downward = chi0 > 0.0 && chi1 <= 0.0;
        const bool upward = chi0 < 0.0 && chi1 >= 0.0;
        const double event_tol = config.rel_tol * std::max(1.0, state.t);

        if (config.mode == Mode::paper && !frozen && downward) {
            const double tc = locate_chi_zero(r.dense, event_tol);
            CosmoState at_freeze = r.dense.at(tc);
            at_freeze.chi = 0.0;
            emit_samples(traj, clock, r.dense, tc, at_freeze, false);
            std::ostringstream detail;
            detail.precision(17);
            detail << "chi reached zero; field frozen at phi=" << at_freeze.phi;
            traj.events.push_back({tc, EventKind::FieldFrozen, detail.str()});
            frozen = true;
            state = at_freeze;
            h = std::clamp(r.h_next, config.h_min, config.h_max);
            continue;
        }
        if (config.mode == Mode::kg && (downward || upward)) {
            const double tc = locate_chi_zero(r.dense, event_tol);
            traj.events.push_back({tc, EventKind::ChiZeroCrossing,
                                   downward ? "downward" : "upward"});
        }

        emit_samples(traj, clock, r.dense, r.state.t, r.state, frozen);
        state = r.state;
        h = std::min(r.h_next, config.h_max);
    }
    return traj;
}

}  // namespace frwsim
