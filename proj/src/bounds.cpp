#include "flatband/bounds.hpp"
#include "flatband/errors.hpp"

#include <cmath>
#include <sstream>

namespace flatband {

namespace {

const double kRoot2 = std::sqrt(2.0);

void require_c(int c) {
    if (c < 1) throw ValidityError("coordination number c must be at least 1");
}

void require_t(double t) {
    if (!(t > 0)) throw ValidityError("hopping t must be positive");
}

void require_validity(double tp, double t, int c) {
    if (tp < 0) throw ValidityError("coupling tp must be nonnegative");
    if (!(tp < tprime_sup(t, c))) {
        std::ostringstream msg;
        msg << "tp = " << tp << " is outside the validity range [0, " << tprime_sup(t, c)
            << ") for c = " << c;
        throw ValidityError(msg.str());
    }
}

} // namespace

Constants constants() {
    Constants k;
    k.e5 = 2.0 * (2.0 - kRoot2);
    k.a = (1425.0 + 974.0 * kRoot2) / 896.0;
    k.b = std::sqrt(0.75 * (kRoot2 - 1.0));
    return k;
}

double tprime_sup(double t, int c) {
    require_c(c);
    require_t(t);
    const auto [e5, a, b] = constants();
    return (std::sqrt(b * b / (a * a * c) + e5 / a) - b / (a * std::sqrt(double(c)))) * t / c;
}

double eta(Branch branch, double tp, double t, int c) {
    require_c(c);
    require_t(t);
    if (tp < 0) throw ValidityError("coupling tp must be nonnegative");
    const auto [e5, a, b] = constants();
    const double tt = tp / t;
    const double head = e5 - a * tt * tt * c * c;
    const double shift = 4.0 * b * b * tt * tt * c;
    const double disc = branch == Branch::plus ? head * head + shift : head * head - shift;
    if (disc < 0)
        throw ValidityError("eta minus branch is undefined here (negative discriminant)");
    return 2.0 * b * std::sqrt(double(c)) * tt / (head + std::sqrt(disc));
}

Window energy_window(int n_particles, double t, double tp, int c) {
    require_validity(tp, t, c);
    const auto [e5, a, b] = constants();
    Window w;
    w.hi = -(2.0 * n_particles - e5) * t;
    w.lo = w.hi - b * std::sqrt(double(c)) * eta(Branch::plus, tp, t, c) * tp;
    return w;
}

double gap_lower_bound(double t, double tp, int c) {
    require_validity(tp, t, c);
    const auto [e5, a, b] = constants();
    const double tt = tp / t;
    return e5 * t -
           (a * tt * c * c + b * eta(Branch::minus, tp, t, c) * std::sqrt(double(c))) * tp;
}

double overlap_lower_bound(double tp, double t, int c) {
    require_validity(tp, t, c);
    const double em = eta(Branch::minus, tp, t, c);
    return 1.0 / std::sqrt(1.0 + em * em);
}

WeightParams weight_parameters(double tp, double t, int c) {
    require_c(c);
    require_t(t);
    if (!(tp > 0))
        throw ValidityError("weights are undefined at tp = 0 (uncoupled system, weights unused)");
    const auto [e5, a, b] = constants();
    WeightParams w;
    w.alpha = std::sqrt((3.0 + kRoot2) * t / (a * tp * c));
    w.d = 4.0 / 3.0;
    return w;
}

BoundReport bound_report(int n_particles, double t, double tp, int c) {
    BoundReport r;
    r.t = t;
    r.tp = tp;
    r.c = c;
    r.n_particles = n_particles;
    r.tp_sup = tprime_sup(t, c);
    r.valid = tp >= 0 && tp < r.tp_sup;
    require_validity(tp, t, c);
    r.eta_plus = eta(Branch::plus, tp, t, c);
    r.eta_minus = eta(Branch::minus, tp, t, c);
    if (n_particles > 0) {
        Window w = energy_window(n_particles, t, tp, c);
        r.window_lo = w.lo;
        r.window_hi = w.hi;
    }
    r.gap_lower = gap_lower_bound(t, tp, c);
    r.overlap_lower = overlap_lower_bound(tp, t, c);
    if (tp > 0) {
        WeightParams wp = weight_parameters(tp, t, c);
        r.alpha = wp.alpha;
        r.d = wp.d;
    } else {
        r.alpha = 0.0;
        r.d = 4.0 / 3.0;
    }
    return r;
}

} // namespace flatband
