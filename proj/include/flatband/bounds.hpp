#pragma once

namespace flatband {

// Closed-form constants of the spectral bounds, all derived from radicals.
//   e5: excess energy of the one-cycle bound pair, 2(2 - sqrt(2))
//   a:  quadratic coefficient of the dominance margin, (1425 + 974 sqrt(2))/896
//   b:  inter-cycle coupling coefficient, sqrt(3/4 (sqrt(2) - 1))
struct Constants {
    double e5;
    double a;
    double b;
};

Constants constants();

enum class Branch { plus, minus };

// Largest coupling ratio for which the low-energy block stays separated.
double tprime_sup(double t, int c);

// Norm-balance factor. The minus branch is only defined while the
// discriminant stays nonnegative, i.e. for tp < tprime_sup.
double eta(Branch branch, double tp, double t, int c);

struct Window {
    double lo;
    double hi;
};

// Enclosure for the lowest |cycles| eigenvalues at one particle above the
// critical density. hi does not depend on tp.
Window energy_window(int n_particles, double t, double tp, int c);

// Lower bound on the distance between the low block and the rest.
double gap_lower_bound(double t, double tp, int c);

// Lower bound on the projection of each low eigenstate onto the uncoupled
// ground states, in (1/sqrt(2), 1].
double overlap_lower_bound(double tp, double t, int c);

struct WeightParams {
    double alpha;
    double d;
};

// The fixed choice of diagonal-similarity parameters:
// alpha = sqrt((3 + sqrt(2)) t / (a tp c)), d = 4/3.
WeightParams weight_parameters(double tp, double t, int c);

struct BoundReport {
    double t = 0.0;
    double tp = 0.0;
    int c = 0;
    int n_particles = 0; // 0 = not specified; window fields invalid then
    double tp_sup = 0.0;
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double gap_lower = 0.0;
    double overlap_lower = 0.0;
    double alpha = 0.0;
    double d = 0.0;
    bool valid = false; // tp < tp_sup
};

// Evaluates every closed form at once; throws ValidityError when tp is at or
// beyond tprime_sup (no clamping).
BoundReport bound_report(int n_particles, double t, double tp, int c);

} // namespace flatband
