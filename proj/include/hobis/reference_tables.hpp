#pragma once

// Published benchmark values the reproduction harness checks against, one
// block per table (T1..T7) or figure dataset (F1..F3). Values are embedded as
// printed in the source tables; known misprints are flagged where they occur
// rather than silently corrected. Tolerances live with the harness cells so
// every CSV row carries its own gate.

namespace hobis::ref {

// T1: down-and-out call, T=1, K=100, B=90, sigma=0.25, r=0.10, q=0, Rb=0.
// Closed form 5.9968 (S0=95) and 1.2738 (S0=91). Explicit-scheme ladder over
// the time-step count L; OBES vs MEFD with two S_max rules.
struct T1Row {
    int steps;
    double obes_95, mefd_plus_95, mefd_two_95;
    double obes_91, mefd_plus_91;
};
inline constexpr double kT1ClosedForm95 = 5.9968;
inline constexpr double kT1ClosedForm91 = 1.2738;
inline constexpr T1Row kTable1[] = {
    {50, 6.01109, 6.0111, 6.8299, 1.2654, 1.2654},
    {100, 5.9984, 5.9984, 6.8603, 1.2704, 1.2704},
    // the OBES/MEFD pair differs by 3.2e-3 here though every other row agrees
    // to <= 1e-4; one of the two printed values is off
    {150, 5.9965, 5.9997, 6.7449, 1.2719, 1.2719},
    {200, 5.9993, 5.9993, 6.6897, 1.2725, 1.2726},
    {700, 5.9970, 5.9970, 6.74, 1.2738, 1.2738},
    {800, 5.9972, 5.9972, 6.78, 1.2739, 1.2739},
    {900, 5.9973, 5.9973, 6.80, 1.2739, 1.2739},
    {1000, 5.9969, 5.9969, 6.7991, 1.2739, 1.2739},
    {2000, 5.9970, 5.9970, 6.7949, 1.2738, 1.2738},
    {3000, 5.9969, 5.9969, 6.7718, 1.2738, 1.2738},
    {4000, 5.9969, 5.9969, 6.8020, 1.2738, 1.2739},
};

// T2: volatility effect, S0=95, T=1, K=100, B=90, r=0.10.
struct T2Row {
    double sigma;
    int steps;
    double obes, mefd_plus, mefd_two;
    double closed_form;
};
inline constexpr T2Row kTable2[] = {
    {0.25, 200, 5.9993, 5.9993, 6.6897, 5.9968},
    {0.25, 2000, 5.9970, 5.9970, 6.7949, 5.9968},
    {0.30, 200, 5.9071, 5.9075, 7.6180, 5.9060},
    {0.30, 2000, 5.9061, 5.9065, 7.7124, 5.9060},
    {0.40, 200, 5.7498, 5.7802, 9.2320, 5.7502},
    {0.40, 2000, 5.7503, 5.7789, 9.5294, 5.7502},
};

// T3: down-and-out values near the boundaries, K=150, B=180.
// Set 1: T=0.25, sigma=0.20, r=0.05, delta=4.2 (S_m=271.906, gap 0.4125).
// Set 2: T=1,    sigma=0.45, r=0.07, delta=4.4 (S_m=1345.08, gap 2.0112).
struct T3Row {
    int set;  // 1 or 2
    double s0;
    double closed_form;  // as printed
    int mesh_m, mesh_l;  // published minimal mesh returning the closed form
    bool misprint;       // printed closed form inconsistent with the formula
};
inline constexpr T3Row kTable3[] = {
    {1, 271.905, 123.768, 3, 1, false},
    {1, 271.902, 123.765, 3, 1, false},
    {1, 270.000, 121.862, 10, 10, false},
    {1, 265.000, 116.861, 12, 12, false},
    {1, 180.001, 0.0026, 6, 6, false},
    {1, 180.010, 0.0264, 11, 11, false},
    {1, 181.000, 2.6297, 135, 135, false},
    {1, 225.953, 77.2335, 95, 95, false},
    {2, 1345.07, 1205.21, 2, 1, false},
    {2, 1345.00, 1205.14, 3, 1, false},
    {2, 1344.00, 1204.14, 7, 7, false},
    {2, 1340.00, 1200.14, 10, 10, false},
    {2, 180.001, 0.0015, 3, 1, false},
    {2, 180.010, 0.0015, 3, 1, true},  // duplicates the row above; formula gives 0.0148
    {2, 181.000, 1.4817, 95, 95, false},
    {2, 762.540, 622.632, 85, 85, false},
};
// published HABIS minimal meshes for the set-1 rows used in the mesh-search
// comparison (approximate boundary at S_max = 2 S0 + 200)
struct T3HabisRow {
    double s0;
    int habis_mesh;
};
inline constexpr T3HabisRow kTable3Habis[] = {
    {271.905, 25}, {270.000, 25}, {265.000, 25}, {180.001, 30}, {181.000, 400},
};

// T4: max-abs nodal error, down-and-out (K=100, B=90, r=0.10, S domain per
// cutoff) and double knock-out (K=100, B_l=75, B_u=125, r=0.10).
struct T4Row {
    bool double_barrier;
    double sigma, expiry, rebate;
    int mesh;
    double max_error;
};
inline constexpr T4Row kTable4[] = {
    {false, 0.15, 0.5, 0.0, 7, 2.4e-2},
    {false, 0.15, 0.5, 0.0, 20, 1.3e-3},
    {false, 0.15, 0.5, 0.0, 100, 3.0e-5},
    {false, 0.15, 1.0, 0.0, 100, 3.6e-5},
    {false, 0.15, 1.0, 3.0, 100, 5.6e-5},
    {false, 0.35, 1.0, 0.0, 100, 2.6e-4},
    {true, 0.15, 0.5, 0.0, 20, 7.9e-2},
    {true, 0.15, 0.5, 0.0, 100, 3.1e-3},
    {true, 0.15, 0.5, 0.0, 200, 7.8e-4},
    {true, 0.15, 1.0, 0.0, 200, 4.0e-4},
    {true, 0.15, 0.1, 0.0, 200, 3.5e-3},
    {true, 0.35, 1.0, 0.0, 200, 6.3e-2},
};

// T5: S=100, T=0.5, K=100, sigma=0.20, r=0.10; down-and-out B=99.9 and double
// knock-out 95/125, three monitoring frequencies.
struct T5Row {
    const char* frequency;  // continuous | daily | weekly
    int dates;              // 0 for continuous
    double down, dko;
};
inline constexpr T5Row kTable5[] = {
    {"continuous", 0, 0.165, 2.033},
    {"daily", 125, 1.511, 2.482},
    {"weekly", 25, 3.008, 3.006},
};

// T6: discretely monitored down-and-out, S=100, T=0.5, K=100, sigma=0.20,
// r=0.10. Reference columns: this scheme's published values and the
// Wiener-Hopf semi-analytic values.
struct T6Row {
    int dates;
    double barrier;
    double hobis, wiener_hopf;
};
inline constexpr T6Row kTable6[] = {
    {25, 95.0, 6.63176, 6.63156},
    {25, 99.5, 3.35542, 3.35558},
    {25, 99.9, 3.00848, 3.00887},
    {125, 95.0, 6.16797, 6.16864},
    {125, 99.5, 1.96143, 1.96130},
    {125, 99.9, 1.51098, 1.51068},
};

// T7: rebate and dividend variations, S=100, T=0.5, K=100, sigma=0.20, r=0.10;
// discrete column uses 25 monitoring dates.
struct T7Row {
    int kind;  // 0 down, 1 up, 2 double
    double b_lo, b_hi;
    double q, rebate;
    double continuous_value, discrete_value;
};
inline constexpr T7Row kTable7[] = {
    {0, 90.0, 0.0, 0.05, 3.0, 7.491, 7.493},
    {0, 90.0, 0.0, 0.05, 1.125, 6.719, 6.841},
    {0, 99.9, 0.0, 0.05, 3.0, 3.106, 4.924},
    {0, 99.9, 0.0, 0.00, 0.0, 0.165, 3.009},
    {1, 110.0, 0.0, 0.20, 0.0, 0.225, 0.344},
    {1, 110.0, 0.0, 0.02, 0.0, 0.299, 0.470},
    {1, 100.1, 0.0, 0.00, 0.01, 0.009, 0.009},
    {1, 100.1, 0.0, 0.00, 3.0, 2.987, 2.735},
    {2, 95.0, 125.0, 0.00, 0.0, 2.033, 3.008},
    {2, 95.0, 125.0, 0.04, 6.66, 7.057, 7.256},
    {2, 75.0, 185.0, 0.045, 0.0, 6.863, 6.864},
    {2, 80.0, 120.0, 0.04, 0.0, 2.196, 2.654},
};

// F1: double knock-out 75/125 convergence (S0=100, T=0.5, K=100, sigma=0.20,
// r=0.10); published max errors 5.1e-2 at 17x17 and 3.0e-3 at 70x70 (the
// figure caption and the text quote slightly different numbers; the harness
// gates at the looser published bound).
inline constexpr int kF1Meshes[] = {17, 70};
inline constexpr double kF1Gate[] = {1.0e-1, 5.0e-3};

// F2/F3: per-node error profiles, down-and-out T=0.5, K=100, B=90,
// sigma=0.20, r=0.10, mesh 40x40, delta=4.5 (derived: reproduces the printed
// error triple). Published max-abs errors per scheme.
inline constexpr double kF2Delta = 4.5;
inline constexpr double kF2MaxError[] = {0.00193, 0.00466, 0.02392};  // high-order, CN, implicit

}  // namespace hobis::ref
