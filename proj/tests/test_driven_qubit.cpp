#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cqad/core/profiles.hpp"
#include "cqad/driven_qubit/calibration.hpp"
#include "cqad/driven_qubit/perturbation.hpp"
#include "cqad/driven_qubit/sidebands.hpp"
#include "cqad/driven_qubit/spectroscopy.hpp"
#include "cqad/driven_qubit/stark.hpp"

using namespace cqad;

namespace {

DriveConfiguration table_drive(const DeviceParameters& dev, double Omega_1, double Omega_2) {
    return {dev.qubit.omega_q + to_angular(table_s1::delta_1_mhz), dev.qubit.omega_q + to_angular(table_s1::delta_2_mhz),
            Omega_1, Omega_2, 0.0};
}

/// Equal amplitudes giving |Lambda'/Delta_21| = x at the table drive detunings.
DriveConfiguration drive_for_depth(const DeviceParameters& dev, double x) {
    const double d1 = to_angular(table_s1::delta_1_mhz), d2 = to_angular(table_s1::delta_2_mhz);
    const double per = std::fabs(-2.0 * dev.qubit.alpha * (1.0 / (d1 * (d1 + dev.qubit.alpha)) + 1.0 / (d2 * (d2 + dev.qubit.alpha))));
    const double amp = std::sqrt(x * (d2 - d1) / per);
    return table_drive(dev, amp, amp);
}

}  // namespace

TEST(Stark, ZeroDrive) { EXPECT_EQ(stark_shift_single_drive(0.0, 3000.0, 1369.7), 0.0); }

TEST(Stark, WeakAnharmonicityLimit) {
    const double Omega = 50.0, Delta = 1e6, alpha = 10.0;
    const double xi = Omega / Delta;
    EXPECT_NEAR(stark_shift_single_drive(Omega, Delta, alpha) / (-2.0 * alpha * xi * xi), 1.0, 1e-4);
}

TEST(Stark, DirectEvaluation) {
    const double v = stark_shift_single_drive(to_angular(50.0), to_angular(492.552), to_angular(218.0));
    EXPECT_NEAR(to_mhz(v), -3.11, 0.005);
}

TEST(Stark, Poles) {
    EXPECT_THROW(stark_shift_single_drive(1.0, 0.0, 5.0), Error);
    try {
        stark_shift_single_drive(1.0, -5.0, 5.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularDetuning);
    }
}

TEST(StarkProperty, EvenInOmegaAndInDetuningForWeakAnharmonicity) {
    // for alpha << |Delta| the shift tends to -2 alpha xi^2 for either sign of Delta
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1.0, 400.0);
    for (int i = 0; i < 100; ++i) {
        const double Om = u(rng), D = 1e5 * u(rng), a = u(rng);
        EXPECT_EQ(stark_shift_single_drive(Om, D, a), stark_shift_single_drive(-Om, D, a));
        const double p = stark_shift_single_drive(Om, D, a), m = stark_shift_single_drive(Om, -D, a);
        EXPECT_LT(p, 0.0);
        EXPECT_LT(m, 0.0);
        EXPECT_NEAR(p / m, 1.0, 10.0 * a / D);
    }
}

TEST(ModulationDepth, NoFirstDrive) {
    const auto dev = table_s1_device();
    const auto s = modulation_depth(table_drive(dev, 0.0, 40.0), dev.qubit);
    EXPECT_EQ(s.lambda_raw, 0.0);
    EXPECT_EQ(s.lambda_corrected, 0.0);
    EXPECT_EQ(s.J(0), 1.0);
    EXPECT_EQ(s.J(1), 0.0);
}

TEST(ModulationDepth, CorrectionVanishesWithoutAnharmonicity) {
    const double D = 3000.0, Om = 200.0;
    const double ratio = lambda_corrected(Om, Om, D, D, 1e-9) / lambda_raw(Om, Om, D, D, 1e-9);
    EXPECT_NEAR(ratio, 1.0, 1e-9);
}

TEST(ModulationDepth, ReferenceTwoModeDepth) {
    const auto dev = table_s1_device();
    const auto s = modulation_depth(drive_for_depth(dev, 0.61), dev.qubit);
    EXPECT_NEAR(std::fabs(s.modulation_depth), 0.61, 1e-12);
    EXPECT_NEAR(s.J(0), 0.91, 0.005);
    EXPECT_NEAR(std::fabs(s.J(1)), 0.29, 0.005);
    EXPECT_EQ(s.amplitudes.n_max, 16);
    EXPECT_LT(s.lambda_corrected, 0.0);  // drives above the qubit
    EXPECT_LT(s.delta_q_ss, 0.0);
}

TEST(ModulationDepthProperty, SignAndMagnitude) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uD(200.0, 5000.0), uf(0.0, 0.5), uO(1.0, 300.0), ua(100.0, 2000.0);
    for (int i = 0; i < 500; ++i) {
        const double a = ua(rng), d1 = uD(rng), d2 = d1 + uf(rng) * a, o1 = uO(rng), o2 = uO(rng);
        const double raw = lambda_raw(o1, o2, d1, d2, a), cor = lambda_corrected(o1, o2, d1, d2, a);
        EXPECT_EQ(std::signbit(raw), std::signbit(cor));
        EXPECT_LE(std::fabs(cor), std::fabs(raw));
    }
}

TEST(Perturbation, ZeroDrive) {
    const auto dev = table_s1_device();
    const auto r = perturbation_oracle(dev.qubit, table_drive(dev, 0.0, 0.0));
    EXPECT_EQ(r.lambda_corrected, 0.0);
    EXPECT_EQ(r.delta_q_ss_corrected, 0.0);
}

TEST(Perturbation, SingleDriveHasNoModulation) {
    const auto dev = table_s1_device();
    const auto d = table_drive(dev, to_angular(50.0), 0.0);
    const auto r = perturbation_oracle(dev.qubit, d);
    EXPECT_EQ(r.lambda_corrected, 0.0);
    EXPECT_NEAR(r.delta_q_ss_corrected / stark_shift_single_drive(d.Omega_1, to_angular(492.552), dev.qubit.alpha),
                1.0, 1e-5);
}

TEST(Perturbation, MatchesClosedFormOnRandomDrives) {
    auto dev = table_s1_device();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uD(150.0, 900.0), u21(2.0, 40.0), uxi(0.01, 0.3);
    for (int i = 0; i < 20; ++i) {
        const double d1 = to_angular(uD(rng)), d2 = d1 + to_angular(u21(rng));
        DriveConfiguration d{dev.qubit.omega_q + d1, dev.qubit.omega_q + d2, uxi(rng) * d1, uxi(rng) * d2, 0.0};
        const auto r = perturbation_oracle(dev.qubit, d);
        const double lc = lambda_corrected(d.Omega_1, d.Omega_2, d1, d2, dev.qubit.alpha);
        const double ss = stark_shift_single_drive(d.Omega_1, d1, dev.qubit.alpha) +
                          stark_shift_single_drive(d.Omega_2, d2, dev.qubit.alpha);
        EXPECT_LT(std::fabs(r.lambda_corrected / lc - 1.0), 0.01);
        EXPECT_LT(std::fabs(r.delta_q_ss_corrected / ss - 1.0), 0.01);
    }
}

TEST(Perturbation, RejectsTwoLevelQubit) {
    const auto dev = table_s1_device();
    PerturbationOptions o;
    o.qubit_levels = 2;
    EXPECT_THROW(perturbation_oracle(dev.qubit, table_drive(dev, 1.0, 1.0), o), Error);
}

TEST(Spectroscopy, NoProbe) {
    const auto dev = table_s1_device();
    ProbeConfig p{{dev.qubit.omega_q, dev.qubit.omega_q + 1.0}, 0.0};
    const auto c = spectroscopy_response(dev, table_drive(dev, 30.0, 30.0), p);
    for (double v : c.p_e) EXPECT_EQ(v, 0.0);
}

TEST(Spectroscopy, SaturationLimit) {
    const auto dev = table_s1_device();
    ProbeConfig p{{dev.qubit.omega_q}, 1e4};
    const auto c = spectroscopy_response(dev, table_drive(dev, 0.0, 0.0), p);
    EXPECT_NEAR(c.p_e[0], 0.5, 1e-6);
    EXPECT_LT(c.p_e[0], 0.5 + 1e-9);
}

TEST(Spectroscopy, NegativeProbeRejected) {
    const auto dev = table_s1_device();
    ProbeConfig p{{dev.qubit.omega_q}, -1.0};
    EXPECT_THROW(spectroscopy_response(dev, table_drive(dev, 0.0, 0.0), p), Error);
}

TEST(SpectroscopyProperty, PeaksOnSidebandsOrderedByAmplitude) {
    const auto dev = table_s1_device();
    const double d1 = to_angular(table_s1::delta_1_mhz), d2 = to_angular(table_s1::delta_2_mhz);
    const double xi = std::sqrt(0.0274);
    const auto drive = table_drive(dev, xi * d1, xi * d2);
    const auto s = modulation_depth(drive, dev.qubit);
    const double center = dev.qubit.omega_q + s.delta_q_ss;
    const double step = khz_to_angular(1.0);
    const double weak = 0.02;  // Omega_p^2 T1 T2 << 1
    std::vector<std::pair<double, double>> peaks;  // |J_n|, height
    for (int n = -8; n <= 8; ++n) {
        if (std::fabs(s.J(n)) <= 0.05) continue;
        ProbeConfig p;
        p.Omega_p = weak;
        const double expect = center + n * s.delta_21;
        for (int k = -200; k <= 200; ++k) p.omega_p_list.push_back(expect + k * step);
        const auto c = spectroscopy_response(dev, drive, p);
        const auto it = std::max_element(c.p_e.begin(), c.p_e.end());
        const double found = c.frequencies[static_cast<std::size_t>(it - c.p_e.begin())];
        EXPECT_LE(std::fabs(found - expect), step) << "sideband " << n;
        for (double v : c.p_e) EXPECT_LT(v, 0.5 + 1e-9);
        peaks.emplace_back(std::fabs(s.J(n)), *it);
    }
    ASSERT_GE(peaks.size(), 3u);
    std::sort(peaks.begin(), peaks.end());
    for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_LE(peaks[i - 1].second, peaks[i].second * (1 + 1e-9));
}

namespace {

std::vector<CalibrationPoint> synthetic_calibration(double eta, double Delta, double alpha, double omega_q,
                                                    double noise, std::mt19937_64* rng) {
    std::vector<CalibrationPoint> pts;
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int i = 1; i <= 12; ++i) {
        const double a = 0.02 * i;
        const double shift = stark_shift_single_drive(eta * a, Delta, alpha);
        const double jitter = rng ? noise * std::fabs(shift) * n01(*rng) : 0.0;
        pts.push_back({a, omega_q + shift + jitter});
    }
    return pts;
}

}  // namespace

TEST(Calibration, NoiselessRoundTrip) {
    const auto dev = table_s1_device();
    const double eta = to_angular(256.0), Delta = to_angular(492.552);
    const auto pts = synthetic_calibration(eta, Delta, dev.qubit.alpha, dev.qubit.omega_q, 0.0, nullptr);
    const auto r = calibrate_eta(pts, Delta, dev.qubit.alpha, dev.qubit.omega_q);
    EXPECT_NEAR(r.eta / eta, 1.0, 1e-6);
    EXPECT_GT(r.eta, 0.0);
}

TEST(Calibration, NoisyRoundTrip) {
    const auto dev = table_s1_device();
    const double eta = to_angular(256.0), Delta = to_angular(492.552);
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const auto pts = synthetic_calibration(eta, Delta, dev.qubit.alpha, dev.qubit.omega_q, 0.01, &rng);
        const auto r = calibrate_eta(pts, Delta, dev.qubit.alpha, dev.qubit.omega_q);
        EXPECT_NEAR(r.eta / eta, 1.0, 0.03);
    }
}

TEST(Calibration, DegenerateInputs) {
    const auto dev = table_s1_device();
    const double w = dev.qubit.omega_q;
    std::vector<CalibrationPoint> zeros{{0.0, w}, {0.0, w - 1.0}, {0.0, w - 2.0}};
    try {
        calibrate_eta(zeros, 3000.0, dev.qubit.alpha, w);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FitError);
    }
    std::vector<CalibrationPoint> two{{0.1, w}, {0.2, w}};
    EXPECT_THROW(calibrate_eta(two, 3000.0, dev.qubit.alpha, w), Error);
    std::vector<CalibrationPoint> upward{{0.1, w + 1.0}, {0.2, w + 4.0}, {0.3, w + 9.0}};
    EXPECT_THROW(calibrate_eta(upward, 3000.0, dev.qubit.alpha, w), Error);
}
