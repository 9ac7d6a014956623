#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "edp/errors.hpp"
#include "edp/quarkonia.hpp"
#include "edp/spectrum.hpp"

using namespace edp::quarkonia;

#ifndef EDP_DATA_FILE
#error "EDP_DATA_FILE must point at the experimental data csv"
#endif

namespace {

const ExperimentalTable& table(System system) {
    static const auto tables = load_experimental(EDP_DATA_FILE);
    return tables.at(system);
}

} // namespace

TEST_CASE("beta values and shape") {
    CHECK(beta(0, 1.0, 0.0) == -1.0);
    CHECK(beta(1, 1.0, 3.0) == doctest::Approx(-10.0).epsilon(1e-15));
    double prev = beta(0, 1.0, 0.0);
    for (int n = 1; n <= 20; ++n) {
        const double cur = beta(n, 1.0, 0.0);
        CHECK(cur < prev);  // strictly decreasing once (2n+1)^2 > p
        CHECK(cur < 0.0);
        prev = cur;
    }
    CHECK_THROWS_AS(beta(-1, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(beta(0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(beta(0, 1.0, -1.0), std::domain_error);
}

TEST_CASE("level energies") {
    Params params;
    params.k = 1.0;
    params.p = 0.0;
    params.lambda = 0.0;
    CHECK(energy(0, params) == doctest::Approx(-1.0 / 16.0).epsilon(1e-15));

    params.lambda = -0.4;
    // approaches -1/lambda from below the pole-free branch
    CHECK(std::abs(energy(100000, params) - 2.5) < 1e-6);

    // self-consistency: E = (1 + lambda E) beta / 16
    for (const int n : {0, 2, 7}) {
        const double e = energy(n, params);
        const double b = beta(n, params.k, params.p);
        CHECK(std::abs(e - (1.0 + params.lambda * e) * b / 16.0) < 1e-12);
    }

    // pole: beta(0) = -40 with lambda = -0.4 makes 16 - lambda*beta vanish
    Params pole = params;
    pole.k = std::sqrt(40.0);
    CHECK_THROWS_AS(energy(0, pole), edp::pole_error);
}

TEST_CASE("lambda = 0 energies equal beta/16 exactly") {
    Params params;
    params.k = 0.83;
    params.p = 2.6;
    for (int n = 0; n < 8; ++n) {
        CHECK(energy(n, params) == beta(n, params.k, params.p) / 16.0);
    }
}

TEST_CASE("energy agrees with the generic self-consistent solver") {
    // the exponent-1 convention here matches the square-root convention of
    // solve_closed at exponent 2, never at exponent 1
    Params params;
    params.k = 0.7;
    params.p = 1.2;
    params.lambda = -0.35;
    for (const int n : {0, 1, 4}) {
        const double e0 = beta(n, params.k, params.p) / 16.0;
        const auto same = edp::solve_closed({params.lambda, 2.0}, e0);
        CHECK(energy(n, params) == doctest::Approx(same.energy).epsilon(1e-14));
        const auto other = edp::solve_closed({params.lambda, 1.0}, e0);
        CHECK(std::abs(other.energy - energy(n, params)) > 1e-6);
    }
}

TEST_CASE("mass assembly") {
    Params params;
    params.k = 1.0;
    params.p = 0.0;
    params.lambda = 0.0;
    params.quark_mass = params.antiquark_mass = 1.697;
    CHECK(mass(0, params) == doctest::Approx(3.394 - 1.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("experimental table ingestion") {
    const auto& cc = table(System::ccbar);
    CHECK(cc.mass_of("1S") == doctest::Approx(3.096));
    CHECK(cc.mass_of("4S") == doctest::Approx(4.415));
    CHECK_FALSE(cc.mass_of("5S").has_value());  // absent row

    const auto& bb = table(System::bbbar);
    CHECK(bb.mass_of("5S") == doctest::Approx(10.579));  // as printed in the source
    CHECK_FALSE(bb.mass_of("9S").has_value());
}

TEST_CASE("fit hits the splitting targets exactly at lambda = 0") {
    const auto& cc = table(System::ccbar);
    const auto f = fit(System::ccbar, 0.0, cc, kDefaultCharmMass);
    CHECK(f.converged);
    CHECK(std::abs(f.residuals[0]) < 1e-12);
    CHECK(std::abs(f.residuals[1]) < 1e-12);
    // frozen linear-solve solution
    CHECK(f.k_sq == doctest::Approx(-0.24366447368421).epsilon(1e-10));
    CHECK(f.k_sq_p_sq == doctest::Approx(7.76101973684210).epsilon(1e-10));
    // the experimental splittings admit no real (k, p); flagged, not fatal
    CHECK_FALSE(f.real_parameters());
    CHECK_FALSE(f.fitted_k().has_value());

    const double m2s_m1s = energy_coefficients(1, f.k_sq, f.k_sq_p_sq, 0.0) -
                           energy_coefficients(0, f.k_sq, f.k_sq_p_sq, 0.0);
    CHECK(m2s_m1s == doctest::Approx(0.553).epsilon(1e-10));
    const double m4s_m3s = energy_coefficients(3, f.k_sq, f.k_sq_p_sq, 0.0) -
                           energy_coefficients(2, f.k_sq, f.k_sq_p_sq, 0.0);
    CHECK(m4s_m3s == doctest::Approx(0.375).epsilon(1e-10));

    const auto& bb = table(System::bbbar);
    const auto g = fit(System::bbbar, 0.0, bb, kDefaultBottomMass);
    CHECK(g.converged);
    const double m3s_m1s = energy_coefficients(2, g.k_sq, g.k_sq_p_sq, 0.0) -
                           energy_coefficients(0, g.k_sq, g.k_sq_p_sq, 0.0);
    CHECK(m3s_m1s == doctest::Approx(0.895).epsilon(1e-10));
    const double m4s_m2s = energy_coefficients(3, g.k_sq, g.k_sq_p_sq, 0.0) -
                           energy_coefficients(1, g.k_sq, g.k_sq_p_sq, 0.0);
    CHECK(m4s_m2s == doctest::Approx(0.557).epsilon(1e-10));
}

TEST_CASE("fitted coefficients, frozen values") {
    const auto& cc = table(System::ccbar);
    const auto& bb = table(System::bbbar);

    const auto cc04 = fit(System::ccbar, -0.4, cc, kDefaultCharmMass);
    CHECK(cc04.converged);
    CHECK(cc04.k_sq == doctest::Approx(-0.56693245829393).epsilon(1e-8));
    CHECK(cc04.k_sq_p_sq == doctest::Approx(4.81143883656269).epsilon(1e-8));

    const auto cc02 = fit(System::ccbar, -0.2, cc, kDefaultCharmMass);
    CHECK(cc02.k_sq == doctest::Approx(-0.32289753777560).epsilon(1e-8));

    const auto bb03 = fit(System::bbbar, -0.3, bb, kDefaultBottomMass);
    CHECK(bb03.k_sq == doctest::Approx(-0.26754040735605).epsilon(1e-8));

    // the -0.6 bottomonium fit selects a different sheet of the splitting
    // system than the lambda = 0 continuation
    const auto bb06 = fit(System::bbbar, -0.6, bb, kDefaultBottomMass);
    CHECK(bb06.k_sq == doctest::Approx(-3.13512173467880).epsilon(1e-8));
    CHECK(bb06.k_sq_p_sq == doctest::Approx(-3.93296588509765).epsilon(1e-8));
    CHECK(bb06.roots_found >= 2);
}

TEST_CASE("fitted masses, frozen values") {
    const auto& cc = table(System::ccbar);
    const auto cc04 = fit(System::ccbar, -0.4, cc, kDefaultCharmMass);
    const double pair = 2.0 * kDefaultCharmMass;
    CHECK(pair + energy_coefficients(0, cc04.k_sq, cc04.k_sq_p_sq, -0.4) ==
          doctest::Approx(3.097226977).epsilon(1e-6));
    CHECK(pair + energy_coefficients(8, cc04.k_sq, cc04.k_sq_p_sq, -0.4) ==
          doctest::Approx(5.403387459).epsilon(1e-6));

    const auto& bb = table(System::bbbar);
    const auto bb03 = fit(System::bbbar, -0.3, bb, kDefaultBottomMass);
    CHECK(2.0 * kDefaultBottomMass + energy_coefficients(1, bb03.k_sq, bb03.k_sq_p_sq, -0.3) ==
          doctest::Approx(9.230348431).epsilon(1e-6));

    const auto bb06 = fit(System::bbbar, -0.6, bb, kDefaultBottomMass);
    CHECK(2.0 * kDefaultBottomMass + energy_coefficients(0, bb06.k_sq, bb06.k_sq_p_sq, -0.6) ==
          doctest::Approx(9.485199106).epsilon(1e-6));
}

TEST_CASE("fit input validation") {
    ExperimentalTable empty;
    empty.system = System::ccbar;
    CHECK_THROWS_AS(fit(System::ccbar, 0.0, empty, 1.697), std::invalid_argument);
    CHECK_THROWS_AS(fit(System::ccbar, 0.0, table(System::ccbar), 0.0),
                    std::invalid_argument);
}

TEST_CASE("mass table layout") {
    const auto& cc = table(System::ccbar);
    const auto report = mass_table(System::ccbar, {0.0, -0.4}, cc, kDefaultCharmMass, 8);
    CHECK(report.failed_lambdas.empty());
    // 9 states at lambda = 0 (no footer), 9 + saturation bound at -0.4
    REQUIRE(report.rows.size() == 19);
    CHECK(report.rows[0].state == "1S");
    CHECK(report.rows[0].experimental.has_value());
    CHECK(report.rows[5].state == "6S");
    CHECK_FALSE(report.rows[5].experimental.has_value());
    const auto& footer = report.rows.back();
    CHECK(footer.saturation_bound);
    CHECK(footer.mass_gev == doctest::Approx(5.894).epsilon(1e-12));
    for (const auto& row : report.rows) {
        if (row.experimental) {
            CHECK(*row.deviation ==
                  doctest::Approx(row.mass_gev - *row.experimental).epsilon(1e-15));
        }
    }
}

TEST_CASE("masses rise monotonically below the saturation bound") {
    for (const auto& [system, lambdas] :
         {std::pair<System, std::vector<double>>{System::ccbar, {0.0, -0.2, -0.4}},
          std::pair<System, std::vector<double>>{System::bbbar, {0.0, -0.3, -0.6}}}) {
        const double mq = default_quark_mass(system);
        for (const double lam : lambdas) {
            const auto f = fit(system, lam, table(system), mq);
            REQUIRE(f.converged);
            double prev = -1.0;
            for (int n = 0; n <= 9; ++n) {
                const double m = 2.0 * mq + energy_coefficients(n, f.k_sq, f.k_sq_p_sq, lam);
                CHECK(m > prev);
                prev = m;
                if (lam < 0) CHECK(m < 2.0 * mq - 1.0 / lam);
            }
            if (lam < 0) {
                // bound approached monotonically
                const double bound = 2.0 * mq - 1.0 / lam;
                double prev_gap = 1e300;
                for (int n = 0; n <= 9; ++n) {
                    const double gap =
                        bound - (2.0 * mq + energy_coefficients(n, f.k_sq, f.k_sq_p_sq, lam));
                    CHECK(gap < prev_gap);
                    prev_gap = gap;
                }
            }
        }
    }
}

TEST_CASE("system names round trip") {
    CHECK(to_string(System::ccbar) == "ccbar");
    CHECK(system_from_string("bbbar") == System::bbbar);
    CHECK_FALSE(system_from_string("ttbar").has_value());
    CHECK(state_name(0) == "1S");
    CHECK(state_name(8) == "9S");
}
