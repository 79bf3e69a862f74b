#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "coherence/error.hpp"
#include "coherence/passivity.hpp"
#include "coherence/rational_function.hpp"
#include "coherence/state_space.hpp"

using namespace coherence;

namespace {

const Complex j{0.0, 1.0};

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Io;
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// Product of (s - r_k), used as an independent way to build test polynomials.
Polynomial from_roots(const std::vector<double>& rs) {
    Polynomial p{1.0};
    for (double r : rs) p = p * Polynomial{-r, 1.0};
    return p;
}

}  // namespace

TEST_SUITE("polynomial") {
    TEST_CASE("zero polynomial is empty with sentinel degree") {
        const Polynomial z{0.0, 0.0};
        CHECK(z.is_zero());
        CHECK(z.coeffs().empty());
        CHECK(z.degree() == Polynomial::kZeroDegree);
        CHECK(Polynomial{1.0, 2.0, 0.0}.degree() == 1);
    }

    TEST_CASE("non-finite coefficients are rejected") {
        CHECK(kind_of([] { Polynomial{1.0, std::nan("")}; }) == ErrorKind::InvalidArgument);
    }

    TEST_CASE("arithmetic and evaluation") {
        const Polynomial p{1.0, 2.0};  // 1 + 2s
        const Polynomial q{-1.0, 0.0, 1.0};
        CHECK((p * q).coeffs() == std::vector<double>{-1.0, -2.0, 1.0, 2.0});
        CHECK((p + q).coeffs() == std::vector<double>{0.0, 2.0, 1.0});
        CHECK((q - q).is_zero());
        CHECK(p(3.0) == 7.0);
        CHECK(q(j) == Complex(-2.0, 0.0));
        CHECK(q.derivative().coeffs() == std::vector<double>{0.0, 2.0});
    }

    TEST_CASE("divmod reconstructs the dividend") {
        const Polynomial a{5.0, -3.0, 2.0, 1.0};
        const Polynomial b{1.0, 1.0};
        const auto [quot, rem] = divmod(a, b);
        CHECK(rem.degree() <= 0);
        const Polynomial back = quot * b + rem;
        for (std::size_t k = 0; k < 4; ++k) CHECK(back[k] == doctest::Approx(a[k]).epsilon(1e-14));
        CHECK(kind_of([&] { divmod(a, Polynomial{}); }) == ErrorKind::ZeroFunction);
    }

    TEST_CASE("roots of simple polynomials") {
        auto r1 = roots(Polynomial{1.0, 1.0});
        REQUIRE(r1.size() == 1);
        CHECK(close(r1[0], -1.0, 1e-14));

        auto r2 = roots(Polynomial{1.0, 0.0, 1.0});
        REQUIRE(r2.size() == 2);
        std::sort(r2.begin(), r2.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
        CHECK(close(r2[0], -j, 1e-14));
        CHECK(close(r2[1], j, 1e-14));

        auto r3 = roots(Polynomial{6.0, 11.0, 6.0, 1.0});
        std::sort(r3.begin(), r3.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
        REQUIRE(r3.size() == 3);
        CHECK(close(r3[0], -3.0, 1e-12));
        CHECK(close(r3[1], -2.0, 1e-12));
        CHECK(close(r3[2], -1.0, 1e-12));

        CHECK(kind_of([] { roots(Polynomial{3.0}); }) == ErrorKind::DegreeZero);
        CHECK(kind_of([] { roots(Polynomial{}); }) == ErrorKind::DegreeZero);
    }

    TEST_CASE("root residuals stay below 1e-8 of the coefficient scale") {
        std::mt19937_64                        rng(11);
        std::uniform_real_distribution<double> coeff(-5.0, 5.0);
        for (int trial = 0; trial < 200; ++trial) {
            const int           degree = 1 + trial % 12;
            std::vector<double> c(static_cast<std::size_t>(degree + 1));
            for (auto& x : c) x = coeff(rng);
            if (std::abs(c.back()) < 0.1) c.back() = 1.0;
            const Polynomial p(c);
            const auto       zs = roots(p);
            REQUIRE(zs.size() == static_cast<std::size_t>(degree));
            for (const auto& z : zs) CHECK(std::abs(p(z)) <= 1e-8 * p.max_abs() * std::max(1.0, std::pow(std::abs(z), degree)));
        }
    }

    TEST_CASE("roots recover a constructed factorization") {
        const std::vector<double> rs{-0.5, -1.5, -2.0, -7.0, 3.0};
        auto                      zs = roots(from_roots(rs));
        std::sort(zs.begin(), zs.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
        std::vector<double> sorted = rs;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < rs.size(); ++k) CHECK(close(zs[k], sorted[k], 1e-10));
    }

    TEST_CASE("gcd finds a shared factor and is 1 for coprime inputs") {
        const Polynomial a = from_roots({-1.0, -2.0});
        const Polynomial b = from_roots({-1.0, -3.0});
        const Polynomial g = gcd(a, b);
        REQUIRE(g.degree() == 1);
        CHECK(g[1] == 1.0);
        CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gcd(from_roots({-1.0}), from_roots({-2.0})).degree() == 0);
    }

    TEST_CASE("exact_sum is correctly rounded and order independent") {
        const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
        CHECK(exact_sum(v) == 2.0);
        std::vector<double> w{0.1, 0.2, 0.3, 1e-17, -0.6};
        const double        ref = exact_sum(w);
        std::sort(w.begin(), w.end());
        do {
            CHECK(exact_sum(w) == ref);
        } while (std::next_permutation(w.begin(), w.end()));
    }
}

TEST_SUITE("rational_function") {
    TEST_CASE("evaluation, poles and the infinity sentinel") {
        const RationalFunction r({1.0}, {1.0, 1.0});
        CHECK(r.eval(0.0) == Complex(1.0, 0.0));
        CHECK(close(r.eval(j), Complex(0.5, -0.5), 1e-15));
        CHECK(is_infinite(r.eval(-1.0)));
    }

    TEST_CASE("zero denominator is rejected and zero function is 0/1") {
        CHECK(kind_of([] { RationalFunction(Polynomial{1.0}, Polynomial{}); }) == ErrorKind::ZeroFunction);
        const RationalFunction z(Polynomial{}, Polynomial{3.0, 1.0});
        CHECK(z.is_zero());
        CHECK(z.den() == Polynomial{1.0});
    }

    TEST_CASE("canonical form cancels common factors") {
        const RationalFunction r(from_roots({-1.0, -2.0}), from_roots({-1.0, -3.0}));
        CHECK(r.num().degree() == 1);
        CHECK(r.den().degree() == 1);
        CHECK(r.poles().size() == 1);
        CHECK(close(r.poles()[0], -3.0, 1e-10));
        CHECK(close(r.eval(0.5), (0.5 + 2.0) / (0.5 + 3.0), 1e-13));
    }

    TEST_CASE("monic form has a unit leading denominator") {
        const RationalFunction r({2.0}, {6.0, 3.0});
        const auto [num, den] = r.monic();
        CHECK(den.leading() == 1.0);
        CHECK(den[0] == doctest::Approx(2.0));
        CHECK(num[0] == doctest::Approx(2.0 / 3.0));
    }

    TEST_CASE("arithmetic examples") {
        const RationalFunction g({1.0}, {1.0, 1.0});
        CHECK(arithmetic(g, g, ArithmeticOp::add) == RationalFunction({2.0}, {1.0, 1.0}));
        const RationalFunction prod = arithmetic(g, RationalFunction({1.0, 1.0}, {2.0, 1.0}), ArithmeticOp::mul);
        CHECK(prod.den().degree() == 1);
        CHECK(close(prod.eval(0.3), 1.0 / 2.3, 1e-14));
        CHECK(arithmetic(RationalFunction({0.0, 1.0}, {1.0}), RationalFunction::constant(1.0), ArithmeticOp::add) ==
              RationalFunction({1.0, 1.0}, {1.0}));
    }

    TEST_CASE("reciprocal examples and errors") {
        CHECK(RationalFunction({1.0}, {1.0, 1.0}).reciprocal() == RationalFunction({1.0, 1.0}, {1.0}));
        CHECK(RationalFunction({2.0, 1.0}, {1.0, 3.0, 1.0}).reciprocal() == RationalFunction({1.0, 3.0, 1.0}, {2.0, 1.0}));
        CHECK(kind_of([] { RationalFunction(Polynomial{}, Polynomial{1.0}).reciprocal(); }) == ErrorKind::ZeroFunction);
    }

    TEST_CASE("double reciprocal round-trips bitwise") {
        std::mt19937_64                        rng(3);
        std::uniform_real_distribution<double> c(-3.0, 3.0);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> num(static_cast<std::size_t>(1 + trial % 3)), den(static_cast<std::size_t>(2 + trial % 3));
            for (auto& x : num) x = c(rng);
            for (auto& x : den) x = c(rng);
            const RationalFunction r(num, den);
            if (r.is_zero()) continue;
            CHECK(r.reciprocal().reciprocal() == r);
        }
    }

    TEST_CASE("harmonic mean examples") {
        const RationalFunction g({1.0}, {1.0, 1.0});
        const std::vector<RationalFunction> same{g, g};
        CHECK(harmonic_mean(same) == g);
        const std::vector<RationalFunction> two{g, RationalFunction({1.0}, {3.0, 2.0})};
        CHECK(harmonic_mean(two) == RationalFunction({2.0}, {4.0, 3.0}));
        const std::vector<RationalFunction> swing{RationalFunction({1.0}, {0.7, 2.5}), RationalFunction({1.0}, {1.1, 0.5})};
        CHECK(harmonic_mean(swing) == RationalFunction({2.0}, {0.7 + 1.1, 2.5 + 0.5}));
    }

    TEST_CASE("harmonic mean of n copies is the copy") {
        const RationalFunction g({0.3, 1.7}, {2.0, 0.4, 1.1});
        for (int n : {1, 2, 5, 17}) CHECK(harmonic_mean(std::vector<RationalFunction>(static_cast<std::size_t>(n), g)) == g);
    }

    TEST_CASE("harmonic mean is permutation invariant") {
        std::mt19937_64                        rng(5);
        std::uniform_real_distribution<double> c(0.5, 3.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<RationalFunction> gs;
            for (int i = 0; i < 5; ++i) {
                if (i % 2 == 0) {
                    gs.emplace_back(std::vector<double>{1.0}, std::vector<double>{c(rng), c(rng)});
                } else {
                    gs.emplace_back(std::vector<double>{1.0, c(rng)}, std::vector<double>{c(rng), c(rng), c(rng)});
                }
            }
            const RationalFunction ref = harmonic_mean(gs);
            for (int shuffle = 0; shuffle < 5; ++shuffle) {
                std::shuffle(gs.begin(), gs.end(), rng);
                CHECK(harmonic_mean(gs) == ref);
            }
        }
    }

    TEST_CASE("symbolic harmonic mean matches the pointwise formula") {
        std::mt19937_64                        rng(9);
        std::uniform_real_distribution<double> c(0.5, 3.0), w(-4.0, 4.0);
        std::vector<RationalFunction>          gs;
        for (int i = 0; i < 4; ++i) {
            gs.emplace_back(std::vector<double>{c(rng), 1.0}, std::vector<double>{c(rng), c(rng), 1.0});
        }
        const RationalFunction gbar = harmonic_mean(gs);
        for (int k = 0; k < 50; ++k) {
            const Complex s(w(rng), w(rng));
            Complex       sum = 0.0;
            for (const auto& g : gs) sum += 1.0 / g.eval(s);
            CHECK(close(gbar.eval(s), 4.0 / sum, 1e-10));
        }
    }

    TEST_CASE("text form round-trips and displays a monic numerator") {
        const RationalFunction r({1.0}, {1.0, 1.0});
        CHECK(to_text(r) == "num=[1], den=[1,1]");
        CHECK(to_text(RationalFunction({2.0}, {14.0, 6.0})) == "num=[1], den=[7,3]");
        CHECK(to_text(RationalFunction(Polynomial{}, Polynomial{1.0})) == "num=[0], den=[1]");
        CHECK(parse_rational("num=[1], den=[7,3]") == RationalFunction({1.0}, {7.0, 3.0}));
        CHECK(kind_of([] { parse_rational("num=[1 den=[2]"); }) == ErrorKind::ConfigParse);
    }
}

TEST_SUITE("state_space") {
    TEST_CASE("first-order canonical form") {
        const StateSpaceModel m = to_state_space(RationalFunction({1.0}, {2.5, 1.0}));
        CHECK(m.A(0, 0) == -2.5);
        CHECK(m.B(0, 0) == 1.0);
        CHECK(m.C(0, 0) == 1.0);
        CHECK(m.D(0, 0) == 0.0);
    }

    TEST_CASE("biproper function splits off the feedthrough") {
        const StateSpaceModel m = to_state_space(RationalFunction({2.0, 1.0}, {1.0, 1.0}));
        CHECK(m.D(0, 0) == 1.0);
        const StateSpaceModel strict{m.A, m.B, m.C, Eigen::MatrixXd::Zero(1, 1)};
        CHECK(close(strict.response(j)(0, 0), 1.0 / (1.0 + j), 1e-14));
    }

    TEST_CASE("improper functions cannot be realized") {
        CHECK(kind_of([] { to_state_space(RationalFunction({0.0, 1.0}, {1.0})); }) == ErrorKind::Improper);
    }

    TEST_CASE("dimension checks") {
        CHECK(kind_of([] { StateSpaceModel(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 2),
                                           Eigen::MatrixXd::Zero(1, 1)); }) == ErrorKind::InvalidArgument);
    }

    TEST_CASE("realizations reproduce the frequency response") {
        std::mt19937_64                        rng(21);
        std::uniform_real_distribution<double> pole(0.2, 4.0), c(-2.0, 2.0);
        for (int trial = 0; trial < 30; ++trial) {
            const Polynomial       den = from_roots({-pole(rng), -pole(rng), -pole(rng)});
            const Polynomial       num{c(rng), c(rng), c(rng), trial % 2 == 0 ? c(rng) : 0.0};
            const RationalFunction r(num, den);
            const StateSpaceModel  m = to_state_space(r);
            for (int k = 0; k < 100; ++k) {
                const Complex s(0.0, std::pow(10.0, -3.0 + 6.0 * k / 99.0));
                CHECK(close(m.response(s)(0, 0), r.eval(s), 1e-8));
            }
        }
    }
}

TEST_SUITE("passivity") {
    TEST_CASE("first-order lag is OSP with epsilon 1") {
        const auto cert = passivity_check(RationalFunction({1.0}, {1.0, 1.0}), PassivityMode::osp);
        CHECK(cert.kind == PassivityKind::output_strictly_passive);
        CHECK(cert.epsilon == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(!cert.witness);
        CHECK(!cert.grid_resolution.empty());
    }

    TEST_CASE("integrator is positive real but not OSP") {
        const RationalFunction f({1.0}, {0.0, 1.0});
        CHECK(passivity_check(f, PassivityMode::positive_real).kind == PassivityKind::positive_real);
        CHECK(passivity_check(f, PassivityMode::osp).kind == PassivityKind::fails);
    }

    TEST_CASE("unstable pole fails with the pole as witness") {
        const RationalFunction g({1.0}, {-1.0, 1.0});
        for (auto mode : {PassivityMode::positive_real, PassivityMode::osp}) {
            const auto cert = passivity_check(g, mode);
            CHECK(cert.kind == PassivityKind::fails);
            REQUIRE(cert.witness);
            CHECK(close(*cert.witness, 1.0, 1e-9));
        }
    }

    TEST_CASE("failure witnesses violate the inequality") {
        // Re(1/(s^2 + 0.1 s + 1)) < 0 above the resonance.
        const RationalFunction g({1.0}, {1.0, 0.1, 1.0});
        const auto             cert = passivity_check(g, PassivityMode::positive_real);
        REQUIRE(cert.kind == PassivityKind::fails);
        REQUIRE(cert.witness);
        CHECK(g.eval(*cert.witness).real() < 0.0);

        const RationalFunction nmp({1.0, -1.0}, {1.0, 1.0});  // RHP zero
        const auto             osp = passivity_check(nmp, PassivityMode::osp);
        REQUIRE(osp.kind == PassivityKind::fails);
        REQUIRE(osp.witness);
        const Complex v = nmp.eval(*osp.witness);
        CHECK(v.real() < 1e-3 * std::norm(v));
    }

    TEST_CASE("double pole on the axis is not positive real") {
        CHECK(passivity_check(RationalFunction({1.0}, {0.0, 0.0, 1.0}), PassivityMode::positive_real).kind ==
              PassivityKind::fails);
    }
}
