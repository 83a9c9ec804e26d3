#include <cmath>
#include <vector>

#include <doctest.h>

#include "diffmath.hpp"
#include "error.hpp"
#include "field.hpp"
#include "testutil.hpp"

using namespace lyapnet;
using lyapnet::test::rel_err;

namespace {

double inverse_residual(const Matrix& m, const Matrix& inv) {
    Matrix prod = m.multiply(inv);
    for (std::size_t i = 0; i < prod.rows(); ++i) prod(i, i) -= 1.0;
    return prod.max_abs();
}

}  // namespace

TEST_CASE("lu_invert: identity and diagonal") {
    const Matrix id = Matrix::identity(10);
    const Matrix inv = lu_invert(id);
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < 10; ++c) {
            CHECK(inv(r, c) == (r == c ? 1.0 : 0.0));
        }
    }

    Matrix diag(2, 2);
    diag(0, 0) = 2.0;
    diag(1, 1) = 4.0;
    const Matrix dinv = lu_invert(diag);
    CHECK(dinv(0, 0) == 0.5);
    CHECK(dinv(1, 1) == 0.25);
    CHECK(dinv(0, 1) == 0.0);
    CHECK(dinv(1, 0) == 0.0);
}

TEST_CASE("lu_invert: built-in transform matrix residual below 1e-12") {
    const VectorField vf = VectorField::builtin("example_10d");
    const Matrix& t = vf.transform();
    const Matrix inv = lu_invert(t);
    CHECK(inverse_residual(t, inv) < 1e-12);
}

TEST_CASE("lu_invert: double inversion returns the original") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.next_below(8);
        Matrix m(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) m(r, c) = rng.next_symmetric();
            m(r, r) += 3.0;  // keep the condition number small
        }
        const Matrix twice = lu_invert(lu_invert(m));
        double diff = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) diff = std::max(diff, std::abs(twice(r, c) - m(r, c)));
        }
        CHECK(diff <= 1e-10);
    }
}

TEST_CASE("lu_invert: singular input is rejected") {
    Matrix zero(3, 3);
    CHECK_THROWS_WITH_AS(lu_invert(zero), doctest::Contains("singular"), Error);

    Matrix rank1(2, 2, {1.0, 2.0, 2.0, 4.0});
    try {
        lu_invert(rank1);
        FAIL("expected singular_matrix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::singular_matrix);
    }

    Matrix rect(2, 3);
    CHECK_THROWS_AS(lu_invert(rect), Error);
}

TEST_CASE("softplus: closed-form values") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(softplus_d1(0.0) == 0.5);
    CHECK(softplus_d2(0.0) == 0.25);

    // no overflow for large arguments
    CHECK(softplus(100.0) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(std::isfinite(softplus(750.0)));
    CHECK(softplus(750.0) == 750.0);
    CHECK(softplus(-750.0) == 0.0);
}

TEST_CASE("softplus: agrees with extended-precision evaluation") {
    for (double r : {-20.0, -5.0, -1.0, 0.3, 1.0, 5.0, 20.0, 29.0, 31.0, 50.0}) {
        const long double exact = std::log1p(std::exp(static_cast<long double>(r)));
        CHECK(rel_err(softplus(r), static_cast<double>(exact)) < 1e-15);
    }
}

TEST_CASE("softplus: range invariants") {
    SplitMix64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const double r = rng.next_in(-30.0, 30.0);
        CHECK(softplus_d2(r) > 0.0);
        CHECK(softplus_d2(r) <= 0.25);
        CHECK(softplus(r) > std::max(r, 0.0));
    }
    // outside the exactly-representable window the bound degrades to >=
    CHECK(softplus(500.0) >= 500.0);
    CHECK(softplus(-500.0) >= 0.0);
}

TEST_CASE("softplus_trio matches the scalar functions bit for bit") {
    SplitMix64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const double r = rng.next_in(-40.0, 40.0);
        const SoftplusTrio t = softplus_trio(r);
        CHECK(t.value == softplus(r));
        CHECK(t.d1 == softplus_d1(r));
        CHECK(t.d2 == softplus_d2(r));
    }
}

TEST_CASE("fd_gradient: quadratic, constant, and softplus probes") {
    const ScalarFn square = [](std::span<const double> x) { return x[0] * x[0]; };
    const std::vector<double> at3{3.0};
    CHECK(std::abs(fd_gradient(square, at3, 1e-4)[0] - 6.0) <= 1e-7);

    const ScalarFn constant = [](std::span<const double>) { return 42.0; };
    const std::vector<double> x{0.3, -0.7, 1.1};
    for (double g : fd_gradient(constant, x, 1e-4)) CHECK(g == 0.0);

    const ScalarFn sp = [](std::span<const double> v) { return softplus(v[0]); };
    const std::vector<double> origin{0.0};
    CHECK(std::abs(fd_gradient(sp, origin, 1e-4)[0] - 0.5) < 1e-8);
}

TEST_CASE("analytic softplus derivatives match finite differences") {
    SplitMix64 rng(17);
    const ScalarFn sp = [](std::span<const double> v) { return softplus(v[0]); };
    const ScalarFn sp1 = [](std::span<const double> v) { return softplus_d1(v[0]); };
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> r{rng.next_in(-2.0, 2.0)};
        CHECK(rel_err(fd_gradient(sp, r, 1e-4)[0], softplus_d1(r[0])) < 1e-5);
        CHECK(rel_err(fd_gradient(sp1, r, 1e-4)[0], softplus_d2(r[0])) < 1e-5);
    }
}
