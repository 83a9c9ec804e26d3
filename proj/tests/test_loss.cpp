#include <cmath>
#include <vector>

#include <doctest.h>

#include "diffmath.hpp"
#include "error.hpp"
#include "field.hpp"
#include "loss.hpp"
#include "net.hpp"
#include "testutil.hpp"

using namespace lyapnet;
using lyapnet::test::max_rel_err;
using lyapnet::test::rel_err;

namespace {

LossSpec make_spec(LossKind kind, double nu = 1.0, double c1 = 0.1, double c2 = 10.0) {
    LossSpec spec;
    spec.kind = kind;
    spec.nu = nu;
    spec.bounds.c1 = c1;
    spec.bounds.c2 = c2;
    return spec;
}

// Mean/max recomputed point by point through the public scalar surface.
BatchStats naive_batch(const LossSpec& spec, const LyapunovNet& net, const VectorField& vf,
                       PointsView points) {
    BatchStats stats;
    for (std::size_t i = 0; i < points.count; ++i) {
        const auto x = points.point(i);
        const std::vector<double> fx = vf.eval(x);
        const double w = net.forward(x);
        const std::vector<double> p = net.grad_x(x);
        const double l = loss_pointwise(spec, w, p, x, fx);
        stats.mean += l;
        stats.max = std::max(stats.max, l);
    }
    stats.mean /= static_cast<double>(points.count);
    return stats;
}

}  // namespace

TEST_CASE("loss_pointwise: worked example on the 2-d system") {
    // V(x) = x1^2 + x2^2 + 13 x2^4 at x = (1, 0): value 1, gradient (2, 0),
    // f(x) = (-1, 0), so p.fx + |x|^2 = -1 and the bounds hold.
    const std::vector<double> x{1.0, 0.0};
    const std::vector<double> fx{-1.0, 0.0};
    const std::vector<double> p{2.0, 0.0};
    CHECK(loss_pointwise(make_spec(LossKind::pdi), 1.0, p, x, fx) == 0.0);
    CHECK(loss_pointwise(make_spec(LossKind::pde), 1.0, p, x, fx) == 1.0);

    const std::vector<double> zero{0.0, 0.0};
    CHECK(loss_pointwise(make_spec(LossKind::pde), 0.0, zero, zero, zero) == 0.0);
    CHECK(loss_pointwise(make_spec(LossKind::pdi), 0.0, zero, zero, zero) == 0.0);
}

TEST_CASE("loss_pointwise: randomized semantics") {
    SplitMix64 rng(2024);
    const LossSpec pde = make_spec(LossKind::pde);
    const LossSpec pdi = make_spec(LossKind::pdi);
    for (int i = 0; i < 10000; ++i) {
        const std::vector<double> x = test::random_point(rng, 2, -2.0, 2.0);
        const std::vector<double> fx = test::random_point(rng, 2, -2.0, 2.0);
        const std::vector<double> p = test::random_point(rng, 2, -2.0, 2.0);
        const double w = rng.next_in(-2.0, 2.0);

        const double l_pde = loss_pointwise(pde, w, p, x, fx);
        const double l_pdi = loss_pointwise(pdi, w, p, x, fx);
        CHECK(l_pde >= 0.0);
        CHECK(l_pdi >= 0.0);
        CHECK(l_pdi <= l_pde);

        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        const double residual = p[0] * fx[0] + p[1] * fx[1] + r * r;
        const bool satisfied = residual <= 0.0 && pdi.bounds.alpha1(r) <= w &&
                               w <= pdi.bounds.alpha2(r);
        CHECK((l_pdi == 0.0) == satisfied);
    }
}

TEST_CASE("loss_pointwise: nu = 0 leaves only the residual term") {
    SplitMix64 rng(31);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x = test::random_point(rng, 3, -2.0, 2.0);
        const std::vector<double> fx = test::random_point(rng, 3, -2.0, 2.0);
        const std::vector<double> p = test::random_point(rng, 3, -2.0, 2.0);
        const double w = rng.next_in(-2.0, 2.0);
        double residual = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        residual += p[0] * fx[0];
        residual += p[1] * fx[1];
        residual += p[2] * fx[2];
        CHECK(loss_pointwise(make_spec(LossKind::pde, 0.0), w, p, x, fx) == residual * residual);
        const double pos = std::max(residual, 0.0);
        CHECK(loss_pointwise(make_spec(LossKind::pdi, 0.0), w, p, x, fx) == pos * pos);
    }
}

TEST_CASE("batch_loss: arithmetic of mean and max") {
    // zero net on x' = -x with nu = 0 and the PDE form: pointwise loss |x|^4
    const VectorField vf = VectorField::from_source("-x1", 1);
    const LyapunovNet net(NetShape{1, 1, 1, 2});
    LossSpec spec = make_spec(LossKind::pde, 0.0);

    const std::vector<double> single{0.0};
    const BatchStats s1 = batch_loss(spec, net, vf, PointsView(single, 1));
    CHECK(s1.mean == 0.0);
    CHECK(s1.max == 0.0);

    const std::vector<double> two{0.0, std::sqrt(2.0)};
    const BatchStats s2 = batch_loss(spec, net, vf, PointsView(two, 1));
    CHECK(s2.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s2.max == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("batch_loss agrees with naive per-point recomputation") {
    const VectorField vf = VectorField::builtin("example_2d");
    const LyapunovNet net = LyapunovNet::init(NetShape{2, 2, 1, 16}, 8);
    SplitMix64 rng(6);
    std::vector<double> flat;
    for (int i = 0; i < 64; ++i) {
        flat.push_back(rng.next_symmetric());
        flat.push_back(rng.next_symmetric());
    }
    const PointsView points(flat, 2);
    for (const LossKind kind : {LossKind::pde, LossKind::pdi}) {
        const LossSpec spec = make_spec(kind);
        const BatchStats fused = batch_loss(spec, net, vf, points);
        const BatchStats naive = naive_batch(spec, net, vf, points);
        CHECK(rel_err(fused.mean, naive.mean) < 1e-12);
        CHECK(rel_err(fused.max, naive.max) < 1e-12);
    }
}

TEST_CASE("loss_param_gradient: zero-parameter network") {
    const VectorField vf = VectorField::builtin("example_2d");
    const NetShape shape{2, 2, 1, 4};
    const LyapunovNet net(shape);
    const std::vector<double> flat{0.5, 0.25, -0.75, 0.5, 0.3, -0.9, 0.8, 0.1};
    const PointsView points(flat, 2);
    const LossSpec spec = make_spec(LossKind::pdi);

    const DualBundle out = loss_param_gradient(spec, net, vf, points);

    // W = 0 < alpha1(|x|) everywhere here, so d(mean loss)/dc is the mean of
    // 2 nu (0 - alpha1(|x|)).
    double expected_dc = 0.0;
    for (std::size_t i = 0; i < points.count; ++i) {
        const auto x = points.point(i);
        const double r_sq = x[0] * x[0] + x[1] * x[1];
        expected_dc += 2.0 * spec.nu * (0.0 - spec.bounds.c1 * r_sq);
    }
    expected_dc /= static_cast<double>(points.count);
    CHECK(out.grad[net.c_offset()] == doctest::Approx(expected_dc).epsilon(1e-14));
}

TEST_CASE("loss_param_gradient: zero loss means zero gradient") {
    const VectorField vf = VectorField::builtin("example_2d");
    const LyapunovNet net(NetShape{2, 2, 1, 8});  // W = 0, DW = 0
    const std::vector<double> origin{0.0, 0.0};   // residual and penalties vanish at x = 0
    const DualBundle out =
        loss_param_gradient(make_spec(LossKind::pdi), net, vf, PointsView(origin, 2));
    CHECK(out.value == 0.0);
    for (double g : out.grad) CHECK(g == 0.0);
}

TEST_CASE("loss_param_gradient matches finite differences over theta") {
    SplitMix64 rng(404);
    const VectorField vf2 = VectorField::builtin("example_2d");
    for (const LossKind kind : {LossKind::pdi, LossKind::pde}) {
        const LossSpec spec = make_spec(kind);
        const NetShape shape{2, 2, 1, 4};
        LyapunovNet net = LyapunovNet::init(shape, rng.next_u64());

        std::vector<double> flat;
        for (int i = 0; i < 16; ++i) flat.push_back(rng.next_symmetric());
        const PointsView points(flat, 2);

        const DualBundle analytic = loss_param_gradient(spec, net, vf2, points);
        CHECK(analytic.value == batch_loss(spec, net, vf2, points).mean);

        std::vector<double> fd(net.param_count());
        const double h = 1e-4;
        for (std::size_t i = 0; i < net.param_count(); ++i) {
            const double orig = net.params()[i];
            net.params()[i] = orig + h;
            const double hi = batch_loss(spec, net, vf2, points).mean;
            net.params()[i] = orig - h;
            const double lo = batch_loss(spec, net, vf2, points).mean;
            net.params()[i] = orig;
            fd[i] = (hi - lo) / (2.0 * h);
        }
        CHECK(max_rel_err(analytic.grad, fd) < 1e-5);
    }
}

TEST_CASE("loss spec validation") {
    LossSpec bad = make_spec(LossKind::pdi);
    bad.bounds.c1 = 10.0;
    bad.bounds.c2 = 0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = make_spec(LossKind::pdi);
    bad.nu = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = make_spec(LossKind::pdi);
    bad.bounds.power = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);

    const VectorField vf = VectorField::from_source("-x1", 1);
    const LyapunovNet net(NetShape{1, 1, 1, 2});
    const std::vector<double> empty;
    CHECK_THROWS_AS(batch_loss(make_spec(LossKind::pdi), net, vf, PointsView(empty, 1)), Error);
}
