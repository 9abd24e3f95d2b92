#include <cmath>

#include "doctest.h"
#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/gradcheck.hpp"

using namespace hcgnn;
using namespace hcgnn::diff;

TEST_CASE("finite_diff_grad on closed forms") {
    ParamStore ps;
    auto x = ps.add("x", Tensor::vector({3.0}));
    auto sq = finite_diff_grad([&](const ParamStore& p) { return p[x].tensor[0] * p[x].tensor[0]; },
                               ps, 1e-5);
    CHECK(std::fabs(sq[x][0] - 6.0) <= 1e-9);

    auto flat = finite_diff_grad([](const ParamStore&) { return 4.2; }, ps);
    CHECK(flat[x][0] == 0.0);

    ps[x].tensor[0] = 0.5;
    auto ab = finite_diff_grad([&](const ParamStore& p) { return std::fabs(p[x].tensor[0]); }, ps);
    CHECK(std::fabs(ab[x][0] - 1.0) <= 1e-10);
    CHECK(ps[x].tensor[0] == 0.5);
}

TEST_CASE("finite_diff_grad faults on bad eps and non-finite objectives") {
    ParamStore ps;
    ps.add("x", Tensor::vector({1.0}));
    CHECK_THROWS_AS(finite_diff_grad([](const ParamStore&) { return 0.0; }, ps, 0.0), Fault);
    CHECK_THROWS_AS(finite_diff_grad([](const ParamStore&) { return NAN; }, ps), NumericFault);
}

TEST_CASE("compare_gradients reports the worst coordinate") {
    ParamStore ps;
    auto a = ps.add("a", Tensor::vector({0.0, 0.0}));
    GradMap g1{Tensor::vector({1.0, 2.0})};
    GradMap g2{Tensor::vector({1.0, 2.2})};
    auto r = compare_gradients(g1, g2, ps);
    CHECK(r.worst_param == "a");
    CHECK(r.worst_index == 1);
    CHECK(r.max_rel_error == doctest::Approx(0.2 / 2.2));
    (void)a;
}
