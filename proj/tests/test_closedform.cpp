#include <doctest.h>

#include <functional>

#include "qpurify/closedform.hpp"
#include "test_util.hpp"

using namespace qpurify;
using testutil::random_cplx;
using testutil::random_density2;
using testutil::random_dissipative;

namespace {

struct Setup {
    DissipativeParams p;
    CMat2 rho0;
    EigensystemV eig;
    CoefficientTensors t;
};

Setup make_setup(std::mt19937_64& rng, double gamma_tau_max = 2.0) {
    while (true) {
        auto p = random_dissipative(rng, gamma_tau_max);
        CMat2 rho0 = random_density2(rng);
        auto map = build_projected_map(p);
        try {
            EigensystemV eig = eig2(map.v);
            return {p, rho0, eig, tensors(eig, p, rho0)};
        } catch (const NearDegenerate&) {
        }
    }
}

}  // namespace

TEST_CASE("tensors: structural zeros and symmetry") {
    std::mt19937_64 rng(211);
    SUBCASE("alpha = 0 kills the G rows") {
        auto p = random_dissipative(rng);
        p.alpha = 0.0;
        auto map = build_projected_map(p);
        auto eig = eig2(map.v);
        auto t = tensors(eig, p, random_density2(rng));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                CHECK(std::abs(t.C[a][b](1, 0)) < 1e-15);
                CHECK(std::abs(t.C[a][b](1, 1)) < 1e-15);
                CHECK(std::abs(t.d[a][b][1]) < 1e-15);
            }
    }
    SUBCASE("gamma = 0 kills everything") {
        auto s = make_setup(rng);
        DissipativeParams p = s.p;
        p.gamma = 0.0;
        auto map = build_projected_map(p);
        auto eig = eig2(map.v);
        auto t = tensors(eig, p, s.rho0);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                CHECK(max_abs(t.C[a][b]) < 1e-15);
                CHECK(max_abs(t.d[a][b]) < 1e-15);
            }
    }
    SUBCASE("(a,b) <-> (b,a) conjugation") {
        for (int i = 0; i < 20; ++i) {
            auto s = make_setup(rng);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    CHECK(std::abs(s.t.Lambda[a][b] - std::conj(s.t.Lambda[b][a])) < 1e-14);
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 2; ++c)
                            CHECK(std::abs(std::conj(s.t.C[a][b](r, c)) - s.t.C[b][a](r, c)) <
                                  1e-13);
                    CHECK(std::abs(std::conj(s.t.d[a][b][0]) - s.t.d[b][a][0]) < 1e-13);
                    CHECK(std::abs(std::conj(s.t.d[a][b][1]) - s.t.d[b][a][1]) < 1e-13);
                }
        }
    }
}

TEST_CASE("series A_k, b_k") {
    std::mt19937_64 rng(223);
    auto s = make_setup(rng);
    SUBCASE("k = 0 sums the raw tensors") {
        auto st = series_Ak_bk(s.t, 0);
        CMat2 asum = CMat2::zero();
        CVec2 bsum{};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                asum += s.t.C[a][b];
                bsum += s.t.d[a][b];
            }
        CHECK(max_abs_diff(st.Ak, asum) < 1e-15);
        CHECK(max_abs(st.bk - bsum) < 1e-15);
    }
    SUBCASE("entries are real up to rounding") {
        for (int k = 0; k <= 6; ++k) {
            auto st = series_Ak_bk(s.t, k);
            for (const auto& x : st.Ak.e) CHECK(std::abs(x.imag()) < 1e-14);
            CHECK(std::abs(st.bk[0].imag()) < 1e-14);
            CHECK(std::abs(st.bk[1].imag()) < 1e-14);
        }
    }
    SUBCASE("k = 3 matches term-by-term summation") {
        auto st = series_Ak_bk(s.t, 3);
        CMat2 asum = CMat2::zero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                cplx l3 = s.t.Lambda[a][b] * s.t.Lambda[a][b] * s.t.Lambda[a][b];
                asum += l3 * s.t.C[a][b];
            }
        CHECK(max_abs_diff(st.Ak, asum) < 1e-15);
    }
}

TEST_CASE("fg_by_recursion matches coefficients along the trajectory") {
    std::mt19937_64 rng(227);
    SUBCASE("gamma = 0 gives all zeros") {
        auto s = make_setup(rng);
        DissipativeParams p = s.p;
        p.gamma = 0.0;
        auto map = build_projected_map(p);
        auto eig = eig2(map.v);
        auto t = tensors(eig, p, s.rho0);
        auto fg = fg_by_recursion(t, 8);
        for (double v : fg.F) CHECK(std::abs(v) < 1e-15);
        for (double v : fg.G) CHECK(std::abs(v) < 1e-15);
    }
    SUBCASE("n = 12 against iterate()") {
        for (int i = 0; i < 25; ++i) {
            auto s = make_setup(rng);
            auto fg = fg_by_recursion(s.t, 12);
            auto traj = iterate(s.rho0, s.p, 12);
            for (int k = 0; k <= 12; ++k) {
                CHECK(std::abs(fg.F[static_cast<std::size_t>(k)] -
                               traj.steps[static_cast<std::size_t>(k)].F) < 1e-9);
                CHECK(std::abs(fg.G[static_cast<std::size_t>(k)] -
                               traj.steps[static_cast<std::size_t>(k)].G) < 1e-9);
            }
        }
    }
}

TEST_CASE("nested sums: brute force vs closed form") {
    std::mt19937_64 rng(229);
    SUBCASE("single point: plain power") {
        std::vector<cplx> xs{cplx(0.7, 0.2)};
        CHECK(std::abs(nested_sum_brute(xs, 5) - std::pow(xs[0], 5)) < 1e-14);
        CHECK(std::abs(nested_sum_closed(xs, 5) - std::pow(xs[0], 5)) < 1e-14);
    }
    SUBCASE("hand case (2,3), k=2 gives 5") {
        std::vector<cplx> xs{cplx(2), cplx(3)};
        CHECK(std::abs(nested_sum_brute(xs, 2) - cplx(5)) < 1e-12);
        CHECK(std::abs(nested_sum_closed(xs, 2) - cplx(5)) < 1e-12);
    }
    SUBCASE("random draws agree") {
        for (int trial = 0; trial < 200; ++trial) {
            int l = static_cast<int>(testutil::uniform(rng, 0, 6.999));
            int k = l + static_cast<int>(testutil::uniform(rng, 0, 20.999 - l));
            std::vector<cplx> xs(static_cast<std::size_t>(l) + 1);
            bool distinct = false;
            while (!distinct) {
                for (auto& x : xs) x = 0.7 * random_cplx(rng);
                distinct = true;
                for (std::size_t i = 0; i < xs.size() && distinct; ++i)
                    for (std::size_t j = i + 1; j < xs.size() && distinct; ++j)
                        if (std::abs(xs[i] - xs[j]) < 1e-3) distinct = false;
            }
            cplx b = nested_sum_brute(xs, k);
            cplx c = nested_sum_closed(xs, k);
            CHECK(std::abs(b - c) <= 1e-8 * std::max(1.0, std::abs(b)));
        }
    }
    SUBCASE("repeated points raise ConfluentPoints") {
        std::vector<cplx> xs{cplx(0.5), cplx(0.5), cplx(0.2)};
        CHECK_THROWS_AS(nested_sum_closed(xs, 6), ConfluentPoints);
    }
    SUBCASE("limits enforced") {
        std::vector<cplx> xs(8, cplx(0.1));
        CHECK_THROWS_AS(nested_sum_brute(xs, 10), std::invalid_argument);
        std::vector<cplx> xs2{cplx(0.1)};
        CHECK_THROWS_AS(nested_sum_brute(xs2, 26), std::invalid_argument);
    }
}

TEST_CASE("fg_closed") {
    std::mt19937_64 rng(233);
    SUBCASE("k = 0 equals b_0") {
        auto s = make_setup(rng);
        auto fg = fg_closed(s.t, 0);
        auto st = series_Ak_bk(s.t, 0);
        CHECK(std::abs(fg.F - st.bk[0].real()) < 1e-14);
        CHECK(std::abs(fg.G - st.bk[1].real()) < 1e-14);
    }
    SUBCASE("matches the recursion for k <= 8") {
        for (int i = 0; i < 15; ++i) {
            auto s = make_setup(rng);
            auto series = fg_by_recursion(s.t, 8);
            for (int k = 0; k <= 8; ++k) {
                auto fg = fg_closed(s.t, k);
                CHECK(std::abs(fg.F - series.F[static_cast<std::size_t>(k)]) <
                      1e-8 * std::max(1.0, std::abs(series.F[static_cast<std::size_t>(k)])));
                CHECK(std::abs(fg.G - series.G[static_cast<std::size_t>(k)]) <
                      1e-8 * std::max(1.0, std::abs(series.G[static_cast<std::size_t>(k)])));
            }
        }
    }
    SUBCASE("cap enforced") {
        auto s = make_setup(rng);
        CHECK_THROWS_AS(fg_closed(s.t, kFgClosedMaxK + 1), std::invalid_argument);
    }
}

TEST_CASE("rhoN_closed") {
    std::mt19937_64 rng(239);
    SUBCASE("n = 0") {
        auto s = make_setup(rng);
        CHECK(max_abs_diff(rhoN_closed(s.rho0, s.p, 0), s.rho0) < 1e-15);
    }
    SUBCASE("alpha = 0 keeps the down state fixed") {
        auto p = random_dissipative(rng);
        p.alpha = 0.0;
        CMat2 r = rhoN_closed(rho_down(), p, 6);
        CHECK(max_abs_diff(r, rho_down()) < 1e-10);
    }
    SUBCASE("matches iteration for n <= 10") {
        for (int i = 0; i < 25; ++i) {
            auto s = make_setup(rng);
            int n = 1 + static_cast<int>(testutil::uniform(rng, 0, 9.999));
            CMat2 closed = rhoN_closed(s.rho0, s.p, n);
            auto traj = iterate(s.rho0, s.p, n);
            CHECK(max_abs_diff(closed, traj.steps.back().rho) < 1e-8);
            // assembled state stays Hermitian
            CHECK(max_abs_diff(closed, adjoint(closed)) < 1e-10);
        }
    }
    SUBCASE("cap enforced") {
        auto s = make_setup(rng);
        CHECK_THROWS_AS(rhoN_closed(s.rho0, s.p, kFgClosedMaxK + 1), std::invalid_argument);
    }
}

TEST_CASE("F, G series nonnegative for density initial states") {
    std::mt19937_64 rng(241);
    for (int i = 0; i < 20; ++i) {
        auto s = make_setup(rng, 3.0);
        auto fg = fg_by_recursion(s.t, 15);
        for (double v : fg.F) CHECK(v >= -1e-12);
        for (double v : fg.G) CHECK(v >= -1e-12);
    }
}

TEST_CASE("composition_count") {
    CHECK(composition_count(5, 1) == 10);
    CHECK(composition_count(5, 4) == 1);
    CHECK(composition_count(8, 3) == 70);
    CHECK_THROWS_AS(composition_count(5, 5), std::invalid_argument);
    CHECK_THROWS_AS(composition_count(5, -1), std::invalid_argument);

    // enumeration oracle: compositions of n-1-l into l+2 nonnegative parts
    auto enumerate = [](int n, int l) {
        int target = n - 1 - l;
        int boxes = l + 2;
        long long count = 0;
        std::vector<int> stack;
        std::function<void(int, int)> rec = [&](int depth, int rem) {
            if (depth == boxes - 1) {
                ++count;
                return;
            }
            for (int v = 0; v <= rem; ++v) rec(depth + 1, rem - v);
        };
        rec(0, target);
        return count;
    };
    for (int n = 2; n <= 9; ++n)
        for (int l = 0; l < n; ++l)
            CHECK(composition_count(n, l) == enumerate(n, l));
}
