#include <curved_nbody/criterion.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "test_support.hpp"

using namespace curved_nbody;
using std::numbers::pi;

namespace {

Angle rad(double r) { return Angle::radians(r); }
Angle turn(std::int64_t p, std::int64_t q) { return Angle::exact(Turn(p, q)); }

}  // namespace

TEST(Turns, ParseAndFormat) {
    EXPECT_EQ(*parse_turn("3/12"), Turn(1, 4));
    EXPECT_EQ(*parse_turn("0"), Turn(0));
    EXPECT_FALSE(parse_turn("1/0"));
    EXPECT_FALSE(parse_turn("a/3"));
    EXPECT_FALSE(parse_turn(""));
    EXPECT_EQ(format_turn(Turn(2, 8)), "1/4");
    EXPECT_EQ(format_turn(Turn(0)), "0");
}

TEST(Turns, ExactSpecialValues) {
    EXPECT_EQ(sin_turn(Turn(1, 2)), 0.0);
    EXPECT_EQ(cos_turn(Turn(1, 4)), 0.0);
    EXPECT_EQ(sin_turn(Turn(1, 12)), 0.5);
    EXPECT_EQ(cos_turn(Turn(1, 3)), -0.5);
    EXPECT_EQ(sin_turn(Turn(3, 4)), -1.0);
    EXPECT_EQ(sin_turn(Turn(-1, 4)), -1.0);
}

TEST(Turns, OddSymmetryIsExact) {
    for (std::int64_t q = 2; q <= 60; ++q)
        for (std::int64_t p = 1; p < q; ++p) {
            EXPECT_EQ(sin_turn(Turn(p, q)), -sin_turn(Turn(q - p, q)));
            // the reference rounds its argument 2 pi p / q, worth up to a few 1e-16
            EXPECT_NEAR(sin_turn(Turn(p, q)), std::sin(2 * pi * p / q), 4e-15);
        }
}

TEST(PolygonConfig, Invariants) {
    EXPECT_THROW(PolygonConfig::from_turns({Turn(0), Turn(1, 2)}), DomainError);
    EXPECT_THROW(PolygonConfig::from_turns({Turn(0), Turn(1, 2), Turn(1, 4)}), DomainError);
    EXPECT_THROW(PolygonConfig::from_turns({Turn(0), Turn(1, 2), Turn(1, 2)}), DomainError);
    EXPECT_THROW(PolygonConfig::from_turns({Turn(0), Turn(1, 2), Turn(1)}), DomainError);
    EXPECT_THROW(PolygonConfig({turn(0, 1), rad(1.0), rad(2.0)}), DomainError);
    EXPECT_THROW(PolygonConfig({rad(0.0), rad(1.0), rad(7.0)}), DomainError);
    EXPECT_NO_THROW(PolygonConfig({rad(0.0), rad(1.0), rad(2.0)}));
}

TEST(Chords, Examples) {
    EXPECT_NEAR(chord_c(rad(pi / 2), rad(0)), 1.0, 1e-15);
    EXPECT_EQ(chord_c(turn(1, 4), turn(0, 1)), 1.0);
    EXPECT_EQ(chord_c(turn(1, 2), turn(0, 1)), 2.0);
    EXPECT_EQ(chord_c(turn(1, 3), turn(0, 1)), 1.5);
    EXPECT_NEAR(chord_c(rad(pi), rad(0)), 2.0, 1e-15);
    EXPECT_NEAR(chord_c(rad(2 * pi / 3), rad(0)), 1.5, 1e-15);

    EXPECT_EQ(chord_s(turn(1, 4), turn(0, 1)), 1.0);
    EXPECT_EQ(chord_s(turn(1, 2), turn(0, 1)), 0.0);
    EXPECT_NEAR(chord_s(rad(pi / 2), rad(0)), 1.0, 1e-16);
    EXPECT_EQ(chord_s(rad(0.3), rad(1.1)), -chord_s(rad(1.1), rad(0.3)));
    EXPECT_EQ(chord_s(turn(1, 7), turn(3, 5)), -chord_s(turn(3, 5), turn(1, 7)));

    EXPECT_THROW(chord_c(turn(1, 3), turn(1, 3)), DomainError);
    EXPECT_THROW(chord_s(rad(1.0), rad(1.0)), DomainError);
}

TEST(Chords, EqualCosineClassesGiveIdenticalDoubles) {
    // c depends only on the class of the difference mod +-1 turn
    EXPECT_EQ(chord_c(turn(5, 8), turn(1, 8)), chord_c(turn(0, 1), turn(1, 2)));
    EXPECT_EQ(chord_c(turn(1, 9), turn(0, 1)), chord_c(turn(0, 1), turn(1, 9)));
    EXPECT_EQ(chord_c(turn(7, 9), turn(0, 1)), chord_c(turn(2, 9), turn(0, 1)));
}

TEST(Kernels, MuExamples) {
    EXPECT_DOUBLE_EQ(mu(2.0, Rho{0.0}), 0.25);
    EXPECT_DOUBLE_EQ(mu(1.0, Rho{1.0}), 1.0);
    // mpmath, 40 digits
    EXPECT_NEAR(mu(1.5, Rho{0.5}), 0.58423739467217718769, 1e-15);
    EXPECT_THROW(mu(0.0, Rho{0.5}), DomainError);
    EXPECT_THROW(mu(2.0, Rho{1.0}), DomainError);
    EXPECT_THROW(mu(2.5, Rho{0.0}), DomainError);
}

TEST(Kernels, NuExamples) {
    EXPECT_EQ(nu(2.0, 0.0, Rho{0.3}), 0.0);
    EXPECT_DOUBLE_EQ(nu(1.0, 1.0, Rho{1.0}), 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(1e-3, 2 * pi - 1e-3), r(-3.0, 0.99);
    for (int trial = 0; trial < 500; ++trial) {
        const double delta = d(rng);
        const double c = 1 - std::cos(delta);
        const double s = std::sin(delta);
        const Rho rho{r(rng)};
        const double lhs = nu(c, s, rho);
        const double rhs = s / c * mu(c, rho);
        EXPECT_NEAR(lhs, rhs, 1e-14 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(DeltaGamma, RegularSquareAtZero) {
    const auto sq = PolygonConfig::regular(4);
    const auto dg = delta_gamma(sq, MassVector::equal(4), Rho{0.0});
    const double expected = 2 * mu(1.0, Rho{0.0}) + mu(2.0, Rho{0.0});  // 0.957106781186547524...
    EXPECT_NEAR(expected, 0.95710678118654752440, 1e-15);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(dg.deltas[i], expected, 1e-15);
        EXPECT_NEAR(dg.gammas[i], 0.0, 1e-15);
    }
}

TEST(DeltaGamma, RightTriangleFailsCriterion) {
    const PolygonConfig tri({rad(0), rad(pi / 2), rad(pi)});
    const auto dg = delta_gamma(tri, MassVector::equal(3), Rho{0.0});
    EXPECT_NEAR(dg.deltas[0], 0.60355339059327376220, 1e-15);
    EXPECT_NEAR(dg.deltas[1], 0.70710678118654752440, 1e-15);
    EXPECT_NEAR(dg.gammas[0], 0.35355339059327376220, 1e-15);
    EXPECT_FALSE(criterion_check(tri, MassVector::equal(3), Rho{0.0}, 1e-10).satisfied);
}

TEST(DeltaGamma, LinearInMasses) {
    std::mt19937_64 rng(5);
    const auto p = test_support::random_irregular_polygon(rng, 3);
    const MassVector m{0.7, 1.3, 2.1};
    const MassVector m3{2.1, 3.9, 6.3};
    const auto a = delta_gamma(p, m, Rho{0.4});
    const auto b = delta_gamma(p, m3, Rho{0.4});
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(b.deltas[i], 3 * a.deltas[i], 1e-13 * b.deltas[i]);
        EXPECT_NEAR(b.gammas[i], 3 * a.gammas[i], 1e-13 * (1 + std::abs(b.gammas[i])));
    }
}

TEST(DeltaGamma, MassCountMismatch) {
    EXPECT_THROW(delta_gamma(PolygonConfig::regular(3), MassVector::equal(4), Rho{0.2}), DomainError);
}

TEST(CriterionCheck, ToleranceSemantics) {
    const PolygonConfig tri({rad(0), rad(pi / 2), rad(pi)});
    EXPECT_TRUE(criterion_check(tri, MassVector::equal(3), Rho{0.0}, std::numeric_limits<double>::infinity()).satisfied);
    EXPECT_TRUE(criterion_check(PolygonConfig::regular(5), MassVector::equal(5, 2.0), Rho{0.7}, 1e-12).satisfied);
}

TEST(CriterionCheck, RegularPolygonsOnGrid) {
    for (double kappa : {1.0, -1.0})
        for (std::size_t n = 3; n <= 8; ++n)
            for (double rho : rho_grid(Curvature(kappa), 20))
                EXPECT_TRUE(criterion_check(PolygonConfig::regular(n), MassVector::equal(n), Rho{rho}, 1e-12).satisfied)
                    << "n=" << n << " rho=" << rho;
}

TEST(CriterionProperties, SymmetryAntisymmetryPositivity) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> r(-2.0, 0.99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = test_support::random_exact_polygon(rng, 3 + trial % 5);
        const Rho rho{r(rng)};
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (i == j) continue;
                const double cji = chord_c(p[j], p[i]);
                const double cij = chord_c(p[i], p[j]);
                EXPECT_NEAR(mu(cji, rho), mu(cij, rho), 1e-15 * mu(cji, rho));
                const double nji = nu(cji, chord_s(p[j], p[i]), rho);
                const double nij = nu(cij, chord_s(p[i], p[j]), rho);
                EXPECT_NEAR(nji, -nij, 1e-15 * std::max(1.0, std::abs(nji)));
            }
        const auto dg = delta_gamma(p, MassVector::equal(p.size()), rho);
        for (double d : dg.deltas) EXPECT_GT(d, 0.0);
    }
}

TEST(CriterionProperties, RotationInvariance) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> shift(0.0, 2 * pi), ang(0.0, 2 * pi);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(4);
        for (auto& x : a) x = ang(rng);
        std::sort(a.begin(), a.end());
        if (a[1] - a[0] < 0.05 || a[2] - a[1] < 0.05 || a[3] - a[2] < 0.05 || a[0] + 2 * pi - a[3] < 0.05) continue;
        const double s = shift(rng);
        std::vector<double> b(4);
        for (std::size_t i = 0; i < 4; ++i) b[i] = wrap_radians(a[i] + s);
        // relabel so that b stays increasing, carrying the masses along
        std::vector<std::size_t> order{0, 1, 2, 3};
        std::sort(order.begin(), order.end(), [&](auto x, auto y) { return b[x] < b[y]; });
        const std::vector<double> m{1.0, 2.0, 0.5, 1.5};
        std::vector<double> bs, ms;
        for (auto k : order) {
            bs.push_back(b[k]);
            ms.push_back(m[k]);
        }
        const auto d0 = delta_gamma(PolygonConfig::from_radians(a), MassVector(m), Rho{0.3});
        const auto d1 = delta_gamma(PolygonConfig::from_radians(bs), MassVector(ms), Rho{0.3});
        for (std::size_t r = 0; r < 4; ++r) {
            EXPECT_NEAR(d0.deltas[order[r]], d1.deltas[r], 1e-13 * (1 + d0.deltas[order[r]]));
            EXPECT_NEAR(d0.gammas[order[r]], d1.gammas[r], 1e-13 * (1 + std::abs(d0.gammas[order[r]])));
        }
    }
}

TEST(Canonicalize, Examples) {
    const auto c = canonicalize(PolygonConfig({rad(0), rad(pi), rad(3 * pi / 2)}));
    EXPECT_NEAR(c[0].radians(), 0.0, 1e-15);
    EXPECT_NEAR(c[1].radians(), pi / 2, 1e-15);
    EXPECT_NEAR(c[2].radians(), pi, 1e-15);

    const auto e = canonicalize_with_shift(PolygonConfig::from_turns({Turn(0), Turn(1, 2), Turn(3, 4)}));
    EXPECT_EQ(e.shift, 1u);
    EXPECT_EQ(e.config[1].turn(), Turn(1, 4));
    EXPECT_EQ(e.config[2].turn(), Turn(1, 2));

    const auto already = PolygonConfig::from_turns({Turn(0), Turn(1, 8), Turn(1, 4), Turn(1, 2)});
    EXPECT_TRUE(is_canonical(already));

    const auto reg = canonicalize(PolygonConfig::from_turns({Turn(1, 10), Turn(13, 30), Turn(23, 30)}));
    EXPECT_EQ(reg[1].turn(), Turn(1, 3));
}

TEST(Canonicalize, TieBreakIsLexicographic) {
    // gaps (g, 4g, g, 2g): rotations at vertices 1 and 3 both start with g
    auto c = canonicalize(PolygonConfig::from_turns({Turn(0), Turn(1, 8), Turn(5, 8), Turn(3, 4)}));
    EXPECT_EQ(c[1].turn(), Turn(1, 8));
    EXPECT_EQ(c[2].turn(), Turn(3, 8));
    EXPECT_EQ(c[3].turn(), Turn(1, 2));
    // gaps (5g, g, g, g): three candidates, (0, g, 2g, 3g) is smallest
    const auto e = canonicalize_with_shift(PolygonConfig::from_turns({Turn(0), Turn(5, 8), Turn(3, 4), Turn(7, 8)}));
    EXPECT_EQ(e.shift, 1u);
    EXPECT_EQ(e.config[1].turn(), Turn(1, 8));
    EXPECT_EQ(e.config[2].turn(), Turn(1, 4));
    EXPECT_EQ(e.config[3].turn(), Turn(3, 8));
}

TEST(Canonicalize, PreservesChordMultiset) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = test_support::random_exact_polygon(rng, 3 + trial % 6);
        const auto c = canonicalize(p);
        std::vector<Turn> a, b;
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j) {
                a.push_back(cosine_class(p[j].turn() - p[i].turn()));
                b.push_back(cosine_class(c[j].turn() - c[i].turn()));
            }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
        EXPECT_TRUE(is_canonical(c));
        // first gap is minimal
        for (std::size_t k = 0; k < c.size(); ++k) EXPECT_LE(c.gap_turn(0), c.gap_turn(k));
    }
}

TEST(Canonicalize, FloatModePreservesChordsWithinTolerance) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(5);
        for (auto& x : a) x = ang(rng);
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end()) continue;
        const auto p = PolygonConfig::from_radians(a);
        const auto c = canonicalize(p);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = i + 1; j < 5; ++j) {
                x.push_back(chord_c(p[j], p[i]));
                y.push_back(chord_c(c[j], c[i]));
            }
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-13);
    }
}

TEST(IsRegular, Examples) {
    EXPECT_TRUE(is_regular(PolygonConfig({rad(0), rad(2 * pi / 3), rad(4 * pi / 3)})));
    EXPECT_FALSE(is_regular(PolygonConfig({rad(0), rad(pi / 2), rad(pi)})));
    EXPECT_TRUE(is_regular(PolygonConfig::from_turns({Turn(0), Turn(1, 4), Turn(1, 2), Turn(3, 4)})));
    EXPECT_FALSE(is_regular(PolygonConfig::from_turns({Turn(0), Turn(1, 4), Turn(1, 2), Turn(4, 5)})));
}

TEST(RhoDomain, CheckedConstruction) {
    EXPECT_NO_THROW(Rho::checked(0.5, Curvature(1)));
    EXPECT_THROW(Rho::checked(1.0, Curvature(1)), DomainError);
    EXPECT_THROW(Rho::checked(0.0, Curvature(1)), DomainError);
    EXPECT_THROW(Rho::checked(0.5, Curvature(-1)), DomainError);
    EXPECT_NO_THROW(Rho::checked(-7.0, Curvature(-2)));
    EXPECT_EQ(rho_grid(Curvature(1), 1), std::vector<double>{0.5});
    EXPECT_EQ(rho_grid(Curvature(-1), 1), std::vector<double>{-1.0});
}
