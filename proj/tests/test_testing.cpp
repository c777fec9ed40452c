#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "oracle.hpp"
#include "sbump/testing.hpp"

using namespace sbump;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

struct Case {
  WeightPair pair;
  SparseFamily fam;
};

Case tower_example(double p = 2.0) {
  const TreeGeometry g(2);
  return {WeightPair(g, {1, 1, 1, 1}, {4, 1, 1, 1}, p), SparseFamily(g, {{0, 0}, {1, 0}, {2, 0}}, 0.5)};
}

std::vector<oracle::Cube> ocubes(const SparseFamily& f) {
  std::vector<oracle::Cube> out;
  for (const CubeId& q : f.cubes()) out.push_back({q.level, q.index});
  return out;
}

Case random_case(gen::Source& src, int dmin, int dmax, double p) {
  const int d = src.integer(dmin, dmax);
  const TreeGeometry g(d);
  const auto w = src.leaves(d, 1.5), s = src.leaves(d, 1.5);
  const double eta = src.uniform(0.2, 0.8);
  SparseFamily f = generate_sparse(g, {src.strategy()}, eta, static_cast<std::uint64_t>(src.integer(0, 1 << 30)), s);
  return {WeightPair(g, w, s, p), std::move(f)};
}

/// Largest singular value of f -> A_S(f sigma) from L^2(sigma) to L^2(w).
double dense_norm(const WeightPair& pair, const SparseFamily& fam) {
  const int d = pair.geometry().depth;
  std::vector<double> w(pair.w().begin(), pair.w().end()), s(pair.sigma().begin(), pair.sigma().end());
  const auto m = oracle::sparse_matrix(d, ocubes(fam), s);
  const std::size_t n = m.size();
  const double h = std::ldexp(1.0, -d);
  Eigen::MatrixXd a(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      a(x, y) = std::sqrt(w[x] * h) * static_cast<double>(m[x][y]) / std::sqrt(s[y] * h);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.transpose() * a);
  return std::sqrt(eig.eigenvalues().maxCoeff());
}

}  // namespace

TEST(LocalSum, TowerExample) {
  const Case c = tower_example();
  EXPECT_EQ(local_sum(c.fam, c.pair.sigma(), {0, 0}).values, (std::vector<double>{8.25, 4.25, 1.75, 1.75}));
  EXPECT_EQ(local_sum(c.fam, c.pair.sigma(), {1, 0}).values, (std::vector<double>{6.5, 2.5, 0, 0}));
  const SparseFamily single(TreeGeometry(2), {{1, 1}});
  EXPECT_EQ(local_sum(single, c.pair.sigma(), {1, 1}).values, (std::vector<double>{0, 0, 1, 1}));
}

TEST(LocalSum, AgreesWithOracle) {
  gen::Source src(101);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = random_case(src, 0, 6, 2.0);
    const int d = c.pair.geometry().depth;
    const std::vector<double> s(c.pair.sigma().begin(), c.pair.sigma().end());
    for (const CubeId& r : c.fam.cubes()) {
      const auto ref = oracle::local_sum(d, ocubes(c.fam), s, {r.level, r.index});
      const auto got = local_sum(c.fam, s, r).values;
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got[i], static_cast<double>(ref[i]), 1e-12 * static_cast<double>(ref[i]) + 1e-300);
      }
    }
  }
}

TEST(LpNorm, Examples) {
  const Case c = tower_example();
  const TreeGeometry g(2);
  EXPECT_DOUBLE_EQ(lp_norm(LeafFunction(g, {1, 1, 1, 1}), c.pair.w(), 2.0), 1.0);
  const LeafFunction f = local_sum(c.fam, c.pair.sigma(), {0, 0});
  EXPECT_NEAR(lp_norm(f, c.pair.w(), 2.0), std::sqrt(23.0625), 1e-15);
  LeafFunction g3(g, {-3.0, 1.5, 0.0, 2.0});
  LeafFunction g3c(g, {6.0, -3.0, 0.0, -4.0});
  EXPECT_NEAR(lp_norm(g3c, c.pair.w(), 3.0), 2.0 * lp_norm(g3, c.pair.w(), 3.0), 1e-15);
}

TEST(TestingConstant, TowerExampleAndMultiPrecision) {
  const Case c = tower_example();
  const TestingResult t = testing_constant(c.pair, c.fam);
  const Big ref = boost::multiprecision::sqrt(Big("23.0625") / Big("1.75"));
  EXPECT_NEAR(t.value, ref.convert_to<double>(), 1e-15 * t.value);
  EXPECT_NEAR(t.value, 3.6302302, 1e-6);
  EXPECT_EQ(t.maximizer, (CubeId{0, 0}));
  const TreeGeometry g(3);
  for (double p : {1.5, 2.0, 3.0}) {
    const WeightPair ones(g, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0), p);
    EXPECT_DOUBLE_EQ(testing_constant(ones, SparseFamily(g, {{0, 0}})).value, 1.0);
  }
  EXPECT_THROW(testing_constant(c.pair, SparseFamily(TreeGeometry(2), {})), std::domain_error);
}

TEST(TestingConstant, AgreesWithOracle) {
  gen::Source src(103);
  for (int trial = 0; trial < 60; ++trial) {
    const double p = src.uniform(1.2, 4.0);
    const Case c = random_case(src, 0, 6, p);
    const int d = c.pair.geometry().depth;
    const std::vector<double> w(c.pair.w().begin(), c.pair.w().end()), s(c.pair.sigma().begin(), c.pair.sigma().end());
    const double ref = static_cast<double>(oracle::testing(d, ocubes(c.fam), w, s, p));
    EXPECT_NEAR(testing_constant(c.pair, c.fam).value, ref, 1e-12 * ref);
  }
}

TEST(TestingConstant, ExactScalingLaws) {
  gen::Source src(107);
  for (int trial = 0; trial < 60; ++trial) {
    const double p = src.uniform(1.2, 4.0);
    const Case c = random_case(src, 1, 8, p);
    const double t = testing_constant(c.pair, c.fam).value;
    for (double k : {1e-6, 1e6}) {
      const double ts = testing_constant(c.pair.scaled(1.0, k), c.fam).value;
      const double tw = testing_constant(c.pair.scaled(k, 1.0), c.fam).value;
      EXPECT_NEAR(ts, std::pow(k, 1.0 / c.pair.p_conjugate()) * t, 1e-10 * ts);
      EXPECT_NEAR(tw, std::pow(k, 1.0 / p) * t, 1e-10 * tw);
    }
  }
}

TEST(ApplySparse, Examples) {
  const TreeGeometry g(2);
  const SparseFamily tower(g, {{0, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(apply_sparse(tower, LeafFunction(g, {1, 1, 1, 1})).values, (std::vector<double>{3, 2, 1, 1}));
  const SparseFamily root(g, {{0, 0}});
  EXPECT_EQ(apply_sparse(root, LeafFunction(g, {1, 2, 3, 6})).values, std::vector<double>(4, 3.0));
}

TEST(ApplySparse, Linear) {
  gen::Source src(109);
  for (int trial = 0; trial < 30; ++trial) {
    const Case c = random_case(src, 1, 8, 2.0);
    const TreeGeometry& g = c.pair.geometry();
    const LeafFunction f(g, src.leaves(g.depth, 1.0)), h(g, src.leaves(g.depth, 1.0));
    const double a = src.uniform(-2, 2), b = src.uniform(-2, 2);
    std::vector<double> mix(g.leaves());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * f.values[i] + b * h.values[i];
    const auto lhs = apply_sparse(c.fam, LeafFunction(g, mix)).values;
    const auto af = apply_sparse(c.fam, f).values, ah = apply_sparse(c.fam, h).values;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = a * af[i] + b * ah[i];
      EXPECT_NEAR(lhs[i], rhs, 1e-12 * (std::abs(a * af[i]) + std::abs(b * ah[i])));
    }
  }
}

TEST(OperatorNorm, Examples) {
  const TreeGeometry g(3);
  const SparseFamily root(g, {{0, 0}});
  EXPECT_NEAR(operator_norm_p2(root, WeightPair(g, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0), 2.0)),
              1.0, 1e-12);
  EXPECT_NEAR(operator_norm_p2(root, WeightPair(g, std::vector<double>(8, 1.0), std::vector<double>(8, 5.0), 2.0)),
              std::sqrt(5.0), 1e-11);
  const Case c = tower_example();
  const double v = operator_norm_p2(c.fam, c.pair);
  EXPECT_NEAR(v, dense_norm(c.pair, c.fam), 1e-8 * v);
  EXPECT_GE(v + 1e-9, testing_constant(c.pair, c.fam).value);
  EXPECT_GE(v + 1e-9, testing_constant(c.pair.dual(), c.fam).value);
  EXPECT_THROW(operator_norm_p2(c.fam, tower_example(3.0).pair), std::domain_error);
  const TreeGeometry g15(15);
  EXPECT_THROW(operator_norm_p2(SparseFamily(g15, {{0, 0}}),
                                WeightPair(g15, std::vector<double>(g15.leaves(), 1.0),
                                           std::vector<double>(g15.leaves(), 1.0), 2.0)),
               std::domain_error);
}

TEST(OperatorNorm, DenseEigensolveAgreement) {
  gen::Source src(113);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = random_case(src, 0, 6, 2.0);
    const double v = operator_norm_p2(c.fam, c.pair);
    const double ref = dense_norm(c.pair, c.fam);
    EXPECT_NEAR(v, ref, 1e-6 * ref);
    EXPECT_LE(operator_norm_lower(c.fam, c.pair, 4, 7), v + 1e-9);
    EXPECT_LE(std::max(testing_constant(c.pair, c.fam).value, testing_constant(c.pair.dual(), c.fam).value),
              v + 1e-9);
  }
}

TEST(OperatorNormLower, MonotoneInBudgetAndIndicatorBound) {
  gen::Source src(127);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = src.uniform(1.3, 3.5);
    const Case c = random_case(src, 1, 6, p);
    double prev = 0.0;
    for (int budget : {1, 2, 5, 10}) {
      const double v = operator_norm_lower(c.fam, c.pair, budget, 99);
      EXPECT_GE(v, prev);
      prev = v;
    }
    // chi_R is an admissible trial.
    for (const CubeId& r : c.fam.cubes()) {
      std::vector<double> f(c.pair.geometry().leaves(), 0.0);
      for (std::size_t i = c.pair.geometry().first_leaf(r); i < c.pair.geometry().first_leaf(r) +
                                                                    c.pair.geometry().leaf_count(r); ++i)
        f[i] = 1.0;
      std::vector<double> fs(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) fs[i] = f[i] * c.pair.sigma()[i];
      const LeafFunction image = apply_sparse(c.fam, LeafFunction(c.pair.geometry(), fs));
      const double ratio = lp_norm(image, c.pair.w(), p) / lp_norm(LeafFunction(c.pair.geometry(), f), c.pair.sigma(), p);
      EXPECT_GE(prev * (1 + 1e-12), ratio);
    }
  }
  EXPECT_THROW(operator_norm_lower(tower_example().fam, tower_example().pair, 0), std::domain_error);
}

TEST(CovSides, Examples) {
  const TreeGeometry g(2);
  const std::vector<CubeId> one{{0, 0}};
  const std::vector<double> a1{1.0};
  const CovSides s1 = cov_sides(g, one, a1, std::vector<double>(4, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(s1.lhs, 1.0);
  EXPECT_DOUBLE_EQ(s1.rhs, 1.0);
  const Case c = tower_example();
  std::vector<double> a;
  for (const CubeId& q : c.fam.cubes()) a.push_back(c.pair.sigma_avg(q));
  const CovSides s = cov_sides(g, c.fam.cubes(), a, c.pair.w(), 2.0);
  EXPECT_NEAR(s.lhs * s.lhs, 23.0625, 1e-13);
  EXPECT_NEAR(s.rhs * s.rhs, 16.625, 1e-13);
}

TEST(CovSides, P2BracketOnRandomFamilies) {
  gen::Source src(131);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = src.integer(0, 8);
    const TreeGeometry g(d);
    const auto cubes = src.family(d, src.uniform(0.05, 0.6));
    std::vector<double> a(cubes.size());
    for (double& x : a) x = src.lognormal(2.0);
    const CovSides s = cov_sides(g, cubes, a, src.leaves(d, 1.5), 2.0);
    const CheckReport r = cov_bracket_report("cov", s);
    EXPECT_TRUE(r.pass) << r.ratio;
    EXPECT_LE(s.rhs, s.lhs * (1 + 1e-9));
    EXPECT_LE(s.lhs, std::sqrt(2.0) * s.rhs * (1 + 1e-9));
  }
}

TEST(Carleson, Examples) {
  const TreeGeometry g(2);
  const SparseFamily tower(g, {{0, 0}, {1, 0}, {2, 0}});
  const std::vector<double> w(4, 1.0);
  EXPECT_DOUBLE_EQ(carleson_embedding_ratio(tower, w, 0.5, {0, 0}).ratio, 1.75);
  EXPECT_DOUBLE_EQ(carleson_embedding_ratio(SparseFamily(g, {{0, 0}}), w, 0.5, {0, 0}).ratio, 1.0);
  EXPECT_FALSE(carleson_embedding_ratio(tower, w, 0.5, {0, 0}).pass);
  EXPECT_THROW(carleson_embedding_ratio(tower, w, 1.0, {0, 0}), std::domain_error);
  gen::Source src(137);
  for (int trial = 0; trial < 50; ++trial) {
    const Case c = random_case(src, 1, 8, 2.0);
    std::vector<double> w10(c.pair.w().begin(), c.pair.w().end());
    for (double& x : w10) x *= 10.0;
    for (double s : {0.25, 0.5, 0.75}) {
      const double r0 = carleson_embedding_ratio(c.fam, c.pair.w(), s, {0, 0}).ratio;
      const double r1 = carleson_embedding_ratio(c.fam, w10, s, {0, 0}).ratio;
      EXPECT_NEAR(r1, r0, 1e-12 * r0);
    }
  }
}

TEST(Hytonen, Examples) {
  const Case c = tower_example();
  const CheckReport r = hytonen_ratio(c.fam, c.pair, {0, 0});
  EXPECT_NEAR(r.lhs, 23.0625, 1e-13);
  EXPECT_NEAR(r.rhs, 16.0, 1e-13);
  EXPECT_NEAR(r.ratio, 23.0625 / 16.0, 1e-14);
  EXPECT_FALSE(r.bound.has_value());
  const SparseFamily one(TreeGeometry(2), {{1, 0}});
  EXPECT_NEAR(hytonen_ratio(one, c.pair, {1, 0}).ratio, 1.0, 1e-15);
  const WeightPair w5 = c.pair.scaled(5.0, 1.0);
  EXPECT_NEAR(hytonen_ratio(c.fam, w5, {0, 0}).ratio, r.ratio, 1e-14);
}

TEST(LevelSets, ConventionAndPartition) {
  EXPECT_EQ(level_set_index(1.0), -1);
  EXPECT_EQ(level_set_index(1.0000001), 0);
  EXPECT_EQ(level_set_index(2.0), 0);
  EXPECT_EQ(level_set_index(4.0), 1);
  EXPECT_EQ(level_set_index(0.3), -2);
  const Case c = tower_example();
  EXPECT_EQ(levelset_family(c.fam, c.pair.sigma(), 0), (std::vector<CubeId>{{0, 0}}));
  EXPECT_EQ(levelset_family(c.fam, c.pair.sigma(), 1), (std::vector<CubeId>{{1, 0}, {2, 0}}));
  const TreeGeometry g(3);
  const SparseFamily all(g, all_cubes(g));
  EXPECT_EQ(levelset_family(all, std::vector<double>(8, 1.0), -1).size(), all.size());
  gen::Source src(139);
  for (int trial = 0; trial < 50; ++trial) {
    const Case r = random_case(src, 1, 8, 2.0);
    std::vector<CubeId> joined;
    for (int k : realized_levels(r.fam, r.pair.sigma())) {
      const auto part = levelset_family(r.fam, r.pair.sigma(), k);
      joined.insert(joined.end(), part.begin(), part.end());
    }
    std::sort(joined.begin(), joined.end());
    EXPECT_EQ(joined, r.fam.cubes());
  }
}

TEST(Prop32, TowerExample) {
  const Case c = tower_example();
  const CheckReport k0 = prop32_check(c.fam, c.pair.sigma(), {0, 0}, 0);
  EXPECT_NEAR(k0.ratio, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(*k0.bound, 3.5);
  EXPECT_TRUE(k0.pass);
  const CheckReport k1 = prop32_check(c.fam, c.pair.sigma(), {0, 0}, 1);
  EXPECT_NEAR(k1.ratio, 2.25 / 1.75, 1e-15);
  EXPECT_TRUE(k1.pass);
  const CheckReport empty = prop32_check(c.fam, c.pair.sigma(), {0, 0}, 7);
  EXPECT_EQ(empty.ratio, 0.0);
  EXPECT_TRUE(empty.pass);
}

TEST(Prop33, TowerExampleAndConstantSigma) {
  const Case c = tower_example();
  const Bump b(BumpSpec{});
  const CheckReport r = prop33_check(c.fam, c.pair.sigma(), b, {0, 0});
  const double ref = (1.75 / b.psi(1.75) + 1.25 / b.psi(2.5) + 1.0 / b.psi(4.0)) / 1.75;
  EXPECT_NEAR(r.ratio, ref, 1e-14);
  EXPECT_NEAR(*r.bound, 2 * 1.75 * b.s_psi(), 1e-12);
  EXPECT_TRUE(r.pass);
  const TreeGeometry g(4);
  const SparseFamily f = generate_sparse(g, {SparseStrategy::Kind::random_greedy}, 0.5, 3);
  const CheckReport flat = prop33_check(f, std::vector<double>(16, 1.0), b, {0, 0});
  EXPECT_LE(flat.ratio, packing_constant(f) / b.psi(1.0) * (1 + 1e-12));
}

TEST(LambdaCondition, Examples) {
  const Case c = tower_example();
  const Bump b(BumpSpec{});
  CubeTable ones(7, 1.0);
  EXPECT_NEAR(lambda_condition_constant(c.fam, c.pair.sigma(), ones, {0, 0}), 4.0 / 1.75, 1e-14);
  const CubeTable psi = psi_lambda_table(c.pair, b, c.fam.cubes());
  EXPECT_NEAR(lambda_condition_constant(c.fam, c.pair.sigma(), psi, {0, 0}),
              prop33_check(c.fam, c.pair.sigma(), b, {0, 0}).ratio, 1e-14);
  CubeTable huge(7, 1e300);
  EXPECT_LT(lambda_condition_constant(c.fam, c.pair.sigma(), huge, {0, 0}), 1e-299);
  CubeTable low(7, 0.5);
  EXPECT_THROW(lambda_condition_constant(c.fam, c.pair.sigma(), low, {0, 0}), precondition_error);
}

TEST(Prop31, Examples) {
  const Bump b(BumpSpec{});
  const TreeGeometry g(2);
  const WeightPair ones(g, std::vector<double>(4, 1.0), std::vector<double>(4, 1.0), 2.0);
  const SparseFamily root(g, {{0, 0}});
  const CheckReport r = prop31_bound(ones, root, CubeTable(7, 1.0), b);
  EXPECT_NEAR(r.ratio, 1.0 / std::sqrt(b.phi(1.0)), 1e-14);
  EXPECT_FALSE(r.hard);
  const Case c = tower_example();
  const CubeTable psi = psi_lambda_table(c.pair, b, c.fam.cubes());
  const CheckReport a = prop31_bound(c.pair, c.fam, psi, b);
  EXPECT_TRUE(std::isfinite(a.ratio));
  EXPECT_NEAR(prop31_bound(c.pair.scaled(7.0, 1.0), c.fam, psi, b).ratio, a.ratio, 1e-13 * a.ratio);
}

TEST(Sawyer, TowerExampleAndIdentity) {
  const Case c = tower_example();
  const Bump b(BumpSpec{});
  const CheckReport r = sawyer_sum_bound(c.pair, c.fam, b, {0, 0});
  EXPECT_NEAR(r.lhs, 10.1875, 1e-13);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.hard);
  // lhs equals sum of (w_Q sigma_Q^{p-1} psi(sigma_Q)) sigma(Q) / psi(sigma_Q).
  double chain = 0.0;
  for (const CubeId& q : c.fam.cubes()) {
    const double s = c.pair.sigma_avg(q);
    chain += (c.pair.w_avg(q) * s * b.psi(s)) * c.pair.sigma_mass(q) / b.psi(s);
  }
  EXPECT_NEAR(r.lhs, chain, 1e-13);
}

TEST(Eset, Examples) {
  const Case c = tower_example();
  const EsetReport e = eset_split_check(c.pair, c.fam, {0, 0});
  EXPECT_NEAR(e.split.lhs, 23.0625, 1e-13);
  EXPECT_FALSE(e.split.bound.has_value());
  EXPECT_TRUE(e.pointwise.pass);
  const TreeGeometry g(3);
  const WeightPair ones(g, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0), 2.0);
  const SparseFamily all(g, all_cubes(g));
  const EsetReport eq = eset_split_check(ones, all, {0, 0});
  EXPECT_NEAR(eq.pointwise.ratio, 1.0, 1e-15);
  EXPECT_TRUE(eq.pointwise.pass);
  const EsetReport none = eset_split_check(c.pair.scaled(1e-6, 1.0), c.fam, {0, 0});
  EXPECT_EQ(none.split.lhs, 0.0);
  EXPECT_TRUE(none.pointwise.pass);
}

TEST(MainRatio, Examples) {
  const Bump b(BumpSpec{});
  const TreeGeometry g(2);
  const WeightPair ones(g, std::vector<double>(4, 1.0), std::vector<double>(4, 1.0), 3.0);
  const MainRatio one = theorem_main_ratio(ones, SparseFamily(g, {{0, 0}}), b);
  EXPECT_NEAR(one.primal.ratio, std::pow(b.psi(1.0), -1.0 / 3.0), 1e-14);
  const Case c = tower_example();
  const MainRatio a = theorem_main_ratio(c.pair, c.fam, b);
  EXPECT_NEAR(a.primal.ratio, std::sqrt(23.0625 / 1.75) / (2 * std::log(kEuler + 4)), 1e-4);
  EXPECT_NEAR(a.primal.ratio, 0.9529, 1e-4);
  const MainRatio scaled = theorem_main_ratio(c.pair.scaled(1.0, 1e6), c.fam, b);
  EXPECT_GT(std::abs(scaled.primal.ratio - a.primal.ratio), 1e-6);
}

TEST(MaximalNormLower, Examples) {
  const TreeGeometry g(3);
  const WeightPair ones(g, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0), 2.0);
  EXPECT_GE(maximal_norm_lower(ones, 1), 1.0 - 1e-15);
  gen::Source src(149);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = src.uniform(1.3, 3.0);
    const Case c = random_case(src, 1, 6, p);
    const double v = maximal_norm_lower(c.pair, 3, 5);
    for (const CubeId& q : all_cubes(c.pair.geometry())) {
      const double bound = std::pow(c.pair.w_mass(q), 1 / p) * c.pair.sigma_avg(q) / std::pow(c.pair.sigma_mass(q), 1 / p);
      EXPECT_GE(v * (1 + 1e-12), bound);
    }
  }
  EXPECT_THROW(maximal_norm_lower(ones, 0), std::domain_error);
}

TEST(CheckReport, PassRule) {
  EXPECT_TRUE(make_report("x", 1.0, 1.0, 1.0).pass);
  EXPECT_TRUE(make_report("x", 1.0 + 1e-10, 1.0, 1.0).pass);
  EXPECT_FALSE(make_report("x", 1.1, 1.0, 1.0).pass);
  EXPECT_FALSE(make_report("x", 0.1, 1.0, std::nullopt).pass);
  EXPECT_EQ(make_report("x", 0.0, 0.0, 1.0).ratio, 0.0);
}
