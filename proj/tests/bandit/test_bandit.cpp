#include "ksurf/bandit/bandit.hpp"
#include "ksurf/bandit/synthetic.hpp"

#include "../oracles/oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace ksurf;
using namespace ksurf::bandit;

namespace {

Vector v(std::initializer_list<double> xs) {
  Vector out(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

ArmSet arm_set(const std::vector<Vector>& cs) {
  ArmSet a;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    a.actions.push_back(static_cast<int>(i));
    a.contexts.push_back({cs[i], ContextSource::RawObservation});
  }
  return a;
}

/// Applies mean -> s * mean + o and std -> s * std to another model.
class AffineModel : public RewardModel {
public:
  AffineModel(const RewardModel& inner, double s, double o) : inner_(inner), s_(s), o_(o) {}
  surrogate::Posterior predict(const Vector& c) const override {
    const auto p = inner_.predict(c);
    return {s_ * p.mean + o_, s_ * s_ * p.variance};
  }
  void observe(const Vector&, double) override {}
  std::unique_ptr<RewardModel> clone() const override { return nullptr; }

private:
  const RewardModel& inner_;
  double s_;
  double o_;
};

}  // namespace

TEST_CASE("feature map: zero state with zero stats maps to zero") {
  FeatureMap f(3);
  CHECK(f(Vector::Zero(3)).c.norm() == 0.0);
}

TEST_CASE("feature map: hand-computed standardisation and projection") {
  const FeatureMap f = FeatureMap::frozen(v({1.0, -2.0}), v({2.0, 0.5}));
  // z = ((3-1)/2, (-1.5+2)/0.5) = (1, 1); scaled by 1/(3 sqrt 2)
  const Vector c = f(v({3.0, -1.5})).c;
  CHECK(c(0) == doctest::Approx(1.0 / (3.0 * std::sqrt(2.0))));
  CHECK(c(1) == doctest::Approx(1.0 / (3.0 * std::sqrt(2.0))));
  // far away: z = (10, 20) / (3 sqrt 2) has norm > 1, so projected
  const Vector far = f(v({21.0, 8.0})).c;
  CHECK(far.norm() == doctest::Approx(1.0));
  CHECK(far(1) / far(0) == doctest::Approx(1.0 * (10.0 / 0.5) / ((21.0 - 1.0) / 2.0)));
}

TEST_CASE("feature map: running statistics and the norm contract") {
  FeatureMap f(2);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(5.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = v({n(rng), 100.0 * n(rng)});
    f.update(x);
    CHECK(f(x).c.norm() <= 1.0 + 1e-12);
  }
  CHECK(f.mean()(0) == doctest::Approx(5.0).epsilon(0.05));
  CHECK(f.stddev()(1) == doctest::Approx(300.0).epsilon(0.05));
  CHECK(f(v({1e9, -1e9})).c.norm() == doctest::Approx(1.0));
}

TEST_CASE("select_action: single arm and pure exploitation") {
  const KnownLinearModel m(v({1.0, 0.0}));
  CHECK(select_action(arm_set({v({0.2, 0.1})}), m, 5.0) == 0);
  CHECK(select_action(arm_set({v({0.2, 0.0}), v({0.7, 0.0}), v({0.5, 0.0})}), m, 0.0) == 1);
  // ties go to the lowest index
  CHECK(select_action(arm_set({v({0.3, 0.0}), v({0.7, 0.0}), v({0.7, 0.0})}), m, 0.0) == 1);
}

TEST_CASE("select_action matches a direct GP posterior computation") {
  GpRewardModel m(surrogate::Kernel{0.5, 1.0, 0.01});
  const std::vector<Vector> X = {v({0.1, 0.2}), v({0.3, -0.1}), v({-0.4, 0.4}), v({0.0, 0.0}), v({0.2, 0.5})};
  const std::vector<double> y = {0.6, 0.4, 0.9, 0.5, 0.3};
  for (std::size_t i = 0; i < X.size(); ++i) m.observe(X[i], y[i]);
  const ArmSet arms = arm_set({v({0.25, 0.3}), v({-0.6, 0.2})});
  const double beta = 2.0;

  const double ybar = (0.6 + 0.4 + 0.9 + 0.5 + 0.3) / 5.0;
  std::vector<double> yc;
  for (double t : y) yc.push_back(t - ybar);
  double best_score = -1e300;
  std::size_t best = 0;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const auto [mean, var] = oracle::gp_direct(X, yc, arms.contexts[a].c, 0.5, 1.0, 0.01);
    const double score = mean + ybar + std::sqrt(beta) * std::sqrt(std::max(0.0, var));
    const auto p = m.predict(arms.contexts[a].c);
    CHECK(p.mean == doctest::Approx(mean + ybar).epsilon(1e-10));
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  CHECK(select_action(arms, m, beta) == best);
}

TEST_CASE("select_action is invariant to positive affine rescaling") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GpRewardModel m(surrogate::Kernel{0.6, 1.0, 0.01});
  for (int i = 0; i < 12; ++i) m.observe(project_unit_ball(v({u(rng), u(rng)})), 0.5 + 0.5 * u(rng));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vector> cs;
    for (int a = 0; a < 6; ++a) cs.push_back(project_unit_ball(v({u(rng), u(rng)})));
    const ArmSet arms = arm_set(cs);
    const double beta = 3.0 * (u(rng) + 1.0);
    const std::size_t base = select_action(arms, m, beta);
    CHECK(select_action(arms, AffineModel(m, 4.0, -2.0), beta) == base);
    CHECK(select_action(arms, AffineModel(m, 0.25, 10.0), beta) == base);
  }
}

TEST_CASE("regret accounting") {
  RegretTrace perfect;
  for (int i = 0; i < 10; ++i) perfect.record(0, 0.8, 0.8);
  CHECK(perfect.cumulative() == 0.0);

  RegretTrace two;
  two.record(1, 1.0, 0.4);
  two.record(0, 1.0, 0.9);
  CHECK(two.cumulative() == doctest::Approx(0.7));

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RegretTrace tape;
  double brute = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double o = u(rng);
    const double c = o * u(rng);
    brute += o - c;
    tape.record(0, o, c);
    CHECK(tape.rounds().back().cum_regret >= (i ? tape.rounds()[static_cast<std::size_t>(i - 1)].cum_regret : 0.0));
  }
  CHECK(tape.cumulative() == doctest::Approx(brute).epsilon(1e-14));

  std::ostringstream csv;
  two.write_csv(csv);
  CHECK(csv.str().rfind("round,chosen,oracle_reward,chosen_reward,cum_regret,rho\n1,1,", 0) == 0);
}

TEST_CASE("observe refits the model and records the round") {
  GpRewardModel m;
  RegretTrace t;
  const ArmSet arms = arm_set({v({0.1}), v({0.5})});
  observe(t, m, arms, 1, RewardSample::clipped(1.7), 1.0, 0.6);
  CHECK(m.gp().size() == 1);
  CHECK(m.target_mean() == 1.0);
  CHECK(t.cumulative() == doctest::Approx(0.4));
  CHECK_THROWS_AS(observe(t, m, arms, 2, RewardSample{}, 1.0, 0.0), ConfigError);
}

TEST_CASE("GP reward model history cap keeps the newest points") {
  GpRewardModel m(surrogate::Kernel{}, 3);
  for (int i = 0; i < 5; ++i) m.observe(v({static_cast<double>(i)}), static_cast<double>(i));
  CHECK(m.gp().size() == 3);
  CHECK(m.gp().inputs()(0, 0) == 2.0);
  CHECK(m.target_mean() == 3.0);
}

TEST_CASE("rho") {
  CHECK(rho(2.0, 2.0, 0.0) == 1.0);
  CHECK(rho(1.0, 100.0, 0.0) == doctest::Approx(0.01));
  CHECK(rho(1.0, 3.0, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(rho(1.0, 0.0, 0.0), NumericalError);
  CHECK_THROWS_AS(rho(1.0, -1.0, 0.5), NumericalError);

  // steady-state posterior covariance of a stable 2-D system
  Matrix A(2, 2), H = Matrix::Identity(2, 2), Q(2, 2), R(2, 2);
  A << 0.9, 0.1, 0.0, 0.8;
  Q << 0.01, 0.0, 0.0, 0.02;
  R << 1.0, 0.0, 0.0, 0.5;
  const Matrix P = oracle::dare_posterior(A, H, Q, R);
  Matrix J(1, 2);
  J << 0.7, -0.3;
  const double tr_jpj = (J * P * J.transpose()).trace();
  const double tr_jrj = (J * R * J.transpose()).trace();
  CHECK(rho(tr_jpj, tr_jrj, 0.0) < 1.0);
}

TEST_CASE("select_context follows the case expression including the boundary") {
  const ContextVector ekf{v({0.1}), ContextSource::Ekf};
  const ContextVector lekf{v({0.2}), ContextSource::LEkf};
  CHECK(select_context(0.05, 0.1, ekf, lekf).source == ContextSource::Ekf);
  CHECK(select_context(0.5, 0.1, ekf, lekf).source == ContextSource::LEkf);
  CHECK(select_context(0.1, 0.1, ekf, lekf).source == ContextSource::Ekf);
  CHECK(select_context(-0.05, 0.1, ekf, lekf).source == ContextSource::Ekf);
  CHECK(select_context(-0.5, 0.1, ekf, lekf).source == ContextSource::LEkf);
}

TEST_CASE("regret bound check: degenerate and zero cases") {
  RegretTrace kf, raw;
  kf.record(0, 1.0, 0.7, 1.0);
  raw.record(0, 1.0, 0.6, 1.0);
  kf.record(0, 1.0, 0.5, 1.0);  // |R^KF| = 0.8 > 0.4 + tol
  raw.record(0, 1.0, 1.0, 1.0);
  const auto rep = regret_bound_check(kf, raw, 0.05);
  CHECK(rep.holds[0]);
  CHECK_FALSE(rep.holds[1]);
  CHECK(rep.fraction == 0.5);

  SyntheticBanditConfig cfg;
  cfg.rounds = 200;
  cfg.reward_noise = 0.0;
  const SyntheticLinearBandit env(cfg, 3);
  const auto truth = env.run(ContextMode::Truth);
  CHECK(truth.trace.cumulative() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(regret_bound_check(truth.trace, truth.trace, 0.0).fraction == 1.0);
}

TEST_CASE("paired synthetic bandit: filtered contexts satisfy the regret bound") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SyntheticLinearBandit env(SyntheticBanditConfig{}, seed);
    const auto raw = env.run(ContextMode::Raw);
    const auto kf = env.run(ContextMode::Filtered);
    CHECK(regret_bound_check(kf.trace, raw.trace, 0.05).fraction >= 0.9);
    CHECK(kf.trace.cumulative() <= raw.trace.cumulative());
  }
}

TEST_CASE("linear-model bandit regret grows sublinearly") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const Vector theta = v({0.6, -0.3, 0.74}).normalized();
  LinearRewardModel model(3);
  RegretTrace trace;
  for (std::size_t t = 1; t <= 500; ++t) {
    ArmSet arms;
    for (int a = 0; a < 5; ++a) {
      arms.contexts.push_back({project_unit_ball(v({n(rng), n(rng), n(rng)}) / 1.5), ContextSource::RawObservation});
    }
    const std::size_t k = select_action(arms, model, beta_schedule(arms.size(), t));
    double best = -1e9;
    for (const auto& c : arms.contexts) best = std::max(best, c.c.dot(theta));
    const double r = arms.contexts[k].c.dot(theta);
    model.observe(arms.contexts[k].c, r);
    trace.record(k, best, r);
  }
  const double r100 = trace.rounds()[99].cum_regret;
  const double r500 = trace.rounds()[499].cum_regret;
  CHECK(r500 / 500.0 < r100 / 100.0);
}

TEST_CASE("beta schedule") {
  CHECK(beta_schedule(4, 1) == doctest::Approx(2.0 * std::log(4.0)));
  CHECK(beta_schedule(4, 10) == doctest::Approx(2.0 * std::log(400.0)));
  CHECK_THROWS_AS(select_action(arm_set({v({0.1})}), KnownLinearModel(v({1.0})), -1.0), ConfigError);
  CHECK_THROWS_AS(select_action(ArmSet{}, KnownLinearModel(v({1.0})), 1.0), ConfigError);
}
