#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pipeslip/stream.hpp"
#include "support.hpp"

using namespace pipeslip;
using namespace testing_support;

namespace {

constexpr cd I{0.0, 1.0};

ModeForcing forcing_from_scalar(const Poly& f, double xi, const RadialOperators& ops) {
  ModeForcing mf;
  mf.xi = xi;
  mf.f_r_hat = f.at(ops) / (I * xi);
  mf.f_z_hat = Eigen::VectorXcd::Zero(ops.n_points);
  mf.df_z_hat = Eigen::VectorXcd::Zero(ops.n_points);
  return mf;
}

ModeForcing random_smooth_forcing(std::mt19937_64& rng, double xi, const RadialOperators& ops) {
  // F^r = r p(r^2), F^z = q(r^2)
  std::normal_distribution<double> g(0.0, 1.0);
  Poly fr, fz;
  fr.c.assign(8, 0.0);
  fz.c.assign(7, 0.0);
  for (int k = 1; k < 8; k += 2) fr.c[k] = cd(g(rng), g(rng));
  for (int k = 0; k < 7; k += 2) fz.c[k] = cd(g(rng), g(rng));
  ModeForcing mf;
  mf.xi = xi;
  mf.f_r_hat = fr.at(ops);
  mf.f_z_hat = fz.at(ops);
  mf.df_z_hat = fz.deriv().at(ops);
  return mf;
}

}  // namespace

TEST_CASE("manufactured quintic is admissible") {
  const Poly psi = quintic(4.0);
  CHECK(std::abs(psi.c[1] + 1.5) < 1e-15);
  CHECK(std::abs(psi(1.0)) < 1e-15);
  const Poly l = psi.lop();
  CHECK(std::abs(l(0.0)) < 1e-15);
  CHECK(std::abs(l(1.0) + 4.0 * psi.deriv()(1.0)) < 1e-14);
}

TEST_CASE("zero forcing gives the zero solution") {
  const auto ops = build_radial_operators(32);
  const auto prof = poiseuille_profile({10.0, 1.0}, ops);
  ModeForcing mf{2.0, Eigen::VectorXcd::Zero(32), Eigen::VectorXcd::Zero(32), std::nullopt};
  const auto sol = solve_mode(mf, prof, ops);
  CHECK(max_abs(sol.psi_hat) == 0.0);
  const auto gaps = energy_identity_residuals(sol, mf, prof, ops);
  CHECK(gaps.real_gap == 0.0);
  CHECK(gaps.imag_gap == 0.0);
}

TEST_CASE("manufactured quintic is recovered") {
  const FlowParams p{std::numbers::pi, 4.0};
  const double xi = 1.0;
  const Poly psi = quintic(4.0);
  const Poly f = manufactured_forcing(psi, xi, p);
  for (int n : {16, 32, 48, 96}) {
    const auto ops = build_radial_operators(n);
    const auto prof = poiseuille_profile(p, ops);
    const auto mf = forcing_from_scalar(f, xi, ops);
    const auto sol = solve_mode(mf, prof, ops);
    const double err = rel_err(sol.psi_hat, psi.at(ops));
    MESSAGE("n=" << n << " quintic error " << err);
    CHECK(err <= 1e-8);
    const auto gaps = energy_identity_residuals(sol, mf, prof, ops);
    CHECK(gaps.real_gap <= 1e-7);
    CHECK(gaps.imag_gap <= 1e-7);
    CHECK(boundary_residuals(sol, prof, ops).max() <= 1e-9);
    // velocity and vorticity against their exact polynomials
    const Poly rpsi = psi * monomial(1);
    CHECK(rel_err(sol.v_z_hat, (rpsi.deriv() * cd(-1.0)).at(ops).cwiseQuotient(ops.nodes.cast<cd>())) <=
          1e-8);
    CHECK(rel_err(sol.omega_hat, (psi.lop() - psi * cd(xi * xi)).at(ops)) <= 1e-8);
  }
}

TEST_CASE("non-polynomial manufactured solution converges spectrally") {
  // psi = sin(pi r) r^2 (1 - r) style fields are not in the polynomial space;
  // use psi = r (1 - r) exp(r) adjusted to satisfy the Robin row through a
  // cubic correction, with forcing evaluated from exact derivatives.
  const FlowParams p{10.0, 2.0};
  const double xi = 1.5;
  // psi = g(r) + a r^3 + b r with g = r^3 exp(r) (1 - r) chosen so psi(1) = 0,
  // then L psi(1) + alpha psi'(1) = 0 fixes a, b.
  // Exact derivatives are evaluated by nested polynomial series of exp.
  Poly e;  // Taylor series of exp to high degree, exact to roundoff on [0,1]
  e.c.assign(40, 0.0);
  double fact = 1.0;
  for (int k = 0; k < 40; ++k) {
    e.c[k] = 1.0 / fact;
    fact *= (k + 1);
  }
  Poly g;
  g.c = {0.0, 0.0, 0.0, 1.0, -1.0};
  g = g * e;
  // Robin correction: psi = g + a (r - r^3) keeps psi(0) = psi(1) = 0 and L psi(0) = 0
  Poly corr;
  corr.c = {0.0, 1.0, 0.0, -1.0};
  const cd lg = g.lop()(1.0) + p.alpha * g.deriv()(1.0);
  const cd lc = corr.lop()(1.0) + p.alpha * corr.deriv()(1.0);
  const Poly psi = g - corr * (lg / lc);
  const Poly f = manufactured_forcing(psi, xi, p);
  std::vector<double> errs;
  for (int n : {8, 12, 16, 24}) {
    const auto ops = build_radial_operators(n);
    const auto prof = poiseuille_profile(p, ops);
    const auto sol = solve_mode(forcing_from_scalar(f, xi, ops), prof, ops);
    errs.push_back(rel_err(sol.psi_hat, psi.at(ops)));
    MESSAGE("n=" << n << " exp-type error " << errs.back());
  }
  CHECK(errs[1] < 1e-2 * errs[0]);
  CHECK(errs[2] < 1e-2 * errs[1]);
  CHECK(errs[3] <= 1e-11);
}

TEST_CASE("conjugate symmetry in xi") {
  std::mt19937_64 rng(99);
  const auto ops = build_radial_operators(64);
  const auto prof = poiseuille_profile({100.0, 0.5}, ops);
  auto mf = random_smooth_forcing(rng, 2.5, ops);
  ModeForcing neg{-2.5, mf.f_r_hat.conjugate(), mf.f_z_hat.conjugate(), mf.df_z_hat->conjugate()};
  const auto a = solve_mode(mf, prof, ops);
  const auto b = solve_mode(neg, prof, ops);
  CHECK(max_abs(b.psi_hat - a.psi_hat.conjugate()) <= 1e-10 * max_abs(a.psi_hat));
}

TEST_CASE("recover_velocity examples") {
  const auto ops = build_radial_operators(24);
  const auto v0 = recover_velocity(Eigen::VectorXcd::Zero(24), 2.0, ops);
  CHECK(max_abs(v0.v_r_hat) == 0.0);
  CHECK(max_abs(v0.v_z_hat) == 0.0);
  CHECK(max_abs(v0.omega_hat) == 0.0);
  Poly psi;
  psi.c = {0.0, 1.0, 0.0, -1.0};
  const auto v = recover_velocity(psi.at(ops), 2.0, ops);
  Poly vz;
  vz.c = {-2.0, 0.0, 4.0};
  CHECK(max_abs(v.v_z_hat - vz.at(ops)) <= 1e-12);
  CHECK(max_abs(v.v_r_hat - (psi * cd(0.0, 2.0)).at(ops)) <= 1e-14);
}

TEST_CASE("operator annihilates I1(|xi| r) on interior rows") {
  const int n = 40;
  const auto ops = build_radial_operators(n);
  for (double xi : {0.5, 2.0, 6.0}) {
    const auto prof = poiseuille_profile({20.0, 1.0}, ops);
    const auto m = assemble_mode_operator(xi, prof, ops);
    Eigen::VectorXcd b(n);
    for (int j = 0; j < n; ++j) b[j] = std::cyl_bessel_i(1.0, std::abs(xi) * ops.nodes[j]);
    const Eigen::VectorXcd res = m * b;
    CHECK(res.segment(2, n - 4).cwiseAbs().maxCoeff() <= 1e-9 * max_abs(b));
  }
}

TEST_CASE("operator structure at xi = 0 and for plug flow") {
  const int n = 20;
  const auto ops = build_radial_operators(n);
  const auto prof = poiseuille_profile({std::numbers::pi, 0.0}, ops);
  // xi = 0: interior rows are -L^2 up to the row scaling
  const auto m0 = assemble_mode_operator(0.0, prof, ops);
  const Eigen::MatrixXd l2 = -(ops.l_op * ops.l_op);
  for (int i = 2; i < n - 2; ++i) {
    const double s = l2.row(i).cwiseAbs().maxCoeff();
    CHECK((m0.row(i) - (l2.row(i) / s).cast<cd>()).cwiseAbs().maxCoeff() <= 1e-13);
  }
  // xi = 1, U = 1: operator = i (L - 1) - (L - 1)^2
  Eigen::MatrixXcd lm = ops.l_op.cast<cd>();
  lm.diagonal().array() -= 1.0;
  const Eigen::MatrixXcd want = I * lm - lm * lm;
  const auto m1 = assemble_mode_operator(1.0, prof, ops);
  for (int i = 2; i < n - 2; ++i) {
    const double s = want.row(i).cwiseAbs().maxCoeff();
    CHECK((m1.row(i) - want.row(i) / s).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("divergence identity and zero flux on random solves") {
  std::mt19937_64 rng(5);
  const auto ops = build_radial_operators(96);
  for (double xi : {0.0, 0.3, 4.0}) {
    const auto prof = poiseuille_profile({300.0, 3.0}, ops);
    auto mf = random_smooth_forcing(rng, xi, ops);
    const auto sol = solve_mode(mf, prof, ops);
    const Eigen::VectorXcd div = ops.d1.cast<cd>() * sol.v_r_hat +
                                 sol.v_r_hat.cwiseQuotient(ops.nodes.cast<cd>()) +
                                 I * xi * sol.v_z_hat;
    const double scale = max_abs(sol.psi_hat) * (1 + std::abs(xi));
    CHECK(max_abs(div) <= 1e-9 * scale);
    CHECK(std::abs(ops.integrate_r(sol.v_z_hat)) <= 1e-10 * std::max(scale, max_abs(sol.v_z_hat)));
    CHECK(boundary_residuals(sol, prof, ops).max() <= 1e-9);
  }
}

TEST_CASE("energy identities at moderate and large flux") {
  std::mt19937_64 rng(2024);
  struct Case {
    double phi, alpha, xi;
    int n;
  };
  for (const auto& c : {Case{1e3, 1.0, 3.0, 192}, Case{1e4, 0.0, 30.0, 512}, Case{1e4, 1e3, 1e-3, 96},
                        Case{5e3, 10.0, 0.7, 256}}) {
    const auto ops = radial_operators(c.n);
    const auto prof = poiseuille_profile({c.phi, c.alpha}, *ops);
    const auto mf = random_smooth_forcing(rng, c.xi, *ops);
    const auto sol = solve_mode(mf, prof, *ops);
    const auto gaps = energy_identity_residuals(sol, mf, prof, *ops);
    MESSAGE("phi=" << c.phi << " xi=" << c.xi << " gaps " << gaps.real_gap << " " << gaps.imag_gap);
    CHECK(gaps.real_gap <= 1e-6);
    CHECK(gaps.imag_gap <= 1e-6);
    // L psi from the matrix agrees with omega + xi^2 psi away from the axis
    const Eigen::VectorXcd lpsi = ops->l_op.cast<cd>() * sol.psi_hat;
    const Eigen::VectorXcd lw = sol.omega_hat + c.xi * c.xi * sol.psi_hat;
    CHECK(max_abs((lpsi - lw).tail(c.n / 2)) <= 1e-6 * max_abs(lw));
  }
}

TEST_CASE("homogeneous operator stays invertible over a parameter sweep") {
  const auto ops = radial_operators(64);
  double smallest = 1e300;
  for (double phi : {1.0, 10.0, 100.0, 1000.0})
    for (double alpha : {0.1, 1.0, 10.0})
      for (double xi : {0.01, 1.0, 10.0}) {
        const auto prof = poiseuille_profile({phi, alpha}, *ops);
        smallest = std::min(smallest, mode_operator_sigma_min(xi, prof, *ops));
      }
  MESSAGE("smallest singular value over sweep: " << smallest);
  CHECK(smallest > 1e-12);
}

TEST_CASE("forcing validation") {
  const auto ops = build_radial_operators(16);
  const auto prof = poiseuille_profile({1.0, 1.0}, ops);
  ModeForcing bad{1.0, Eigen::VectorXcd::Zero(15), Eigen::VectorXcd::Zero(16), std::nullopt};
  CHECK_THROWS_AS(solve_mode(bad, prof, ops), std::invalid_argument);
  ModeForcing nan{1.0, Eigen::VectorXcd::Constant(16, NAN), Eigen::VectorXcd::Zero(16), std::nullopt};
  CHECK_THROWS_AS(solve_mode(nan, prof, ops), std::invalid_argument);
}
