// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "agca/coarsening.hpp"
#include "agca/common.hpp"
#include "agca/solvers/config.hpp"
#include "agca/solvers/krylov.hpp"
#include "agca/solvers/relaxation.hpp"
#include "agca/sparse.hpp"
#include "agca/transfer.hpp"

namespace agca
{

//
// Geometric V-cycle over an AGCA hierarchy: Chebyshev smoothing above min_level, CG with
// symmetric SOR on the assembled operator at min_level. Dirichlet DoFs are pinned to the
// right-hand side, matching the identity rows of the level operators.
//
template <class Phys>
class VCycle
{
public:
  using Level = LevelOperator<Phys>;

  VCycle(const AgcaHierarchy<Phys> &h, VCycleConfig cfg) : h_(&h), cfg_(cfg)
  {
    cfg_.validate();
    const int L = h.max_level();
    if (cfg_.min_level > L)
    {
      throw BuildError("V-cycle min_level above the finest level");
    }
    smoothers_.resize(static_cast<std::size_t>(L + 1));
    lambda_.assign(static_cast<std::size_t>(L + 1), 0.0);
    for (int l = cfg_.min_level + 1; l <= L; ++l)
    {
      const Level &A = h.level(l);
      Vector d = A.diagonal();
      const double lam =
          estimate_lambda_max(A, d, A.boundary_mask(), cfg_.power_iterations);
      lambda_[static_cast<std::size_t>(l)] = lam;
      smoothers_[static_cast<std::size_t>(l)] = std::make_unique<ChebyshevSmoother<Level>>(
          A, std::move(d), A.boundary_mask(), cfg_.cheby_order, lam / cfg_.cheby_lower_ratio,
          cfg_.cheby_safety * lam);
    }
    coarse_ = h.level(cfg_.min_level).assemble();
    coarse_prec_ = std::make_unique<SsorPreconditioner>(coarse_);
  }

  VCycle(const VCycle &) = delete;
  VCycle &operator=(const VCycle &) = delete;

  const VCycleConfig &config() const { return cfg_; }
  std::size_t size() const { return h_->finest().size(); }
  double lambda_max(int l) const { return lambda_.at(static_cast<std::size_t>(l)); }
  const CsrMatrix &coarse_matrix() const { return coarse_; }
  int coarse_iterations() const { return coarse_iterations_; }

  // One cycle on the finest level; x is updated in place.
  void cycle(std::span<const double> b, std::span<double> x) const
  {
    if (b.size() != size() || x.size() != size())
    {
      throw ArgumentError("V-cycle size mismatch");
    }
    run(h_->max_level(), b, x);
  }

  // x = V(b) from a zero initial guess; a linear operator usable as a preconditioner.
  void apply(std::span<const double> b, std::span<double> x) const
  {
    linalg::fill(x, 0.0);
    cycle(b, x);
  }

private:
  void pin(const Level &A, std::span<const double> b, std::span<double> x) const
  {
    const auto &mask = A.boundary_mask();
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      if (mask[i])
      {
        x[i] = b[i];
      }
    }
  }

  void run(int l, std::span<const double> b, std::span<double> x) const
  {
    const Level &A = h_->level(l);
    pin(A, b, x);
    if (l == cfg_.min_level)
    {
      KrylovConfig kc;
      kc.tol = cfg_.coarse_tol;
      kc.max_iter = cfg_.coarse_max_iter;
      const auto rep = cg(coarse_, *coarse_prec_, b, x, kc);
      coarse_iterations_ += rep.iterations;
      return;
    }
    const auto &smoother = *smoothers_[static_cast<std::size_t>(l)];
    for (int s = 0; s < cfg_.pre_smooth; ++s)
    {
      smoother.smooth(b, x);
    }
    const std::size_t n = A.size();
    Vector r(n);
    A.apply(x, r);
    for (std::size_t i = 0; i < n; ++i)
    {
      r[i] = b[i] - r[i];
    }
    const Level &Ac = h_->level(l - 1);
    Vector bc(Ac.size()), xc(Ac.size(), 0.0);
    restrict_residual(h_->mesh(), l - 1, Phys::components, r, bc);
    zero_masked(Ac.boundary_mask(), bc);
    run(l - 1, bc, xc);
    Vector e(n);
    prolongate(h_->mesh(), l - 1, Phys::components, xc, e);
    zero_masked(A.boundary_mask(), e);
    linalg::axpy(1.0, e, x);
    for (int s = 0; s < cfg_.post_smooth; ++s)
    {
      smoother.smooth(b, x);
    }
  }

  static void zero_masked(const std::vector<char> &mask, std::span<double> v)
  {
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (mask[i])
      {
        v[i] = 0.0;
      }
    }
  }

  const AgcaHierarchy<Phys> *h_;
  VCycleConfig cfg_;
  std::vector<std::unique_ptr<ChebyshevSmoother<Level>>> smoothers_;
  Vector lambda_;
  CsrMatrix coarse_;
  std::unique_ptr<SsorPreconditioner> coarse_prec_;
  mutable int coarse_iterations_ = 0;
};

}  // namespace agca
