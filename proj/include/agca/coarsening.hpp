// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agca/coefficient.hpp"
#include "agca/common.hpp"
#include "agca/fem.hpp"
#include "agca/mesh.hpp"
#include "agca/sparse.hpp"
#include "agca/transfer.hpp"

namespace agca
{

//
// Physics policies. Each provides the local element matrix on a micro element and the matching
// local interpolation (block-diagonal for vector fields).
//
struct DiffusionPhysics
{
  static constexpr int components = 1;
  static constexpr int n = 3;
  using Local = Mat<3>;
  static constexpr std::string_view name = "diffusion";

  static Local local(const MicroElement &m, const CoefficientEval &eta, const QuadratureRule &q)
  {
    return local_diffusion(m, eta, q);
  }

  static Local interp(const LocalInterp &P) { return P; }
};

struct ViscousPhysics
{
  static constexpr int components = 2;
  static constexpr int n = 6;
  using Local = Mat<6>;
  static constexpr std::string_view name = "viscous";

  static Local local(const MicroElement &m, const CoefficientEval &eta, const QuadratureRule &q)
  {
    return local_viscous(m, eta, q);
  }

  static Local interp(const LocalInterp &P) { return block_diagonal(P); }
};

enum class BoundaryTreatment
{
  Dirichlet,  // homogeneous Dirichlet on the whole boundary of the unit square
  None        // natural boundary, used by the algebraic oracles
};

// Zero the rows and columns of boundary DoFs.
template <int N>
void mask_local(Mat<N> &A, const DofMap &d)
{
  for (int k = 0; k < N; ++k)
  {
    if (!d.boundary[static_cast<std::size_t>(k)])
    {
      continue;
    }
    for (int j = 0; j < N; ++j)
    {
      A(k, j) = 0.0;
      A(j, k) = 0.0;
    }
  }
}

// A_coarse += P^T A_fine P
template <int N>
void add_galerkin_product(Mat<N> &coarse, const Mat<N> &P, const Mat<N> &fine)
{
  const Mat<N> AP = fine * P;
  for (int i = 0; i < N; ++i)
  {
    for (int k = 0; k < N; ++k)
    {
      const double pki = P(k, i);
      if (pki == 0.0)
      {
        continue;
      }
      for (int j = 0; j < N; ++j)
      {
        coarse(i, j) += pki * AP(k, j);
      }
    }
  }
}

// Re-discretized local matrix on the element's own level.
template <class Phys>
typename Phys::Local dca_local(const MicroElement &m, const CoefficientEval &eta,
                               const QuadratureRule &q,
                               BoundaryTreatment bc = BoundaryTreatment::Dirichlet)
{
  auto A = Phys::local(m, eta, q);
  if (bc == BoundaryTreatment::Dirichlet)
  {
    mask_local(A, DofMap::make(m, Phys::components, 0));
  }
  return A;
}

//
// Partition of the macro elements into Galerkin-coarsened and re-discretized sets.
//
struct CoarseningPlan
{
  double nu = std::numeric_limits<double>::infinity();
  std::vector<char> gca;               // per macro
  std::vector<double> max_gradient;    // per macro, empty for synthetic plans

  static CoarseningPlan uniform(std::size_t num_macros, bool galerkin)
  {
    CoarseningPlan p;
    p.nu = galerkin ? 0.0 : std::numeric_limits<double>::infinity();
    p.gca.assign(num_macros, galerkin ? 1 : 0);
    return p;
  }

  std::size_t num_macros() const { return gca.size(); }
  bool is_gca(std::size_t m) const { return gca[m] != 0; }

  std::size_t num_gca() const
  {
    return static_cast<std::size_t>(std::count(gca.begin(), gca.end(), char{1}));
  }

  double c_agca() const
  {
    return gca.empty() ? 0.0 : static_cast<double>(num_gca()) / static_cast<double>(gca.size());
  }

  std::vector<std::size_t> gca_macros() const
  {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < gca.size(); ++m)
    {
      if (gca[m])
      {
        out.push_back(m);
      }
    }
    return out;
  }

  std::vector<std::size_t> dca_macros() const
  {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < gca.size(); ++m)
    {
      if (!gca[m])
      {
        out.push_back(m);
      }
    }
    return out;
  }
};

// Largest Euclidean norm of the gradient of the finest-level P1 interpolant of eta, per macro.
inline std::vector<double> macro_max_gradients(const ScalarField &eta, const MeshHierarchy &mesh)
{
  const int L = mesh.max_level();
  Vector nodal(mesh.num_vertices(L));
  for (std::size_t v = 0; v < nodal.size(); ++v)
  {
    nodal[v] = eta(mesh.vertex_coord(L, v));
  }
  std::vector<double> out(mesh.num_macros(), 0.0);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    double gmax = 0.0;
    mesh.for_each_micro_element(M, L, [&](const MicroElement &m) {
      const auto g = p1_gradients(m);
      // Written with differences so that a constant field yields an exact zero.
      const double d1 = nodal[m.dofs[1]] - nodal[m.dofs[0]];
      const double d2 = nodal[m.dofs[2]] - nodal[m.dofs[0]];
      const double gx = d1 * g[1].x + d2 * g[2].x;
      const double gy = d1 * g[1].y + d2 * g[2].y;
      gmax = std::max(gmax, std::hypot(gx, gy));
    });
    out[M] = gmax;
  }
  return out;
}

// A macro is Galerkin-coarsened iff the interpolated gradient exceeds nu strictly somewhere.
inline CoarseningPlan select_macros(const ScalarField &eta, const MeshHierarchy &mesh, double nu)
{
  if (!(nu >= 0.0))
  {
    throw ArgumentError("threshold nu must be >= 0");
  }
  CoarseningPlan p;
  p.nu = nu;
  p.max_gradient = macro_max_gradients(eta, mesh);
  p.gca.resize(mesh.num_macros());
  for (std::size_t M = 0; M < p.gca.size(); ++M)
  {
    p.gca[M] = p.max_gradient[M] > nu ? 1 : 0;
  }
  return p;
}

//
// Stored local Galerkin matrices, one N x N block per micro element of every GCA macro on
// levels 0..L-1.
//
template <class Phys>
class GcaStore
{
public:
  static constexpr int N = Phys::n;
  using Local = typename Phys::Local;

  GcaStore() = default;
  GcaStore(std::size_t num_macros, int max_level)
    : max_level_(max_level), data_(num_macros, std::vector<std::vector<Local>>(
                                                   static_cast<std::size_t>(std::max(max_level, 0))))
  {
  }

  int max_level() const { return max_level_; }

  bool has_level(std::size_t macro, int l) const
  {
    return l >= 0 && l < max_level_ && !data_[macro][static_cast<std::size_t>(l)].empty();
  }

  const Local &matrix(std::size_t macro, int l, std::size_t e) const
  {
    return data_[macro][static_cast<std::size_t>(l)][e];
  }

  std::vector<Local> &level_data(std::size_t macro, int l)
  {
    return data_[macro][static_cast<std::size_t>(l)];
  }

  std::size_t stored_matrices(int l) const
  {
    std::size_t s = 0;
    for (const auto &m : data_)
    {
      s += m[static_cast<std::size_t>(l)].size();
    }
    return s;
  }

  std::size_t stored_matrices() const
  {
    std::size_t s = 0;
    for (int l = 0; l < max_level_; ++l)
    {
      s += stored_matrices(l);
    }
    return s;
  }

  std::size_t stored_entries() const { return stored_matrices() * static_cast<std::size_t>(N * N); }
  std::size_t stored_bytes() const { return stored_entries() * sizeof(double); }

private:
  int max_level_ = 0;
  std::vector<std::vector<std::vector<Local>>> data_;  // [macro][level][element]
};

//
// Compute the local Galerkin matrices of level l for the given macros:
//   A_{m_l} = sum over children c of P_c^T A_{m_{l+1}} P_c,
// where A_{m_{l+1}} is the finest local matrix when l = L-1 and the stored level-(l+1) matrix
// otherwise. Must run from L-1 down to 0.
//
template <class Phys>
void build_gca_level(GcaStore<Phys> &store, const MeshHierarchy &mesh, const CoefficientEval &eta,
                     const QuadratureRule &q, std::span<const std::size_t> macros, int l,
                     BoundaryTreatment bc = BoundaryTreatment::Dirichlet)
{
  const int L = mesh.max_level();
  if (l < 0 || l >= L)
  {
    throw BuildError("GCA level " + std::to_string(l) + " outside [0, L-1]");
  }
  using Local = typename Phys::Local;
  std::array<Local, 4> interp_up, interp_down;
  for (const std::size_t M : macros)
  {
    if (l < L - 1 && !store.has_level(M, l + 1))
    {
      throw BuildError("GCA level " + std::to_string(l) + " of macro " + std::to_string(M) +
                       " needs level " + std::to_string(l + 1) + " first");
    }
    // The local interpolation only depends on the element orientation.
    if (mesh.micro_per_macro(l) > 0)
    {
      for (int c = 0; c < 4; ++c)
      {
        interp_up[static_cast<std::size_t>(c)] = Phys::interp(local_interp(mesh, M, l, 0, c));
        if (l > 0)
        {
          interp_down[static_cast<std::size_t>(c)] = Phys::interp(local_interp(mesh, M, l, 1, c));
        }
      }
    }
    auto &out = store.level_data(M, l);
    out.assign(mesh.micro_per_macro(l), Local{});
    const std::int64_t n = std::int64_t{1} << l;
    mesh.for_each_micro_element(M, l, [&](const MicroElement &m) {
      const auto kids = mesh.children(M, l, m.index);
      const bool up = MeshHierarchy::micro_coord(n, m.index).type == MicroType::Up;
      Local A{};
      for (int c = 0; c < 4; ++c)
      {
        const std::size_t ci = kids[static_cast<std::size_t>(c)];
        Local fine;
        if (l == L - 1)
        {
          fine = dca_local<Phys>(mesh.micro_element(M, L, ci), eta, q, bc);
        }
        else
        {
          fine = store.matrix(M, l + 1, ci);
        }
        add_galerkin_product(A, up ? interp_up[static_cast<std::size_t>(c)]
                                   : interp_down[static_cast<std::size_t>(c)],
                             fine);
      }
      if (bc == BoundaryTreatment::Dirichlet)
      {
        mask_local(A, DofMap::make(m, Phys::components, 0));
      }
      out[m.index] = A;
    });
  }
}

//
// Operator on one level of the AGCA hierarchy. On the finest level every macro is applied
// matrix-free; below it, DCA macros re-discretize on the fly and GCA macros use stored local
// matrices. With Dirichlet treatment the boundary rows and columns act as the identity.
//
template <class Phys>
class LevelOperator
{
public:
  static constexpr int N = Phys::n;
  using Local = typename Phys::Local;

  LevelOperator(const MeshHierarchy &mesh, const CoefficientEval &eta, int level,
                const CoarseningPlan &plan, const GcaStore<Phys> &store, QuadratureRule q,
                BoundaryTreatment bc)
    : mesh_(&mesh), eta_(&eta), level_(level), plan_(&plan), store_(&store), q_(std::move(q)),
      bc_(bc)
  {
    if (level < 0 || level > mesh.max_level())
    {
      throw ArgumentError("operator level out of range");
    }
    nv_ = mesh.num_vertices(level);
    if (bc_ == BoundaryTreatment::Dirichlet)
    {
      mask_ = mesh.boundary_mask(level, Phys::components);
    }
    else
    {
      mask_.assign(size(), 0);
    }
    for (std::size_t M = 0; M < mesh.num_macros(); ++M)
    {
      if (is_gca(M) && !store.has_level(M, level))
      {
        throw BuildError("GCA store incomplete on level " + std::to_string(level));
      }
    }
  }

  int level() const { return level_; }
  std::size_t size() const { return static_cast<std::size_t>(Phys::components) * nv_; }
  const std::vector<char> &boundary_mask() const { return mask_; }
  BoundaryTreatment boundary() const { return bc_; }
  const MeshHierarchy &mesh() const { return *mesh_; }

  bool is_gca(std::size_t macro) const
  {
    return level_ < mesh_->max_level() && plan_->is_gca(macro);
  }

  Local local_matrix(const MicroElement &m) const
  {
    if (is_gca(m.macro))
    {
      return store_->matrix(m.macro, level_, m.index);
    }
    return dca_local<Phys>(m, *eta_, q_, bc_);
  }

  // f(const DofMap&, const Local&) for every micro element of every macro.
  template <class F>
  void for_each_local(F &&f) const
  {
    for (std::size_t M = 0; M < mesh_->num_macros(); ++M)
    {
      const bool gca = is_gca(M);
      mesh_->for_each_micro_element(M, level_, [&](const MicroElement &m) {
        const DofMap d = DofMap::make(m, Phys::components, nv_);
        if (gca)
        {
          f(d, store_->matrix(M, level_, m.index));
        }
        else
        {
          f(d, dca_local<Phys>(m, *eta_, q_, bc_));
        }
      });
    }
  }

  void apply(std::span<const double> u, std::span<double> v) const
  {
    if (u.size() != size() || v.size() != size())
    {
      throw ArgumentError("level operator size mismatch");
    }
    linalg::fill(v, 0.0);
    std::array<double, N> ul{};
    for_each_local([&](const DofMap &d, const Local &A) {
      for (int k = 0; k < N; ++k)
      {
        const std::size_t g = d.global[static_cast<std::size_t>(k)];
        ul[static_cast<std::size_t>(k)] = mask_[g] ? 0.0 : u[g];
      }
      for (int i = 0; i < N; ++i)
      {
        double s = 0.0;
        for (int j = 0; j < N; ++j)
        {
          s += A(i, j) * ul[static_cast<std::size_t>(j)];
        }
        v[d.global[static_cast<std::size_t>(i)]] += s;
      }
    });
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (mask_[i])
      {
        v[i] = u[i];
      }
    }
  }

  // Sum of local diagonals; 1 on Dirichlet DoFs.
  Vector diagonal() const
  {
    Vector d(size(), 0.0);
    for_each_local([&](const DofMap &dm, const Local &A) {
      for (int k = 0; k < N; ++k)
      {
        d[dm.global[static_cast<std::size_t>(k)]] += A(k, k);
      }
    });
    for (std::size_t i = 0; i < d.size(); ++i)
    {
      if (mask_[i])
      {
        d[i] = 1.0;
      }
    }
    return d;
  }

  CsrMatrix assemble() const
  {
    std::vector<Triplet> t;
    t.reserve(mesh_->num_micro_elements(level_) * static_cast<std::size_t>(N * N));
    for_each_local([&](const DofMap &d, const Local &A) {
      for (int i = 0; i < N; ++i)
      {
        const std::size_t gi = d.global[static_cast<std::size_t>(i)];
        if (mask_[gi])
        {
          continue;
        }
        for (int j = 0; j < N; ++j)
        {
          const std::size_t gj = d.global[static_cast<std::size_t>(j)];
          if (!mask_[gj] && A(i, j) != 0.0)
          {
            t.push_back({gi, gj, A(i, j)});
          }
        }
      }
    });
    for (std::size_t i = 0; i < size(); ++i)
    {
      if (mask_[i])
      {
        t.push_back({i, i, 1.0});
      }
    }
    return CsrMatrix(size(), size(), std::move(t));
  }

private:
  const MeshHierarchy *mesh_;
  const CoefficientEval *eta_;
  int level_;
  const CoarseningPlan *plan_;
  const GcaStore<Phys> *store_;
  QuadratureRule q_;
  BoundaryTreatment bc_;
  std::size_t nv_ = 0;
  std::vector<char> mask_;
};

struct HierarchyOptions
{
  int quadrature_degree = 2;
  BoundaryTreatment boundary = BoundaryTreatment::Dirichlet;
};

//
// Levels 0..L of the AGCA operator family for one physics. Owns the plan and the Galerkin
// store; the mesh and coefficient are referenced and must outlive the hierarchy.
//
template <class Phys>
class AgcaHierarchy
{
public:
  AgcaHierarchy(const MeshHierarchy &mesh, const CoefficientEval &eta, CoarseningPlan plan,
                HierarchyOptions opt = {})
    : mesh_(&mesh), eta_(&eta), plan_(std::move(plan)), opt_(opt),
      store_(mesh.num_macros(), mesh.max_level())
  {
    if (plan_.num_macros() != mesh.num_macros())
    {
      throw ArgumentError("coarsening plan does not match the macro grid");
    }
    const auto q = quadrature(opt_.quadrature_degree);
    const auto gca = plan_.gca_macros();
    for (int l = mesh.max_level() - 1; l >= 0; --l)
    {
      build_gca_level(store_, mesh, eta, q, gca, l, opt_.boundary);
    }
    for (int l = 0; l <= mesh.max_level(); ++l)
    {
      levels_.push_back(std::make_unique<LevelOperator<Phys>>(mesh, eta, l, plan_, store_, q,
                                                              opt_.boundary));
    }
  }

  AgcaHierarchy(const AgcaHierarchy &) = delete;
  AgcaHierarchy &operator=(const AgcaHierarchy &) = delete;

  int max_level() const { return mesh_->max_level(); }
  const LevelOperator<Phys> &level(int l) const { return *levels_.at(static_cast<std::size_t>(l)); }
  const LevelOperator<Phys> &finest() const { return *levels_.back(); }
  const CoarseningPlan &plan() const { return plan_; }
  const GcaStore<Phys> &store() const { return store_; }
  const MeshHierarchy &mesh() const { return *mesh_; }
  const CoefficientEval &coefficient() const { return *eta_; }
  const HierarchyOptions &options() const { return opt_; }

  // Structured text summary of the plan and stored matrices.
  void dump(std::ostream &os) const
  {
    os << "{\n  \"physics\": \"" << Phys::name << "\",\n  \"nu\": ";
    if (std::isinf(plan_.nu))
    {
      os << "\"inf\"";
    }
    else
    {
      os << plan_.nu;
    }
    os << ",\n  \"macros\": " << plan_.num_macros() << ",\n  \"gca_macros\": " << plan_.num_gca()
       << ",\n  \"c_agca\": " << plan_.c_agca() << ",\n  \"stored_matrices_per_level\": [";
    for (int l = 0; l < max_level(); ++l)
    {
      os << (l ? ", " : "") << store_.stored_matrices(l);
    }
    os << "],\n  \"stored_bytes\": " << store_.stored_bytes() << ",\n  \"gca_set\": [";
    const auto g = plan_.gca_macros();
    for (std::size_t i = 0; i < g.size(); ++i)
    {
      os << (i ? ", " : "") << g[i];
    }
    os << "]\n}\n";
  }

private:
  const MeshHierarchy *mesh_;
  const CoefficientEval *eta_;
  CoarseningPlan plan_;
  HierarchyOptions opt_;
  GcaStore<Phys> store_;
  std::vector<std::unique_ptr<LevelOperator<Phys>>> levels_;
};

template <class Phys>
std::unique_ptr<AgcaHierarchy<Phys>> build_agca_hierarchy(const MeshHierarchy &mesh,
                                                          const CoefficientEval &eta,
                                                          CoarseningPlan plan,
                                                          HierarchyOptions opt = {})
{
  return std::make_unique<AgcaHierarchy<Phys>>(mesh, eta, std::move(plan), opt);
}

template <class Phys>
CsrMatrix assemble_sparse(const LevelOperator<Phys> &op)
{
  return op.assemble();
}

template <class Phys>
void apply_level(const LevelOperator<Phys> &op, std::span<const double> u, std::span<double> v)
{
  op.apply(u, v);
}

}  // namespace agca
