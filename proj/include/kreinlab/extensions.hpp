#pragma once

// Self-adjoint realizations of -Delta - z0 between the minimal and maximal
// operators, parametrized by a subspace X = ran(P) of boundary data and a
// Hermitian operator L on it.
//
// Dirichlet reference:  P (tau_N(z0) u + L gamma_D u) = 0,  (I - P) gamma_D u = 0.
// Neumann reference:    P (tau_D(z0) u + L gamma_N u) = 0,  (I - P) gamma_N u = 0.

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>

#include "kreinlab/backend.hpp"
#include "kreinlab/traces.hpp"

namespace kreinlab::ext {

enum class Reference { dirichlet, neumann };
enum class Special { none, dirichlet, neumann, krein, robin };
enum class Subspace { full, zero, projector };

constexpr std::string_view special_name(Special s) noexcept {
  switch (s) {
    case Special::none: return "matrix";
    case Special::dirichlet: return "dirichlet";
    case Special::neumann: return "neumann";
    case Special::krein: return "krein";
    case Special::robin: return "robin";
  }
  return "matrix";
}

struct ExtensionSpec {
  Reference reference = Reference::dirichlet;
  std::optional<double> z0;  // backend default when unset
  Special special = Special::krein;
  CMat matrix;  // L for Special::none, Theta for Special::robin
  Subspace subspace = Subspace::full;
  CMat projector;  // used when subspace == projector

  static ExtensionSpec dirichlet() { return with(Special::dirichlet); }
  static ExtensionSpec neumann() { return with(Special::neumann); }
  static ExtensionSpec krein() { return with(Special::krein); }
  static ExtensionSpec robin(CMat theta) {
    ExtensionSpec s = with(Special::robin);
    s.matrix = std::move(theta);
    return s;
  }
  static ExtensionSpec general(CMat l) {
    ExtensionSpec s = with(Special::none);
    s.matrix = std::move(l);
    return s;
  }

  ExtensionSpec& at(double shift) {
    z0 = shift;
    return *this;
  }
  ExtensionSpec& on(Reference r) {
    reference = r;
    return *this;
  }
  ExtensionSpec& restricted_to(CMat p) {
    subspace = Subspace::projector;
    projector = std::move(p);
    return *this;
  }

 private:
  static ExtensionSpec with(Special s) {
    ExtensionSpec e;
    e.special = s;
    return e;
  }
};

inline constexpr double hermitian_tol = 1e-12;

template <BoundaryBackend B>
class Extension {
 public:
  Extension(ExtensionSpec spec, B backend) : spec_(std::move(spec)), backend_(std::move(backend)) {
    z0_ = spec_.z0.value_or(backend_.default_z0());
    metric_ = backend_.metric();
    const int n = backend_.boundary_dim();
    const CMat id = CMat::Identity(n, n);
    if (spec_.reference == Reference::dirichlet)
      m0_ = backend_.dtn(z0_);
    else
      m0_ = backend_.ntd(z0_);

    switch (spec_.subspace) {
      case Subspace::full: p_ = id; break;
      case Subspace::zero: p_ = CMat::Zero(n, n); break;
      case Subspace::projector:
        check_shape(spec_.projector, n, "projector");
        if (la::op_norm(spec_.projector * spec_.projector - spec_.projector, metric_) > hermitian_tol ||
            la::hermitian_defect(spec_.projector, metric_) > hermitian_tol)
          throw Error(Errc::spec_invalid, "X selector is not an orthogonal projector");
        p_ = spec_.projector;
        break;
    }

    const bool dref = spec_.reference == Reference::dirichlet;
    switch (spec_.special) {
      case Special::dirichlet:
        if (dref) {
          p_ = CMat::Zero(n, n);
          l_ = CMat::Zero(n, n);
        } else {
          p_ = id;
          l_ = m0_;
        }
        break;
      case Special::neumann:
        if (dref) {
          p_ = id;
          l_ = -m0_;
        } else {
          p_ = CMat::Zero(n, n);
          l_ = CMat::Zero(n, n);
        }
        break;
      case Special::krein:
        p_ = id;
        l_ = CMat::Zero(n, n);
        break;
      case Special::robin:
        if (!dref) throw Error(Errc::spec_invalid, "Robin conditions need the Dirichlet reference");
        check_hermitian(spec_.matrix, n, "Robin operator");
        p_ = id;
        l_ = -m0_ + spec_.matrix;
        break;
      case Special::none:
        check_hermitian(spec_.matrix, n, "L");
        l_ = p_ * spec_.matrix * p_;
        break;
    }
  }

  const ExtensionSpec& spec() const { return spec_; }
  const B& backend() const { return backend_; }
  double z0() const { return z0_; }
  Reference reference() const { return spec_.reference; }
  const CMat& projector() const { return p_; }
  const CMat& boundary_operator() const { return l_; }
  // dtn(z0) for the Dirichlet reference, ntd(z0) for the Neumann reference.
  const CMat& reference_map() const { return m0_; }
  const RVec& metric() const { return metric_; }
  int boundary_dim() const { return int(p_.rows()); }
  bool full_subspace() const { return (p_ - CMat::Identity(p_.rows(), p_.cols())).norm() == 0.0; }

 private:
  static void check_shape(const CMat& m, int n, const char* what) {
    if (m.rows() != n || m.cols() != n)
      throw Error(Errc::spec_invalid, std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()) + ", expected " + std::to_string(n));
  }
  void check_hermitian(const CMat& m, int n, const char* what) const {
    check_shape(m, n, what);
    const double scale = std::max(1.0, la::op_norm(m, metric_));
    if (la::hermitian_defect(m, metric_) > hermitian_tol * scale)
      throw Error(Errc::spec_invalid, std::string(what) + " is not Hermitian");
  }

  ExtensionSpec spec_;
  B backend_;
  double z0_ = 0.0;
  RVec metric_;
  CMat m0_, p_, l_;
};

template <BoundaryBackend B>
Extension<B> make_extension(ExtensionSpec spec, B backend) {
  if (spec.reference != Reference::dirichlet)
    throw Error(Errc::spec_invalid, "make_extension builds Dirichlet-reference extensions");
  return Extension<B>(std::move(spec), std::move(backend));
}

template <FieldBackend B>
Extension<B> make_extension_neumann_ref(ExtensionSpec spec, B backend) {
  spec.reference = Reference::neumann;
  return Extension<B>(std::move(spec), std::move(backend));
}

// Boundary condition residual from the two traces of a field.
template <BoundaryBackend B>
double boundary_residual(const Extension<B>& e, const CVec& gd, const CVec& gn) {
  const int n = e.boundary_dim();
  const CMat q = CMat::Identity(n, n) - e.projector();
  CVec r;
  if (e.reference() == Reference::dirichlet)
    r = e.projector() * (gn + e.reference_map() * gd + e.boundary_operator() * gd) + q * gd;
  else
    r = e.projector() * (gd - e.reference_map() * gn + e.boundary_operator() * gn) + q * gn;
  return la::norm(r, e.metric());
}

template <FieldBackend B>
double boundary_residual(const Extension<B>& e, const typename B::Field& u) {
  return boundary_residual(e, e.backend().gamma_d(u), e.backend().gamma_n(u));
}

inline double boundary_residual(const Extension<BemBackend>& e, const weyl::LayerField& u) {
  return boundary_residual(e, u.trace_d, u.trace_n);
}

// L - M(z + z0) + M(z0), the bracket whose inverse is the boundary Weyl function.
template <BoundaryBackend B>
CMat bracket(const Extension<B>& e, cplx z) {
  if (e.reference() != Reference::dirichlet)
    throw Error(Errc::spec_invalid, "the bracket is defined for the Dirichlet reference");
  return e.boundary_operator() - e.backend().dtn(z + e.z0()) + e.reference_map();
}

// P (P B P + I - P)^{-1} P; for X = full this is the bracket inverse.
template <BoundaryBackend B>
CMat weyl_function(const Extension<B>& e, cplx z) {
  const int n = e.boundary_dim();
  const CMat& p = e.projector();
  if (p.norm() == 0.0) return CMat::Zero(n, n);
  const CMat a = p * bracket(e, z) * p + CMat::Identity(n, n) - p;
  return p * la::inverse_checked(a, Errc::near_eigenvalue, "bracket is singular: z is an eigenvalue") * p;
}

// Linear system for the harmonic coefficients of a field q + h with h w-harmonic
// satisfying the boundary condition: returns (A, A a + rhs = 0).
template <FieldBackend B>
std::pair<CMat, CVec> boundary_system(const Extension<B>& e, cplx w, const CVec& qd, const CVec& qn) {
  const int n = e.boundary_dim();
  const auto t = e.backend().harmonic_traces(w);
  const CMat& p = e.projector();
  const CMat q = CMat::Identity(n, n) - p;
  const CMat& l = e.boundary_operator();
  const CMat& m0 = e.reference_map();
  if (e.reference() == Reference::dirichlet) {
    const CMat a = p * (t.neu + (m0 + l) * t.dir) + q * t.dir;
    const CVec rhs = p * (qn + (m0 + l) * qd) + q * qd;
    return {a, rhs};
  }
  const CMat a = p * (t.dir + (l - m0) * t.neu) + q * t.neu;
  const CVec rhs = p * (qd + (l - m0) * qn) + q * qn;
  return {a, rhs};
}

// (ext - z)^{-1} f by solving the boundary condition directly on top of a particular solution.
template <FieldBackend B>
typename B::Field direct_resolvent(const Extension<B>& e, cplx z, const typename B::Field& f) {
  const auto& b = e.backend();
  const cplx w = z + e.z0();
  const auto q = b.particular(w, f);
  const auto [a, rhs] = boundary_system(e, w, b.gamma_d(q), b.gamma_n(q));
  const CVec coef = -la::solve_checked(a, rhs, Errc::near_eigenvalue, "z is an eigenvalue of the extension");
  return q + b.combine(w, coef);
}

// (ext - z)^{-1} f. Dirichlet reference: R_D(w) f - P_w M^D(z) gamma_N R_D(w) f with
// w = z + z0 and P_w the w-harmonic Poisson extension; Neumann reference: direct solve.
template <FieldBackend B>
typename B::Field apply_resolvent(const Extension<B>& e, cplx z, const typename B::Field& f) {
  if (e.reference() == Reference::neumann) return direct_resolvent(e, z, f);
  const auto& b = e.backend();
  const cplx w = z + e.z0();
  const auto ud = model::dirichlet_resolvent(b, w, f);
  if (e.projector().norm() == 0.0) return ud;
  const CVec c = weyl_function(e, z) * b.gamma_n(ud);
  return ud - model::poisson(b, w, c);
}

template <class F>
F apply_resolvent(const Extension<BemBackend>&, cplx, const F&) {
  throw Error(Errc::backend_unsupported, "interior resolvents need a model backend");
}

struct NonnegativityReport {
  bool nonnegative = false;
  double min_boundary_eigenvalue = 0.0;  // smallest eigenvalue of L on X
  double min_ritz_value = 0.0;           // smallest Ritz value of ext over the trial family
  int ritz_rank = 0;
};

// Smallest eigenvalue of L compressed to ran(P); +inf when X = {0}.
template <BoundaryBackend B>
double min_boundary_eigenvalue(const Extension<B>& e) {
  const RVec& w = e.metric();
  const CMat ps = la::symmetrize(e.projector(), w);
  Eigen::SelfAdjointEigenSolver<CMat> pe(0.5 * (ps + ps.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < pe.eigenvalues().size(); ++i)
    if (pe.eigenvalues()[i] > 0.5) keep.push_back(i);
  if (keep.empty()) return std::numeric_limits<double>::infinity();
  CMat q(ps.rows(), Eigen::Index(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) q.col(Eigen::Index(j)) = pe.eigenvectors().col(keep[j]);
  const CMat ls = la::symmetrize(e.boundary_operator(), w);
  const CMat h = q.adjoint() * (0.5 * (ls + ls.adjoint())) * q;
  Eigen::SelfAdjointEigenSolver<CMat> he(h, Eigen::EigenvaluesOnly);
  return he.eigenvalues().minCoeff();
}

// Rayleigh-Ritz over u_j = (ext - i)^{-1} phi_j, for which ext u_j = phi_j + i u_j.
template <FieldBackend B>
std::pair<double, int> min_ritz_value(const Extension<B>& e, int members = 50) {
  const auto& b = e.backend();
  const auto trial = b.trial_family(members);
  const int m = int(trial.size());
  std::vector<typename B::Field> u;
  u.reserve(m);
  for (const auto& phi : trial) u.push_back(apply_resolvent(e, I, phi));
  CMat a(m, m), g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      g(i, j) = b.inner(u[j], u[i]);
      a(i, j) = b.inner(trial[j], u[i]) + I * g(i, j);
    }
  g = 0.5 * (g + g.adjoint()).eval();
  a = 0.5 * (a + a.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> ge(g);
  const double top = ge.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i)
    if (ge.eigenvalues()[i] > 1e-12 * top) keep.push_back(i);
  CMat t(m, Eigen::Index(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    t.col(Eigen::Index(j)) = ge.eigenvectors().col(keep[j]) / std::sqrt(ge.eigenvalues()[keep[j]]);
  const CMat h = t.adjoint() * a * t;
  Eigen::SelfAdjointEigenSolver<CMat> he(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return {he.eigenvalues().minCoeff(), int(keep.size())};
}

inline constexpr double nonnegativity_floor = -1e-10;

template <FieldBackend B>
NonnegativityReport is_nonnegative(const Extension<B>& e, int members = 50) {
  NonnegativityReport r;
  r.min_boundary_eigenvalue = min_boundary_eigenvalue(e);
  std::tie(r.min_ritz_value, r.ritz_rank) = min_ritz_value(e, members);
  if (e.reference() == Reference::dirichlet)
    r.nonnegative = r.min_boundary_eigenvalue >= nonnegativity_floor;
  else
    r.nonnegative = r.min_ritz_value >= nonnegativity_floor;
  return r;
}

}  // namespace kreinlab::ext
