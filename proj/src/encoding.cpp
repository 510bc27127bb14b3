#include "gradsat/encoding.hpp"

#include <cmath>
#include <string>

namespace gradsat {

IncidenceMatrix::IncidenceMatrix(const CompiledFormula& cf)
    : n_(cf.num_vars()), m_(static_cast<std::int32_t>(cf.num_active())) {
  col_ptr_.reserve(m_ + 1);
  s_.reserve(m_);
  std::vector<std::size_t> row_count(n_, 0);
  for (const Clause& c : cf.active_clauses) {
    for (Literal lit : c) {
      col_var_.push_back(var_of(lit) - 1);
      col_sign_.push_back(lit > 0 ? 1 : -1);
      ++row_count[var_of(lit) - 1];
    }
    col_ptr_.push_back(col_var_.size());
    s_.push_back(-static_cast<std::int32_t>(c.size()));
  }

  row_ptr_.assign(n_ + 1, 0);
  for (std::int32_t i = 0; i < n_; ++i) row_ptr_[i + 1] = row_ptr_[i] + row_count[i];
  row_clause_.resize(col_var_.size());
  row_sign_.resize(col_var_.size());
  std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  // Columns are visited in order, so each row lists its clauses ascending.
  for (std::int32_t j = 0; j < m_; ++j) {
    for (std::size_t e = col_ptr_[j]; e < col_ptr_[j + 1]; ++e) {
      std::size_t slot = fill[col_var_[e]]++;
      row_clause_[slot] = j;
      row_sign_[slot] = col_sign_[e];
    }
  }
}

int IncidenceMatrix::entry(std::int32_t i, std::int32_t j) const {
  auto vars = column_vars(j);
  auto signs = column_signs(j);
  for (std::size_t e = 0; e < vars.size(); ++e)
    if (vars[e] == i) return signs[e];
  return 0;
}

IncidenceMatrix build_incidence(const CompiledFormula& cf) { return IncidenceMatrix(cf); }

template <typename Real>
void forward_into(const IncidenceMatrix& w, std::span<const Real> x, Activation<Real>& act) {
  const std::int32_t n = w.num_vars();
  const std::int32_t m = w.num_clauses();
  act.t.resize(n);
  act.f.resize(m);
  for (std::int32_t i = 0; i < n; ++i) act.t[i] = std::tanh(x[i]);
  for (std::int32_t j = 0; j < m; ++j) {
    auto vars = w.column_vars(j);
    auto signs = w.column_signs(j);
    Real sum = 0;
    for (std::size_t e = 0; e < vars.size(); ++e) sum += signs[e] > 0 ? act.t[vars[e]] : -act.t[vars[e]];
    act.f[j] = sum;
  }
}

template <typename Real>
Activation<Real> forward(const IncidenceMatrix& w, std::span<const Real> x) {
  if (x.size() != static_cast<std::size_t>(w.num_vars()))
    throw std::invalid_argument("forward: x has length " + std::to_string(x.size()) + ", expected " +
                                std::to_string(w.num_vars()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) throw NonFiniteError("forward: x[" + std::to_string(i) + "] is not finite");
  Activation<Real> act;
  forward_into(w, x, act);
  return act;
}

template <typename Real>
Assignment project(std::span<const Real> x) {
  Assignment a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a.bits[i] = x[i] > Real(0);
  return a;
}

ClauseMask unsat_mask(const IncidenceMatrix& w, const Assignment& a) {
  if (a.size() != static_cast<std::size_t>(w.num_vars()))
    throw std::invalid_argument("unsat_mask: assignment length mismatch");
  const auto& s = w.s();
  ClauseMask mask(w.num_clauses(), 0);
  for (std::int32_t j = 0; j < w.num_clauses(); ++j) {
    auto vars = w.column_vars(j);
    auto signs = w.column_signs(j);
    std::int32_t dot = 0;
    for (std::size_t e = 0; e < vars.size(); ++e) dot += (a[vars[e]] ? 1 : -1) * signs[e];
    mask[j] = dot == s[j];
  }
  return mask;
}

ClauseMask unsat_mask_scan(const IncidenceMatrix& w, const Assignment& a) {
  if (a.size() != static_cast<std::size_t>(w.num_vars()))
    throw std::invalid_argument("unsat_mask_scan: assignment length mismatch");
  ClauseMask mask(w.num_clauses(), 0);
  for (std::int32_t j = 0; j < w.num_clauses(); ++j) {
    auto vars = w.column_vars(j);
    auto signs = w.column_signs(j);
    bool sat = false;
    for (std::size_t e = 0; e < vars.size() && !sat; ++e) sat = a[vars[e]] == (signs[e] > 0);
    mask[j] = !sat;
  }
  return mask;
}

template <typename Real>
Real loss_and_grad_into(const IncidenceMatrix& w, const Activation<Real>& act, const ClauseMask& mask,
                        std::size_t unsat_count, std::vector<Real>& grad) {
  const std::int32_t n = w.num_vars();
  grad.assign(n, Real(0));
  if (unsat_count == 0) return Real(0);
  const Real inv = Real(1) / static_cast<Real>(unsat_count);
  Real loss = 0;
  for (std::int32_t j = 0; j < w.num_clauses(); ++j)
    if (mask[j]) loss += act.f[j] * act.f[j];
  loss *= inv;
  const Real scale = Real(2) * inv;
  for (std::int32_t i = 0; i < n; ++i) {
    auto clauses = w.row_clauses(i);
    if (clauses.empty()) continue;
    auto signs = w.row_signs(i);
    Real acc = 0;
    for (std::size_t e = 0; e < clauses.size(); ++e) {
      const std::int32_t j = clauses[e];
      if (mask[j]) acc += signs[e] > 0 ? act.f[j] : -act.f[j];
    }
    if (acc != Real(0)) grad[i] = (Real(1) - act.t[i] * act.t[i]) * scale * acc;
  }
  return loss;
}

template <typename Real>
LossGrad<Real> loss_and_grad(const IncidenceMatrix& w, const Activation<Real>& act, const ClauseMask& mask) {
  if (mask.size() != static_cast<std::size_t>(w.num_clauses()) ||
      act.f.size() != static_cast<std::size_t>(w.num_clauses()) ||
      act.t.size() != static_cast<std::size_t>(w.num_vars()))
    throw std::invalid_argument("loss_and_grad: shape mismatch");
  std::size_t unsat = 0;
  for (auto b : mask) unsat += b != 0;
  LossGrad<Real> out;
  out.loss = loss_and_grad_into(w, act, mask, unsat, out.grad);
  return out;
}

#define GRADSAT_INSTANTIATE(Real)                                                                          \
  template void forward_into<Real>(const IncidenceMatrix&, std::span<const Real>, Activation<Real>&);      \
  template Activation<Real> forward<Real>(const IncidenceMatrix&, std::span<const Real>);                  \
  template Assignment project<Real>(std::span<const Real>);                                                \
  template Real loss_and_grad_into<Real>(const IncidenceMatrix&, const Activation<Real>&, const ClauseMask&, \
                                         std::size_t, std::vector<Real>&);                                 \
  template LossGrad<Real> loss_and_grad<Real>(const IncidenceMatrix&, const Activation<Real>&, const ClauseMask&);

GRADSAT_INSTANTIATE(float)
GRADSAT_INSTANTIATE(double)

#undef GRADSAT_INSTANTIATE

}  // namespace gradsat
