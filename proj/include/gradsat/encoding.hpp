#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gradsat/formula.hpp"

namespace gradsat {

// Signed n x m incidence of variables (rows) in active clauses (columns).
// Entry (i, j) is +1 if x_i occurs in clause j, -1 if its negation does.
// Stored twice in compressed form: column-major drives the forward pass,
// row-major drives the gradient. s_j = -(length of clause j).
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(const CompiledFormula& cf);

  std::int32_t num_vars() const { return n_; }
  std::int32_t num_clauses() const { return m_; }
  std::size_t nnz() const { return col_var_.size(); }

  // Column j: variables (0-based) and signs of clause j.
  std::span<const std::int32_t> column_vars(std::int32_t j) const {
    return {col_var_.data() + col_ptr_[j], col_var_.data() + col_ptr_[j + 1]};
  }
  std::span<const std::int8_t> column_signs(std::int32_t j) const {
    return {col_sign_.data() + col_ptr_[j], col_sign_.data() + col_ptr_[j + 1]};
  }
  // Row i: clauses and signs in which variable i occurs.
  std::span<const std::int32_t> row_clauses(std::int32_t i) const {
    return {row_clause_.data() + row_ptr_[i], row_clause_.data() + row_ptr_[i + 1]};
  }
  std::span<const std::int8_t> row_signs(std::int32_t i) const {
    return {row_sign_.data() + row_ptr_[i], row_sign_.data() + row_ptr_[i + 1]};
  }

  const std::vector<std::int32_t>& s() const { return s_; }

  // Dense lookup, 0 when absent. O(column length); intended for tests and tools.
  int entry(std::int32_t i, std::int32_t j) const;

 private:
  std::int32_t n_ = 0;
  std::int32_t m_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::int32_t> col_var_;
  std::vector<std::int8_t> col_sign_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::int32_t> row_clause_;
  std::vector<std::int8_t> row_sign_;
  std::vector<std::int32_t> s_;
};

IncidenceMatrix build_incidence(const CompiledFormula& cf);

class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Clause activations f and the cached tanh(x) values t.
template <typename Real>
struct Activation {
  std::vector<Real> f;
  std::vector<Real> t;
};

// f = tanh(x) . W. Throws NonFiniteError on non-finite input.
template <typename Real>
Activation<Real> forward(const IncidenceMatrix& w, std::span<const Real> x);

// Allocation-free variant for the solve loop; skips the finiteness check.
template <typename Real>
void forward_into(const IncidenceMatrix& w, std::span<const Real> x, Activation<Real>& act);

// x_i > 0 -> true. Exact zero maps to false.
template <typename Real>
Assignment project(std::span<const Real> x);

using ClauseMask = std::vector<std::uint8_t>;

// mask_j = 1 iff clause j is falsified, using the algebraic test
// sum_i sign(a_i) W_ij == s_j with sign(a_i) = +1 for true and -1 for false.
ClauseMask unsat_mask(const IncidenceMatrix& w, const Assignment& a);

// Same contract by scanning each clause for a satisfied literal.
ClauseMask unsat_mask_scan(const IncidenceMatrix& w, const Assignment& a);

template <typename Real>
struct LossGrad {
  Real loss = 0;
  std::vector<Real> grad;
};

// Mean of f_j^2 over the falsified clauses U, and its gradient w.r.t. x.
// Satisfied clauses contribute nothing. Empty U gives zero loss and gradient.
template <typename Real>
LossGrad<Real> loss_and_grad(const IncidenceMatrix& w, const Activation<Real>& act, const ClauseMask& mask);

// Writes the gradient into `grad` (resized to n) and returns the loss.
template <typename Real>
Real loss_and_grad_into(const IncidenceMatrix& w, const Activation<Real>& act, const ClauseMask& mask,
                        std::size_t unsat_count, std::vector<Real>& grad);

}  // namespace gradsat
