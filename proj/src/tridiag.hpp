#pragma once

#include <cstddef>
#include <vector>

namespace ergo::detail {

/// Solves sub[k] x[k-1] + diag[k] x[k] + sup[k] x[k+1] = rhs[k] without
/// pivoting (sub[0] and sup[m-1] are ignored). Returns false on a zero pivot.
inline bool solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                              const std::vector<double>& sup, std::vector<double>& rhs) {
  const std::size_t m = diag.size();
  std::vector<double> c(m);
  double piv = diag[0];
  if (piv == 0.0) return false;
  c[0] = sup[0] / piv;
  rhs[0] /= piv;
  for (std::size_t k = 1; k < m; ++k) {
    piv = diag[k] - sub[k] * c[k - 1];
    if (piv == 0.0) return false;
    c[k] = (k + 1 < m) ? sup[k] / piv : 0.0;
    rhs[k] = (rhs[k] - sub[k] * rhs[k - 1]) / piv;
  }
  for (std::size_t k = m - 1; k-- > 0;) rhs[k] -= c[k] * rhs[k + 1];
  return true;
}

}  // namespace ergo::detail
